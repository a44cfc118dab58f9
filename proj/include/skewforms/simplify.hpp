#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "skewforms/evaluate.hpp"
#include "skewforms/expr.hpp"

namespace skewforms {

/// Total structural order on expressions. Zero iff the trees are identical.
inline int compare(const Expr& a, const Expr& b) {
  if (a.same_node(b)) return 0;
  if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
  switch (a.op()) {
    case Op::Number: return a.number().compare(b.number());
    case Op::Variable: return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    case Op::Func:
      if (a.fn() != b.fn()) return a.fn() < b.fn() ? -1 : 1;
      break;
    default: break;
  }
  const auto aa = a.args();
  const auto ba = b.args();
  const std::size_t n = std::min(aa.size(), ba.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(aa[i], ba[i]); c != 0) return c;
  }
  if (aa.size() != ba.size()) return aa.size() < ba.size() ? -1 : 1;
  return 0;
}

inline bool structurally_equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

namespace canon {

Expr make_add(std::vector<Expr> terms);
Expr make_mul(std::vector<Expr> factors);
Expr make_pow(const Expr& base, const Expr& exponent);
Expr make_func(Fn f, const Expr& arg);

// Splits a canonical term into numeric coefficient and the remaining factor.
inline std::pair<Number, Expr> split_coefficient(const Expr& t) {
  if (t.is_number()) return {t.number(), Expr(1)};
  if (t.op() == Op::Mul && t.arg(0).is_number()) {
    std::vector<Expr> rest(t.args().begin() + 1, t.args().end());
    return {t.arg(0).number(), Expr::mul(std::move(rest))};
  }
  return {Number(1), t};
}

inline Expr scale(const Number& c, const Expr& rest) {
  if (c.is_zero()) return Expr();
  if (rest.is_one()) return Expr(c);
  if (c.is_one()) return rest;
  std::vector<Expr> f{Expr(c)};
  if (rest.op() == Op::Mul) {
    f.insert(f.end(), rest.args().begin(), rest.args().end());
  } else {
    f.push_back(rest);
  }
  return Expr::mul(std::move(f));
}

inline Expr make_add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  auto push = [&](auto&& self, const Expr& t) -> void {
    if (t.op() == Op::Add) {
      for (const auto& a : t.args()) self(self, a);
      return;
    }
    // Numeric coefficients distribute over sums.
    if (t.op() == Op::Mul && t.args().size() == 2 && t.arg(0).is_number() && t.arg(1).op() == Op::Add) {
      const Number c = t.arg(0).number();
      for (const auto& a : t.arg(1).args()) {
        auto [ca, ra] = split_coefficient(a);
        self(self, scale(c * ca, ra));
      }
      return;
    }
    flat.push_back(t);
  };
  for (const auto& t : terms) push(push, t);

  Number constant(0);
  std::map<Expr, Number, ExprLess> groups;
  for (const auto& t : flat) {
    if (t.is_number()) {
      constant = constant + t.number();
      continue;
    }
    auto [c, rest] = split_coefficient(t);
    auto [it, inserted] = groups.try_emplace(rest, c);
    if (!inserted) it->second = it->second + c;
  }
  std::vector<Expr> out;
  if (!constant.is_zero()) out.emplace_back(constant);
  for (const auto& [rest, c] : groups) {
    if (c.is_zero()) continue;
    out.push_back(scale(c, rest));
  }
  if (out.empty()) return Expr();
  if (out.size() == 1) return out.front();
  return Expr::add(std::move(out));
}

inline Expr make_mul(std::vector<Expr> factors) {
  Number coeff(1);
  std::map<Expr, std::vector<Expr>, ExprLess> bases;
  auto push = [&](auto&& self, const Expr& f) -> void {
    if (f.op() == Op::Mul) {
      for (const auto& a : f.args()) self(self, a);
      return;
    }
    if (f.is_number()) {
      coeff = coeff * f.number();
      return;
    }
    if (f.op() == Op::Pow) {
      bases[f.arg(0)].push_back(f.arg(1));
    } else {
      bases[f].push_back(Expr(1));
    }
  };
  for (const auto& f : factors) push(push, f);
  if (coeff.is_zero()) return Expr();

  std::vector<Expr> rest;
  for (auto& [base, exps] : bases) {
    const Expr e = make_add(std::move(exps));
    if (e.is_zero()) continue;
    const Expr p = make_pow(base, e);
    if (p.is_number()) {
      coeff = coeff * p.number();
    } else if (p.op() == Op::Mul) {
      // pow can only return a product when the base itself was a product,
      // which never happens for canonical factors; fold it in regardless.
      for (const auto& a : p.args()) {
        if (a.is_number())
          coeff = coeff * a.number();
        else
          rest.push_back(a);
      }
    } else {
      rest.push_back(p);
    }
  }
  if (coeff.is_zero()) return Expr();
  std::sort(rest.begin(), rest.end(), ExprLess{});
  if (rest.empty()) return Expr(coeff);
  if (rest.size() == 1 && rest.front().op() == Op::Add && !coeff.is_one()) {
    return make_add({scale(coeff, rest.front())});
  }
  if (coeff.is_one() && rest.size() == 1) return rest.front();
  if (!coeff.is_one()) rest.insert(rest.begin(), Expr(coeff));
  return Expr::mul(std::move(rest));
}

inline Expr make_pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_zero()) return Expr(1);
  if (exponent.is_one()) return base;
  if (base.is_one()) return Expr(1);
  if (base.is_number() && exponent.is_number()) {
    if (base.is_zero() && !exponent.number().is_negative()) return Expr();
    if (auto r = Number::pow(base.number(), exponent.number())) return Expr(*r);
    return Expr::pow(base, exponent);
  }
  if (base.is_zero() && exponent.is_number() && !exponent.number().is_negative()) return Expr();
  const bool int_exp = exponent.is_number() && exponent.number().is_integer();
  if (int_exp && base.op() == Op::Pow) {
    return make_pow(base.arg(0), make_mul({base.arg(1), exponent}));
  }
  if (int_exp && base.op() == Op::Mul) {
    std::vector<Expr> f;
    for (const auto& a : base.args()) f.push_back(make_pow(a, exponent));
    return make_mul(std::move(f));
  }
  return Expr::pow(base, exponent);
}

inline std::optional<Rational> exact_sqrt(const Rational& q) {
  if (q.num() < 0) return std::nullopt;
  auto isqrt = [](std::int64_t v) -> std::optional<std::int64_t> {
    auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
    for (std::int64_t c = std::max<std::int64_t>(0, r - 1); c <= r + 1; ++c) {
      if (static_cast<__int128>(c) * c == v) return c;
    }
    return std::nullopt;
  };
  auto n = isqrt(q.num());
  auto d = isqrt(q.den());
  if (!n || !d) return std::nullopt;
  return Rational(*n, *d);
}

inline Expr make_func(Fn f, const Expr& arg) {
  if (arg.is_number()) {
    const Number& n = arg.number();
    if (n.exact()) {
      if (n.is_zero()) {
        switch (f) {
          case Fn::Sin:
          case Fn::Tanh:
          case Fn::Sqrt: return Expr();
          case Fn::Cos:
          case Fn::Exp: return Expr(1);
          case Fn::Ln: break;
        }
      }
      if (f == Fn::Ln && n.is_one()) return Expr();
      if (f == Fn::Sqrt) {
        if (auto r = exact_sqrt(n.rational())) return Expr(Number(*r));
      }
    } else {
      try {
        return Expr::inexact(detail::apply_fn(f, n.value()));
      } catch (const DomainError&) {
        // keep symbolic; evaluation will raise
      }
    }
  }
  return Expr::func(f, arg);
}

}  // namespace canon

/// Canonical algebraic simplification. Idempotent and value preserving
/// (away from removable singularities such as x/x).
inline Expr simplify(const Expr& e) {
  switch (e.op()) {
    case Op::Number:
    case Op::Variable: return e;
    case Op::Neg: return canon::make_mul({Expr(-1), simplify(e.arg(0))});
    case Op::Sub: return canon::make_add({simplify(e.arg(0)), canon::make_mul({Expr(-1), simplify(e.arg(1))})});
    case Op::Div: return canon::make_mul({simplify(e.arg(0)), canon::make_pow(simplify(e.arg(1)), Expr(-1))});
    case Op::Pow: return canon::make_pow(simplify(e.arg(0)), simplify(e.arg(1)));
    case Op::Func: return canon::make_func(e.fn(), simplify(e.arg(0)));
    case Op::Add: {
      std::vector<Expr> t;
      for (const auto& a : e.args()) t.push_back(simplify(a));
      return canon::make_add(std::move(t));
    }
    case Op::Mul: {
      std::vector<Expr> f;
      for (const auto& a : e.args()) f.push_back(simplify(a));
      return canon::make_mul(std::move(f));
    }
  }
  return e;
}

namespace detail {

struct ExpansionTooLarge {};

inline std::vector<Expr> terms_of(const Expr& e) {
  if (e.op() == Op::Add) return {e.args().begin(), e.args().end()};
  return {e};
}

inline Expr distribute(const Expr& a, const Expr& b, std::size_t limit) {
  const auto ta = terms_of(a);
  const auto tb = terms_of(b);
  if (ta.size() * tb.size() > limit) throw ExpansionTooLarge{};
  std::vector<Expr> out;
  out.reserve(ta.size() * tb.size());
  for (const auto& x : ta)
    for (const auto& y : tb) out.push_back(canon::make_mul({x, y}));
  return canon::make_add(std::move(out));
}

inline Expr expand_canonical(const Expr& e, std::size_t limit) {
  switch (e.op()) {
    case Op::Add: {
      std::vector<Expr> t;
      for (const auto& a : e.args()) t.push_back(expand_canonical(a, limit));
      return canon::make_add(std::move(t));
    }
    case Op::Mul: {
      Expr acc(1);
      for (const auto& a : e.args()) acc = distribute(acc, expand_canonical(a, limit), limit);
      return acc;
    }
    case Op::Pow: {
      const Expr base = expand_canonical(e.arg(0), limit);
      const Expr& ex = e.arg(1);
      if (base.op() == Op::Add && ex.is_number() && ex.number().is_integer()) {
        const auto k = ex.number().rational().num();
        if (k > 0 && k <= 12) {
          Expr acc(1);
          for (std::int64_t i = 0; i < k; ++i) acc = distribute(acc, base, limit);
          return acc;
        }
      }
      return canon::make_pow(base, expand_canonical(ex, limit));
    }
    case Op::Func: return canon::make_func(e.fn(), expand_canonical(e.arg(0), limit));
    default: return e;
  }
}

}  // namespace detail

/// Polynomial expansion (products over sums, small positive integer powers of
/// sums). Returns nullopt if the expansion would exceed `term_limit` terms.
inline std::optional<Expr> expand(const Expr& e, std::size_t term_limit = 4096) {
  try {
    return detail::expand_canonical(simplify(e), term_limit);
  } catch (const detail::ExpansionTooLarge&) {
    return std::nullopt;
  }
}

}  // namespace skewforms
