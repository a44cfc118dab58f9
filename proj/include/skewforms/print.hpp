#pragma once

#include <algorithm>
#include <span>
#include <charconv>
#include <string>
#include <system_error>
#include <vector>

#include "skewforms/expr.hpp"

namespace skewforms {

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return std::to_string(v);
  return {buf, ptr};
}

namespace detail {

inline bool is_reciprocal(const Expr& f) {
  return f.op() == Op::Pow && f.arg(1).is_number() && f.arg(1).number().is_integer() &&
         f.arg(1).number().is_negative();
}

// Binding strength of the printed form; higher binds tighter.
inline int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return is_reciprocal(e) ? 2 : 4;
    case Op::Number: {
      const Number& n = e.number();
      if (n.is_negative()) return 0;  // always parenthesized
      if (n.exact() && !n.rational().is_integer()) return 2;
      return 5;
    }
    default: return 5;
  }
}

inline std::string number_text(const Number& n) {
  if (!n.exact()) return format_double(n.value());
  const Rational& q = n.rational();
  std::string s = std::to_string(q.num());
  if (!q.is_integer()) s += "/" + std::to_string(q.den());
  return s;
}

std::string print(const Expr& e);

inline std::string wrap(const Expr& e, int min_prec) {
  std::string s = print(e);
  return precedence(e) >= min_prec ? s : "(" + s + ")";
}

inline bool is_negative_coefficient_term(const Expr& t) {
  if (t.is_number()) return t.number().is_negative();
  return t.op() == Op::Mul && t.arg(0).is_number() && t.arg(0).number().is_negative();
}

// Term with its leading minus sign removed.
inline Expr negated(const Expr& t) {
  if (t.is_number()) return Expr(-t.number());
  const Number c = -t.arg(0).number();
  std::vector<Expr> rest(t.args().begin() + 1, t.args().end());
  if (!c.is_one()) rest.insert(rest.begin(), Expr(c));
  return Expr::mul(std::move(rest));
}

// "-" followed by `body`; parenthesized when the body would start with a
// power, since the grammar reads "-x^2" as (-x)^2.
inline std::string minus_prefix(const Expr& body) {
  const Expr& first = body.op() == Op::Mul ? body.arg(0) : body;
  const bool starts_with_pow = first.op() == Op::Pow && !is_reciprocal(first);
  const std::string s = print(body);
  const bool starts_with_minus = !s.empty() && s.front() == '-';
  return starts_with_pow || starts_with_minus || precedence(body) < 2 ? "-(" + s + ")" : "-" + s;
}

inline std::string print_factors(std::span<const Expr> factors) {
  std::string num;
  std::string den;
  for (const auto& f : factors) {
    if (is_reciprocal(f)) {
      const Number k = -f.arg(1).number();
      const Expr d = k.is_one() ? f.arg(0) : Expr::pow(f.arg(0), Expr(k));
      den += "/" + wrap(d, 3);
    } else {
      if (!num.empty()) num += "*";
      num += wrap(f, 2);
    }
  }
  if (num.empty()) num = "1";
  return num + den;
}

inline std::string print_mul(const Expr& e) {
  if (is_negative_coefficient_term(e)) return minus_prefix(negated(e));
  return print_factors(e.args());
}

inline std::string print_add(const Expr& e) {
  // Constant term last for readability.
  std::vector<Expr> terms(e.args().begin(), e.args().end());
  std::stable_partition(terms.begin(), terms.end(), [](const Expr& t) { return !t.is_number(); });
  std::string s;
  bool first = true;
  for (const auto& t : terms) {
    if (is_negative_coefficient_term(t)) {
      s += first ? minus_prefix(negated(t)) : " - " + wrap(negated(t), 2);
    } else {
      if (!first) s += " + ";
      s += wrap(t, 1);
    }
    first = false;
  }
  return s;
}

inline std::string print(const Expr& e) {
  switch (e.op()) {
    case Op::Number: return number_text(e.number());
    case Op::Variable: return e.name();
    case Op::Neg: return minus_prefix(e.arg(0));
    case Op::Add: return print_add(e);
    case Op::Sub: return wrap(e.arg(0), 1) + " - " + wrap(e.arg(1), 2);
    case Op::Mul: return print_mul(e);
    case Op::Div: return wrap(e.arg(0), 2) + "/" + wrap(e.arg(1), 3);
    case Op::Pow: return is_reciprocal(e) ? print_factors(std::span<const Expr>(&e, 1)) : wrap(e.arg(0), 5) + "^" + wrap(e.arg(1), 5);
    case Op::Func: return std::string(fn_name(e.fn())) + "(" + print(e.arg(0)) + ")";
  }
  return "?";
}

}  // namespace detail

/// Text form in the input grammar; `parse(to_string(e))` evaluates like `e`.
inline std::string to_string(const Expr& e) { return detail::print(e); }

}  // namespace skewforms
