#pragma once

#include <string>
#include <vector>

#include "skewforms/evaluate.hpp"
#include "skewforms/simplify.hpp"

namespace skewforms {

namespace detail {

inline Expr derive(const Expr& e, const std::string& v) {
  if (!depends_on(e, v)) return Expr();
  switch (e.op()) {
    case Op::Number: return Expr();
    case Op::Variable: return Expr(1);
    case Op::Neg: return -derive(e.arg(0), v);
    case Op::Add: {
      std::vector<Expr> t;
      for (const auto& a : e.args()) t.push_back(derive(a, v));
      return Expr::add(std::move(t));
    }
    case Op::Sub: return derive(e.arg(0), v) - derive(e.arg(1), v);
    case Op::Mul: {
      const auto f = e.args();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (!depends_on(f[i], v)) continue;
        std::vector<Expr> prod;
        for (std::size_t j = 0; j < f.size(); ++j) prod.push_back(j == i ? derive(f[j], v) : f[j]);
        terms.push_back(Expr::mul(std::move(prod)));
      }
      return Expr::add(std::move(terms));
    }
    case Op::Div: {
      const Expr& a = e.arg(0);
      const Expr& b = e.arg(1);
      return (derive(a, v) * b - a * derive(b, v)) / Expr::pow(b, Expr(2));
    }
    case Op::Pow: {
      const Expr& f = e.arg(0);
      const Expr& g = e.arg(1);
      if (g.is_number() && g.number().is_integer()) {
        const Number k = g.number();
        return Expr::mul({Expr(k), Expr::pow(f, Expr(k + Number(-1))), derive(f, v)});
      }
      // f^g = exp(g ln f):  d(f^g) = f^g * (g' ln f + g f'/f)
      return e * (derive(g, v) * ln(f) + g * derive(f, v) / f);
    }
    case Op::Func: {
      const Expr& a = e.arg(0);
      const Expr da = derive(a, v);
      switch (e.fn()) {
        case Fn::Sin: return cos(a) * da;
        case Fn::Cos: return -sin(a) * da;
        case Fn::Exp: return e * da;
        case Fn::Ln: return da / a;
        case Fn::Sqrt: return da / (Expr(2) * e);
        case Fn::Tanh: return (Expr(1) - Expr::pow(e, Expr(2))) * da;
      }
    }
  }
  return Expr();
}

}  // namespace detail

/// Exact partial derivative with respect to `var`, simplified.
inline Expr differentiate(const Expr& e, const std::string& var) { return simplify(detail::derive(e, var)); }

}  // namespace skewforms
