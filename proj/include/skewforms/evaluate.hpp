#pragma once

#include <cmath>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "skewforms/expr.hpp"

namespace skewforms {

namespace detail {

inline double checked(double r, const char* what) {
  if (!std::isfinite(r)) throw DomainError(std::string("non-finite result in ") + what);
  return r;
}

inline double apply_div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return checked(a / b, "division");
}

inline double apply_pow(double b, double e) {
  if (b == 0.0 && e < 0.0) throw DomainError("division by zero (zero base, negative exponent)");
  if (b < 0.0 && std::floor(e) != e) throw DomainError("negative base with non-integer exponent");
  return checked(std::pow(b, e), "power");
}

inline double apply_fn(Fn f, double x) {
  switch (f) {
    case Fn::Sin: return std::sin(x);
    case Fn::Cos: return std::cos(x);
    case Fn::Exp: return checked(std::exp(x), "exp");
    case Fn::Ln:
      if (x <= 0.0) throw DomainError("ln of non-positive value");
      return std::log(x);
    case Fn::Sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative value");
      return std::sqrt(x);
    case Fn::Tanh: return std::tanh(x);
  }
  return 0.0;
}

inline void collect_variables(const Expr& e, std::set<std::string>& out) {
  if (e.op() == Op::Variable) {
    out.insert(e.name());
    return;
  }
  for (const auto& a : e.args()) collect_variables(a, out);
}

}  // namespace detail

/// Sorted set of variable names referenced by `e`.
inline std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  detail::collect_variables(e, out);
  return out;
}

inline bool depends_on(const Expr& e, const std::string& name) {
  if (e.op() == Op::Variable) return e.name() == name;
  for (const auto& a : e.args())
    if (depends_on(a, name)) return true;
  return false;
}

/// Floating evaluation. Throws UnboundVariableError or DomainError.
inline double evaluate(const Expr& e, const Bindings& bindings) {
  switch (e.op()) {
    case Op::Number: return e.number().value();
    case Op::Variable: {
      auto it = bindings.find(e.name());
      if (it == bindings.end()) throw UnboundVariableError(e.name());
      return it->second;
    }
    case Op::Neg: return -evaluate(e.arg(0), bindings);
    case Op::Add: {
      double s = 0.0;
      for (const auto& a : e.args()) s += evaluate(a, bindings);
      return detail::checked(s, "sum");
    }
    case Op::Sub: return detail::checked(evaluate(e.arg(0), bindings) - evaluate(e.arg(1), bindings), "difference");
    case Op::Mul: {
      double p = 1.0;
      for (const auto& a : e.args()) p *= evaluate(a, bindings);
      return detail::checked(p, "product");
    }
    case Op::Div: return detail::apply_div(evaluate(e.arg(0), bindings), evaluate(e.arg(1), bindings));
    case Op::Pow: return detail::apply_pow(evaluate(e.arg(0), bindings), evaluate(e.arg(1), bindings));
    case Op::Func: return detail::apply_fn(e.fn(), evaluate(e.arg(0), bindings));
  }
  return 0.0;
}

/// An Expr flattened to a postfix program over positional variable slots.
/// Used on hot paths (ODE right-hand sides, grid sweeps) where name lookup
/// per node would dominate. Same domain semantics as `evaluate`.
class Program {
 public:
  Program() = default;

  Program(const Expr& e, std::span<const std::string> slots) {
    emit(e, slots);
    int depth = 0;
    for (const auto& ins : code_) {
      depth += ins.stack_delta();
      max_depth_ = std::max(max_depth_, depth);
    }
  }

  [[nodiscard]] double operator()(std::span<const double> values) const {
    std::vector<double> stack;
    stack.reserve(static_cast<std::size_t>(max_depth_) + 1);
    for (const auto& ins : code_) {
      switch (ins.kind) {
        case Kind::Const: stack.push_back(ins.value); break;
        case Kind::Slot: stack.push_back(values[ins.count]); break;
        case Kind::Neg: stack.back() = -stack.back(); break;
        case Kind::Add: {
          double s = 0.0;
          for (std::size_t i = stack.size() - ins.count; i < stack.size(); ++i) s += stack[i];
          stack.resize(stack.size() - ins.count);
          stack.push_back(detail::checked(s, "sum"));
          break;
        }
        case Kind::Mul: {
          double p = 1.0;
          for (std::size_t i = stack.size() - ins.count; i < stack.size(); ++i) p *= stack[i];
          stack.resize(stack.size() - ins.count);
          stack.push_back(detail::checked(p, "product"));
          break;
        }
        case Kind::Sub: {
          const double b = stack.back();
          stack.pop_back();
          stack.back() = detail::checked(stack.back() - b, "difference");
          break;
        }
        case Kind::Div: {
          const double b = stack.back();
          stack.pop_back();
          stack.back() = detail::apply_div(stack.back(), b);
          break;
        }
        case Kind::Pow: {
          const double b = stack.back();
          stack.pop_back();
          stack.back() = detail::apply_pow(stack.back(), b);
          break;
        }
        case Kind::Func: stack.back() = detail::apply_fn(ins.fn, stack.back()); break;
      }
    }
    return stack.back();
  }

 private:
  enum class Kind { Const, Slot, Neg, Add, Mul, Sub, Div, Pow, Func };
  struct Instr {
    Kind kind;
    double value = 0.0;
    std::size_t count = 0;
    Fn fn = Fn::Sin;
    [[nodiscard]] int stack_delta() const {
      switch (kind) {
        case Kind::Const:
        case Kind::Slot: return 1;
        case Kind::Add:
        case Kind::Mul: return 1 - static_cast<int>(count);
        case Kind::Sub:
        case Kind::Div:
        case Kind::Pow: return -1;
        default: return 0;
      }
    }
  };

  void emit(const Expr& e, std::span<const std::string> slots) {
    switch (e.op()) {
      case Op::Number: code_.push_back({Kind::Const, e.number().value()}); return;
      case Op::Variable: {
        for (std::size_t i = 0; i < slots.size(); ++i) {
          if (slots[i] == e.name()) {
            code_.push_back({Kind::Slot, 0.0, i});
            return;
          }
        }
        throw UnboundVariableError(e.name());
      }
      case Op::Func:
        emit(e.arg(0), slots);
        code_.push_back({Kind::Func, 0.0, 0, e.fn()});
        return;
      default: break;
    }
    for (const auto& a : e.args()) emit(a, slots);
    switch (e.op()) {
      case Op::Neg: code_.push_back({Kind::Neg}); break;
      case Op::Add: code_.push_back({Kind::Add, 0.0, e.args().size()}); break;
      case Op::Mul: code_.push_back({Kind::Mul, 0.0, e.args().size()}); break;
      case Op::Sub: code_.push_back({Kind::Sub}); break;
      case Op::Div: code_.push_back({Kind::Div}); break;
      case Op::Pow: code_.push_back({Kind::Pow}); break;
      default: break;
    }
  }

  std::vector<Instr> code_;
  int max_depth_ = 0;
};

}  // namespace skewforms
