#pragma once

// Immutable symbolic expression trees over named real variables.
//
// Trees built by the parser or by the operator overloads keep the shape of
// the input (negation, binary minus and division nodes included). `simplify`
// rewrites into a canonical form that only uses Number, Variable, n-ary Add,
// n-ary Mul, Pow and Func nodes:
//   - sums and products are flattened, constants folded over exact rationals,
//     like terms and like bases collected, operands sorted by `compare`;
//   - a product never pairs a Number with a single Add factor (numeric
//     coefficients are distributed over sums);
//   - negation is Mul(-1, e), subtraction is Add(a, Mul(-1, b)) and division
//     is Mul(a, Pow(b, -1)).

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skewforms/errors.hpp"
#include "skewforms/number.hpp"

namespace skewforms {

enum class Op { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Func };
enum class Fn { Sin, Cos, Exp, Ln, Sqrt, Tanh };

inline std::string_view fn_name(Fn f) {
  switch (f) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Sqrt: return "sqrt";
    case Fn::Tanh: return "tanh";
  }
  return "?";
}

inline bool fn_from_name(std::string_view name, Fn& out) {
  static constexpr std::array<std::pair<std::string_view, Fn>, 6> table{
      {{"sin", Fn::Sin}, {"cos", Fn::Cos}, {"exp", Fn::Exp}, {"ln", Fn::Ln}, {"sqrt", Fn::Sqrt}, {"tanh", Fn::Tanh}}};
  for (const auto& [n, f] : table) {
    if (n == name) {
      out = f;
      return true;
    }
  }
  return false;
}

using Bindings = std::map<std::string, double, std::less<>>;

class Expr {
 public:
  /// The exact zero constant.
  Expr() : Expr(Number(0)) {}
  Expr(const Number& n) {
    auto node = std::make_shared<Node>();
    node->num = n;
    node_ = std::move(node);
  }
  Expr(int v) : Expr(Number(v)) {}

  static Expr inexact(double v) { return Expr(Number::inexact(v)); }
  static Expr variable(std::string name) {
    auto node = std::make_shared<Node>();
    node->op = Op::Variable;
    node->name = std::move(name);
    return Expr(std::move(node));
  }
  static Expr func(Fn f, Expr arg) {
    auto node = std::make_shared<Node>();
    node->op = Op::Func;
    node->fn = f;
    node->args.push_back(std::move(arg));
    return Expr(std::move(node));
  }
  static Expr neg(Expr a) { return make(Op::Neg, {std::move(a)}); }
  static Expr sub(Expr a, Expr b) { return make(Op::Sub, {std::move(a), std::move(b)}); }
  static Expr div(Expr a, Expr b) { return make(Op::Div, {std::move(a), std::move(b)}); }
  static Expr pow(Expr base, Expr exponent) { return make(Op::Pow, {std::move(base), std::move(exponent)}); }
  static Expr add(std::vector<Expr> terms) {
    if (terms.empty()) return Expr();
    if (terms.size() == 1) return terms.front();
    return make(Op::Add, std::move(terms));
  }
  static Expr mul(std::vector<Expr> factors) {
    if (factors.empty()) return Expr(1);
    if (factors.size() == 1) return factors.front();
    return make(Op::Mul, std::move(factors));
  }

  [[nodiscard]] Op op() const { return node_->op; }
  [[nodiscard]] const Number& number() const { return node_->num; }
  [[nodiscard]] const std::string& name() const { return node_->name; }
  [[nodiscard]] Fn fn() const { return node_->fn; }
  [[nodiscard]] std::span<const Expr> args() const { return node_->args; }
  [[nodiscard]] const Expr& arg(std::size_t i) const { return node_->args[i]; }

  [[nodiscard]] bool is_number() const { return op() == Op::Number; }
  [[nodiscard]] bool is_zero() const { return is_number() && number().is_zero(); }
  [[nodiscard]] bool is_one() const { return is_number() && number().is_one(); }
  [[nodiscard]] bool same_node(const Expr& o) const { return node_ == o.node_; }

 private:
  struct Node {
    Op op = Op::Number;
    Number num;
    std::string name;
    Fn fn = Fn::Sin;
    std::vector<Expr> args;
  };

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Op op, std::vector<Expr> args) {
    auto node = std::make_shared<Node>();
    node->op = op;
    node->args = std::move(args);
    return Expr(std::move(node));
  }

  std::shared_ptr<const Node> node_;
};

inline Expr var(std::string name) { return Expr::variable(std::move(name)); }

inline Expr operator+(Expr a, Expr b) { return Expr::add({std::move(a), std::move(b)}); }
inline Expr operator-(Expr a, Expr b) { return Expr::sub(std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::mul({std::move(a), std::move(b)}); }
inline Expr operator/(Expr a, Expr b) { return Expr::div(std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return Expr::neg(std::move(a)); }

inline Expr sin(Expr a) { return Expr::func(Fn::Sin, std::move(a)); }
inline Expr cos(Expr a) { return Expr::func(Fn::Cos, std::move(a)); }
inline Expr exp(Expr a) { return Expr::func(Fn::Exp, std::move(a)); }
inline Expr ln(Expr a) { return Expr::func(Fn::Ln, std::move(a)); }
inline Expr sqrt(Expr a) { return Expr::func(Fn::Sqrt, std::move(a)); }
inline Expr tanh(Expr a) { return Expr::func(Fn::Tanh, std::move(a)); }
inline Expr pow(Expr b, Expr e) { return Expr::pow(std::move(b), std::move(e)); }

}  // namespace skewforms
