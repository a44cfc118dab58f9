#pragma once

// Recursive-descent parser for the expression grammar:
//
//   expr   := term { ("+"|"-") term } ;
//   term   := factor { ("*"|"/") factor } ;
//   factor := unary [ "^" factor ] ;
//   unary  := [ "-" ] atom ;
//   atom   := NUMBER | IDENT | FUNC "(" expr ")" | "(" expr ")" ;
//   FUNC   := "sin"|"cos"|"exp"|"ln"|"sqrt"|"tanh" ;
//   IDENT  := letter { letter | digit } ;
//   NUMBER := digit { digit } [ "." { digit } ] [ ("e"|"E") ["+"|"-"] digit { digit } ] ;
//
// Note that unary minus binds to the atom, so "-x^2" reads as (-x)^2.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skewforms/expr.hpp"

namespace skewforms {

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, std::optional<std::span<const std::string>> allowed)
      : text_(text), allowed_(allowed) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * factor();
      } else if (accept('/')) {
        lhs = lhs / factor();
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    Expr base = unary();
    if (accept('^')) return Expr::pow(base, factor());
    return base;
  }

  Expr unary() {
    if (accept('-')) return -atom();
    return atom();
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    Fn f;
    if (fn_from_name(name, f)) {
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '(' after function " + name);
      ++pos_;
      Expr arg = expr();
      expect(')');
      return Expr::func(f, std::move(arg));
    }
    if (allowed_ && std::find(allowed_->begin(), allowed_->end(), name) == allowed_->end()) {
      throw UnknownIdentifierError(name);
    }
    return Expr::variable(name);
  }

  Expr number() {
    const std::size_t start = pos_;
    std::string digits;
    int frac = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) digits += text_[pos_++];
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits += text_[pos_++];
        ++frac;
      }
    }
    long exponent = 0;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      bool negative = false;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) {
        negative = text_[p] == '-';
        ++p;
      }
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        const std::size_t estart = p;
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
        if (p - estart > 6) {
          pos_ = estart;
          fail("exponent out of range");
        }
        exponent = std::stol(std::string(text_.substr(estart, p - estart)));
        if (negative) exponent = -exponent;
        pos_ = p;
      }
    }
    const std::string_view lexeme = text_.substr(start, pos_ - start);

    // Exact rational when the literal fits in 64 bits.
    auto first_nonzero = digits.find_first_not_of('0');
    const std::string sig = first_nonzero == std::string::npos ? "0" : digits.substr(first_nonzero);
    const long scale = exponent - frac;
    if (sig.size() <= 18 && scale >= -18 && scale <= 18 &&
        static_cast<long>(sig.size()) + std::max(scale, 0L) <= 18) {
      std::int64_t m = std::stoll(sig);
      std::int64_t p10 = 1;
      for (long i = 0; i < (scale < 0 ? -scale : scale); ++i) p10 *= 10;
      return scale >= 0 ? Expr(Number(Rational(m * p10, 1))) : Expr(Number(Rational(m, p10)));
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), v);
    if (ec != std::errc() || !std::isfinite(v)) {
      pos_ = start;
      fail("numeric literal out of range");
    }
    return Expr::inexact(v);
  }

  std::string_view text_;
  std::optional<std::span<const std::string>> allowed_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text`; every identifier must appear in `allowed_vars`.
inline Expr parse(std::string_view text, std::span<const std::string> allowed_vars) {
  return detail::Parser(text, allowed_vars).run();
}

inline Expr parse(std::string_view text, const std::vector<std::string>& allowed_vars) {
  return parse(text, std::span<const std::string>(allowed_vars));
}

/// Parses `text` accepting any identifier as a variable.
inline Expr parse_unchecked(std::string_view text) { return detail::Parser(text, std::nullopt).run(); }

}  // namespace skewforms
