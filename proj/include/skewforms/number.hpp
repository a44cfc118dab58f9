#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace skewforms {

/// Exact rational with 64-bit numerator/denominator, always normalized (den > 0, gcd 1).
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = g ? num / g : num;
    den_ = g ? den / g : den;
  }

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }
  [[nodiscard]] bool is_integer() const { return den_ == 1; }
  [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const Rational&, const Rational&) = default;

  // Overflow-checked arithmetic; nullopt means the exact result does not fit.
  static std::optional<Rational> add(const Rational& a, const Rational& b) {
    const __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    const __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return from_wide(n, d);
  }
  static std::optional<Rational> mul(const Rational& a, const Rational& b) {
    const __int128 n = static_cast<__int128>(a.num_) * b.num_;
    const __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return from_wide(n, d);
  }
  static std::optional<Rational> inverse(const Rational& a) {
    if (a.num_ == 0) return std::nullopt;
    return Rational(a.den_, a.num_);
  }
  static std::optional<Rational> pow(Rational base, std::int64_t exp) {
    if (exp < 0) {
      auto inv = inverse(base);
      if (!inv) return std::nullopt;
      base = *inv;
      exp = -exp;
    }
    Rational result(1);
    while (exp > 0) {
      if (exp & 1) {
        auto r = mul(result, base);
        if (!r) return std::nullopt;
        result = *r;
      }
      exp >>= 1;
      if (exp > 0) {
        auto b = mul(base, base);
        if (!b) return std::nullopt;
        base = *b;
      }
    }
    return result;
  }

  [[nodiscard]] int compare(const Rational& o) const {
    const __int128 l = static_cast<__int128>(num_) * o.den_;
    const __int128 r = static_cast<__int128>(o.num_) * den_;
    return l < r ? -1 : (l > r ? 1 : 0);
  }

 private:
  static std::optional<Rational> from_wide(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    constexpr __int128 lim = INT64_MAX;
    if (n > lim || n < -lim || d > lim) return std::nullopt;
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// A constant coefficient: exact rational when possible, otherwise a double.
class Number {
 public:
  Number() = default;
  Number(Rational q) : exact_(true), q_(q) {}
  Number(std::int64_t v) : exact_(true), q_(v) {}
  Number(int v) : exact_(true), q_(v) {}
  static Number inexact(double v) {
    Number n;
    n.exact_ = false;
    n.v_ = v;
    return n;
  }

  [[nodiscard]] bool exact() const { return exact_; }
  [[nodiscard]] const Rational& rational() const { return q_; }
  [[nodiscard]] double value() const { return exact_ ? q_.to_double() : v_; }

  [[nodiscard]] bool is_zero() const { return exact_ ? q_.num() == 0 : v_ == 0.0; }
  [[nodiscard]] bool is_one() const { return exact_ ? (q_.num() == 1 && q_.den() == 1) : v_ == 1.0; }
  [[nodiscard]] bool is_negative() const { return value() < 0.0; }
  [[nodiscard]] bool is_integer() const { return exact_ && q_.is_integer(); }

  friend Number operator+(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) {
      if (auto r = Rational::add(a.q_, b.q_)) return *r;
    }
    return inexact(a.value() + b.value());
  }
  friend Number operator*(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) {
      if (auto r = Rational::mul(a.q_, b.q_)) return *r;
    }
    return inexact(a.value() * b.value());
  }
  friend Number operator-(const Number& a) { return a * Number(-1); }

  /// Exact power for integer exponents of exact bases; nullopt when the result
  /// is undefined (0^negative) or not representable exactly and not foldable.
  static std::optional<Number> pow(const Number& base, const Number& exp) {
    if (base.exact_ && exp.is_integer()) {
      if (base.is_zero() && exp.q_.num() < 0) return std::nullopt;
      if (auto r = Rational::pow(base.q_, exp.q_.num())) return Number(*r);
      return inexact(std::pow(base.value(), exp.value()));
    }
    if (base.exact_ && exp.exact_) return std::nullopt;  // keep radicals symbolic
    const double b = base.value();
    const double e = exp.value();
    if (b < 0.0 && std::floor(e) != e) return std::nullopt;
    if (b == 0.0 && e < 0.0) return std::nullopt;
    const double r = std::pow(b, e);
    if (!std::isfinite(r)) return std::nullopt;
    return inexact(r);
  }

  /// Total order used for canonical sorting. Exact numbers sort before inexact ones.
  [[nodiscard]] int compare(const Number& o) const {
    if (exact_ != o.exact_) return exact_ ? -1 : 1;
    if (exact_) return q_.compare(o.q_);
    return v_ < o.v_ ? -1 : (v_ > o.v_ ? 1 : 0);
  }

 private:
  bool exact_ = true;
  Rational q_{0};
  double v_ = 0.0;
};

}  // namespace skewforms
