#pragma once

// Legendre transform of a Lagrangian L(v) with m = 1 or 2 velocities:
// p = grad_v L, H(p) = p.v - L(v). The transform is computed on a sample grid
// in v; it is invertible where the Hessian determinant of L is nonzero.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "skewforms/characteristics.hpp"
#include "skewforms/symbolic.hpp"

namespace skewforms {

using Box = std::vector<std::pair<double, double>>;

/// Default names: v / p for m = 1, v1 v2 / p1 p2 for m = 2.
inline std::vector<std::string> velocity_names(int m) {
  if (m == 1) return {"v"};
  if (m == 2) return {"v1", "v2"};
  throw ValidationError("E_DIMENSION", "Legendre analysis supports m = 1 or 2");
}
inline std::vector<std::string> momentum_names(int m) {
  if (m == 1) return {"p"};
  if (m == 2) return {"p1", "p2"};
  throw ValidationError("E_DIMENSION", "Legendre analysis supports m = 1 or 2");
}

struct Lagrangian {
  Expr L;
  std::vector<std::string> vars;

  [[nodiscard]] int m() const { return static_cast<int>(vars.size()); }

  void validate() const {
    if (vars.size() != 1 && vars.size() != 2) throw ValidationError("E_DIMENSION", "Legendre analysis supports m = 1 or 2");
    const std::set<std::string> known(vars.begin(), vars.end());
    for (const auto& v : free_variables(L))
      if (!known.count(v)) throw UnknownIdentifierError(v);
  }

  static Lagrangian from_text(std::string_view text, int m) {
    Lagrangian out{Expr(), velocity_names(m)};
    out.L = parse(text, out.vars);
    out.validate();
    return out;
  }
};

/// Symbolic determinant of the v-Hessian of L.
inline Expr hessian_determinant(const Lagrangian& lag) {
  lag.validate();
  if (lag.m() == 1) return differentiate(differentiate(lag.L, lag.vars[0]), lag.vars[0]);
  const Expr L1 = differentiate(lag.L, lag.vars[0]);
  const Expr L2 = differentiate(lag.L, lag.vars[1]);
  const Expr L11 = differentiate(L1, lag.vars[0]);
  const Expr L22 = differentiate(L2, lag.vars[1]);
  const Expr L12 = differentiate(L1, lag.vars[1]);
  return simplify(L11 * L22 - L12 * L12);
}

namespace detail {

inline void check_box(const Box& box, int m) {
  if (static_cast<int>(box.size()) != m) throw ValidationError("E_DIMENSION", "domain needs one interval per velocity");
  for (const auto& [lo, hi] : box)
    if (!(hi > lo)) throw ValidationError("E_DOMAIN_BOX", "domain intervals need lo < hi");
}

inline double grid_point(const std::pair<double, double>& iv, int i, int count) {
  return iv.first + (iv.second - iv.first) * i / (count - 1);
}

}  // namespace detail

struct DegeneracyReport {
  Expr determinant;
  bool identically_degenerate = false;
  std::vector<std::vector<double>> zeros;  // points in v-space
};

/// Symbolic Hessian determinant plus its zeros in `box`: sign changes along
/// the lines of a `per_axis`-point grid, refined by bisection to `tolerance`.
inline DegeneracyReport degeneracy_check(const Lagrangian& lag, const Box& box, int per_axis = 101,
                                         double tolerance = 1e-10, const ZeroTestOptions& zt = {}) {
  DegeneracyReport rep;
  rep.determinant = hessian_determinant(lag);
  if (is_identically_zero(rep.determinant, zt)) {
    rep.identically_degenerate = true;
    return rep;
  }
  const int m = lag.m();
  detail::check_box(box, m);
  const Program det(rep.determinant, lag.vars);

  // Scans one grid line: coordinate `axis` varies, the rest are fixed in `pt`.
  auto scan_line = [&](std::vector<double> pt, int axis) {
    const auto& iv = box[static_cast<std::size_t>(axis)];
    auto f = [&](double t) {
      pt[static_cast<std::size_t>(axis)] = t;
      return det(pt);
    };
    double t0 = detail::grid_point(iv, 0, per_axis);
    double f0 = f(t0);
    for (int i = 1; i < per_axis; ++i) {
      const double t1 = detail::grid_point(iv, i, per_axis);
      const double f1 = f(t1);
      if (f0 == 0.0) {
        pt[static_cast<std::size_t>(axis)] = t0;
        rep.zeros.push_back(pt);
      } else if (f0 * f1 < 0.0) {
        double a = t0, b = t1, fa = f0;
        while (b - a > tolerance) {
          const double c = 0.5 * (a + b);
          const double fc = f(c);
          if (fc == 0.0) {
            a = b = c;
            break;
          }
          if (fa * fc < 0.0) {
            b = c;
          } else {
            a = c;
            fa = fc;
          }
        }
        pt[static_cast<std::size_t>(axis)] = 0.5 * (a + b);
        rep.zeros.push_back(pt);
      }
      t0 = t1;
      f0 = f1;
    }
    if (f0 == 0.0) {
      pt[static_cast<std::size_t>(axis)] = t0;
      rep.zeros.push_back(pt);
    }
  };

  if (m == 1) {
    scan_line({0.0}, 0);
  } else {
    for (int axis = 0; axis < 2; ++axis) {
      const int other = 1 - axis;
      for (int j = 0; j < per_axis; ++j) {
        std::vector<double> pt(2);
        pt[static_cast<std::size_t>(other)] = detail::grid_point(box[static_cast<std::size_t>(other)], j, per_axis);
        scan_line(pt, axis);
      }
    }
  }
  return rep;
}

struct LegendreTable {
  int m = 1;
  std::vector<std::vector<double>> v;  // sample points, row-major over axes
  std::vector<std::vector<double>> p;  // grad L at each sample
  std::vector<double> H;               // p.v - L
  std::vector<double> det;             // Hessian determinant at each sample
  std::optional<Expr> closed_form;     // H over momentum_names(m), when recognized
  Expr hessian_det;
};

namespace detail {

// Coefficients c_0..c_4 when L expands to a polynomial of degree <= 4 in v.
inline std::optional<std::vector<Number>> polynomial_coefficients(const Expr& L, const std::string& v) {
  const auto expanded = expand(L);
  if (!expanded) return std::nullopt;
  std::vector<Number> c(5, Number(0));
  auto power_of = [&](const Expr& f) -> std::optional<int> {
    if (f.op() == Op::Variable && f.name() == v) return 1;
    if (f.op() == Op::Pow && f.arg(0).op() == Op::Variable && f.arg(0).name() == v && f.arg(1).is_number() &&
        f.arg(1).number().exact() && f.arg(1).number().is_integer()) {
      const auto k = f.arg(1).number().rational().num();
      if (k >= 1 && k <= 4) return static_cast<int>(k);
    }
    return std::nullopt;
  };
  const auto terms = terms_of(*expanded);
  for (const auto& t : terms) {
    auto [coeff, rest] = canon::split_coefficient(t);
    if (!coeff.exact()) return std::nullopt;
    int k = 0;
    if (!rest.is_one()) {
      auto pk = power_of(rest);
      if (!pk) return std::nullopt;
      k = *pk;
    }
    c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k)] + coeff;
  }
  return c;
}

}  // namespace detail

/// Closed-form H(p) for m = 1 in two recognized cases:
///   L = a v^2 + b v + c (a != 0):      H = (p - b)^2 / (4a) - c
///   L = c v^k, k in {3, 4}, c > 0, on a domain with v > 0:
///                                      H = (k - 1) c (p / (c k))^(k / (k - 1))
inline std::optional<Expr> closed_form_hamiltonian(const Lagrangian& lag, const Box& box) {
  if (lag.m() != 1) return std::nullopt;
  const auto c = detail::polynomial_coefficients(lag.L, lag.vars[0]);
  if (!c) return std::nullopt;
  const Expr p = var(momentum_names(1)[0]);
  const auto& k = *c;
  if (k[3].is_zero() && k[4].is_zero() && !k[2].is_zero()) {
    const Expr a(k[2]), b(k[1]), c0(k[0]);
    return simplify(pow(p - b, Expr(2)) / (Expr(4) * a) - c0);
  }
  const bool positive_domain = !box.empty() && box[0].first > 0.0;
  for (int deg : {3, 4}) {
    bool monomial = !k[static_cast<std::size_t>(deg)].is_zero() && !k[static_cast<std::size_t>(deg)].is_negative();
    for (int j = 0; j <= 4; ++j)
      if (j != deg && !k[static_cast<std::size_t>(j)].is_zero()) monomial = false;
    if (monomial && positive_domain) {
      const Expr cc(k[static_cast<std::size_t>(deg)]);
      const Expr kk(deg);
      const Expr expo(Number(Rational(deg, deg - 1)));
      return simplify(Expr(deg - 1) * cc * pow(p / (cc * kk), expo));
    }
  }
  return std::nullopt;
}

inline constexpr double kDegeneracyThreshold = 1e-12;

/// Samples `grid` points per axis over `box` and tabulates (p, H). Throws
/// DegeneracyError when the Hessian determinant vanishes identically or falls
/// below 1e-12 in magnitude at a sample.
inline LegendreTable legendre_transform(const Lagrangian& lag, const Box& box, int grid,
                                        const ZeroTestOptions& zt = {}) {
  lag.validate();
  const int m = lag.m();
  detail::check_box(box, m);
  if (grid < 2) throw ValidationError("E_GRID", "grid needs at least 2 samples per axis");

  LegendreTable t;
  t.m = m;
  t.hessian_det = hessian_determinant(lag);
  if (is_identically_zero(t.hessian_det, zt))
    throw DegeneracyError("Hessian determinant " + to_string(t.hessian_det) + " is identically zero");

  const Program Lp(lag.L, lag.vars);
  const Program detp(t.hessian_det, lag.vars);
  std::vector<Program> grad;
  for (const auto& v : lag.vars) grad.emplace_back(differentiate(lag.L, v), lag.vars);

  const int total = m == 1 ? grid : grid * grid;
  for (int idx = 0; idx < total; ++idx) {
    std::vector<double> v;
    if (m == 1) {
      v = {detail::grid_point(box[0], idx, grid)};
    } else {
      v = {detail::grid_point(box[0], idx / grid, grid), detail::grid_point(box[1], idx % grid, grid)};
    }
    const double d = detp(v);
    if (std::abs(d) < kDegeneracyThreshold) {
      std::string at;
      for (double x : v) at += (at.empty() ? "" : ", ") + format_double(x);
      throw DegeneracyError("Hessian determinant " + format_double(d) + " below threshold at v = (" + at + ")");
    }
    std::vector<double> p;
    double H = -Lp(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      p.push_back(grad[i](v));
      H += p.back() * v[i];
    }
    t.v.push_back(std::move(v));
    t.p.push_back(std::move(p));
    t.H.push_back(H);
    t.det.push_back(d);
  }
  t.closed_form = closed_form_hamiltonian(lag, box);
  return t;
}

namespace detail {

// Derivative at t of the quadratic through (x0,f0), (x1,f1), (x2,f2).
inline double quadratic_slope(double t, double x0, double x1, double x2, double f0, double f1, double f2) {
  return f0 * (2 * t - x1 - x2) / ((x0 - x1) * (x0 - x2)) + f1 * (2 * t - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
         f2 * (2 * t - x0 - x1) / ((x2 - x0) * (x2 - x1));
}

// Derivative of scattered samples (x strictly monotone) by three-point stencils.
inline std::vector<double> scattered_derivative(const std::vector<double>& x, const std::vector<double>& f) {
  const std::size_t n = x.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = std::clamp<std::size_t>(i, 1, n - 2);
    d[i] = quadratic_slope(x[i], x[c - 1], x[c], x[c + 1], f[c - 1], f[c], f[c + 1]);
  }
  return d;
}

// Piecewise-linear interpolation of (x, f), x ascending; linear extrapolation outside.
inline double interpolate(const std::vector<double>& x, const std::vector<double>& f, double t) {
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - x.begin());
  hi = std::clamp<std::size_t>(hi, 1, x.size() - 1);
  const std::size_t lo = hi - 1;
  const double w = (t - x[lo]) / (x[hi] - x[lo]);
  return f[lo] + w * (f[hi] - f[lo]);
}

}  // namespace detail

/// max_i |L(v_i) - L^(v_i)| where L^ is the transform of the tabulated H
/// taken back through the scattered (p, H) table. Supported for m = 1.
inline double involution_error(const Lagrangian& lag, const Box& box, int grid, const ZeroTestOptions& zt = {}) {
  if (lag.m() != 1) throw ValidationError("E_UNSUPPORTED", "involution check is implemented for m = 1");
  if (grid < 3) throw ValidationError("E_GRID", "involution check needs at least 3 samples");
  const auto rep = degeneracy_check(lag, box, 101, 1e-10, zt);
  if (rep.identically_degenerate) throw DegeneracyError("Hessian determinant is identically zero");
  if (!rep.zeros.empty())
    throw DegeneracyError("Hessian determinant vanishes at v = " + format_double(rep.zeros.front()[0]));
  const auto t = legendre_transform(lag, box, grid, zt);

  std::vector<double> p, H, v;
  for (std::size_t i = 0; i < t.H.size(); ++i) {
    p.push_back(t.p[i][0]);
    H.push_back(t.H[i]);
    v.push_back(t.v[i][0]);
  }
  // p is strictly monotone in v; orient ascending.
  if (p.front() > p.back()) {
    std::reverse(p.begin(), p.end());
    std::reverse(H.begin(), H.end());
    std::reverse(v.begin(), v.end());
  }
  const auto vhat = detail::scattered_derivative(p, H);
  std::vector<double> lhat(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) lhat[i] = p[i] * vhat[i] - H[i];

  const Program Lp(lag.L, lag.vars);
  double err = 0.0;
  for (double vi : v) {
    const std::vector<double> arg{vi};
    err = std::max(err, std::abs(Lp(arg) - detail::interpolate(vhat, lhat, vi)));
  }
  return err;
}

/// F = p1 + H(x, p2..pn): x1 is time-like. H may use x1..xn and p2..pn.
inline PdeProblem hamilton_jacobi_problem(const Expr& H, int n) {
  if (n < 2) throw ValidationError("E_DIMENSION", "Hamilton-Jacobi problem needs n >= 2");
  PdeProblem pr;
  for (int i = 1; i <= n; ++i) {
    pr.x.push_back("x" + std::to_string(i));
    pr.p.push_back("p" + std::to_string(i));
  }
  pr.u = "u";
  const std::set<std::string> allowed = [&] {
    std::set<std::string> s(pr.x.begin(), pr.x.end());
    s.insert(pr.p.begin() + 1, pr.p.end());
    return s;
  }();
  for (const auto& v : free_variables(H)) {
    if (v == pr.p[0] || v == pr.u)
      throw ValidationError("E_NAME_COLLISION", "H must not reference '" + v + "'");
    if (!allowed.count(v)) throw UnknownIdentifierError(v);
  }
  pr.F = simplify(var(pr.p[0]) + H);
  pr.validate();
  return pr;
}

}  // namespace skewforms
