#pragma once

// First-order PDE F(x, u, p) = 0, p_i = du/dx^i, and its characteristic strips.
//
// Closure of theta = p_i dx^i together with dF = 0 gives a homogeneous
// system in (dx, dp) whose determinant vanishes along
//
//   dx^i / F_{p_i} = -dp_i / (F_{x^i} + p_i F_u).
//
// The parameter s is fixed by dx^i/ds = F_{p_i}; consistency du = p_i dx^i
// then gives du/ds = sum_i p_i F_{p_i}. Strips are integrated with fixed-step
// RK4 and every sample carries |F| and the strip residual
// |du/ds - sum_i p_i dx^i/ds|.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "skewforms/rk4.hpp"
#include "skewforms/symbolic.hpp"

namespace skewforms {

struct PdeProblem {
  std::vector<std::string> x;
  std::string u = "u";
  std::vector<std::string> p;
  Expr F;

  [[nodiscard]] int dimension() const { return static_cast<int>(x.size()); }

  /// State ordering used throughout: x^1..x^n, u, p_1..p_n.
  [[nodiscard]] std::vector<std::string> names() const {
    std::vector<std::string> out = x;
    out.push_back(u);
    out.insert(out.end(), p.begin(), p.end());
    return out;
  }

  void validate() const {
    if (x.empty()) throw ValidationError("E_DIMENSION", "PDE needs n >= 1");
    if (p.size() != x.size()) throw ValidationError("E_DIMENSION", "need one momentum name per coordinate");
    const auto all = names();
    const std::set<std::string> unique(all.begin(), all.end());
    if (unique.size() != all.size()) throw ValidationError("E_NAME_COLLISION", "PDE variable names must be distinct");
    for (const auto& v : free_variables(F))
      if (!unique.count(v)) throw UnknownIdentifierError(v);
  }

  static PdeProblem from_text(std::vector<std::string> x, std::string u, std::vector<std::string> p,
                              std::string_view F) {
    PdeProblem out{std::move(x), std::move(u), std::move(p), Expr()};
    out.F = parse(F, out.names());
    out.validate();
    return out;
  }
};

/// Right-hand sides of the characteristic ODEs.
struct CharacteristicSystem {
  std::vector<Expr> dx;
  Expr du;
  std::vector<Expr> dp;
};

inline CharacteristicSystem characteristic_system(const PdeProblem& problem) {
  problem.validate();
  CharacteristicSystem sys;
  const Expr Fu = differentiate(problem.F, problem.u);
  std::vector<Expr> du_terms;
  for (std::size_t i = 0; i < problem.x.size(); ++i) {
    const Expr Fp = differentiate(problem.F, problem.p[i]);
    const Expr Fx = differentiate(problem.F, problem.x[i]);
    const Expr pi = var(problem.p[i]);
    sys.dx.push_back(Fp);
    sys.dp.push_back(simplify(-(Fx + pi * Fu)));
    du_terms.push_back(pi * Fp);
  }
  sys.du = simplify(Expr::add(std::move(du_terms)));
  return sys;
}

struct CharacteristicStrip {
  std::vector<double> x;
  double u = 0.0;
  std::vector<double> p;
};

struct TrajectorySample {
  double s = 0.0;
  std::vector<double> x;
  double u = 0.0;
  std::vector<double> p;
  double f_residual = 0.0;
  double strip_residual = 0.0;
};

struct Trajectory {
  double h = 0.0;
  std::vector<TrajectorySample> samples;
  std::optional<std::string> error;  // set when integration stopped early

  [[nodiscard]] bool complete() const { return !error.has_value(); }
};

class InadmissibleStripError : public ValidationError {
 public:
  InadmissibleStripError(double residual, double tolerance)
      : ValidationError("E_INADMISSIBLE_STRIP", "initial strip has |F| = " + format_double(residual) +
                                                    " exceeding tolerance " + format_double(tolerance)),
        residual_(residual) {}
  [[nodiscard]] double residual() const { return residual_; }

 private:
  double residual_;
};

struct IntegrationOptions {
  double strip_tolerance = 1e-10;
  bool require_admissible = true;
};

/// Compiled F and characteristic right-hand sides over the state
/// (x^1..x^n, u, p_1..p_n).
class CharacteristicField {
 public:
  CharacteristicField(const PdeProblem& problem, const CharacteristicSystem& system)
      : n_(problem.x.size()), slots_(problem.names()) {
    F_ = Program(problem.F, slots_);
    for (const auto& e : system.dx) dx_.emplace_back(e, slots_);
    du_ = Program(system.du, slots_);
    for (const auto& e : system.dp) dp_.emplace_back(e, slots_);
    if (dx_.size() != n_ || dp_.size() != n_)
      throw ValidationError("E_DIMENSION", "characteristic system size does not match the PDE");
  }
  explicit CharacteristicField(const PdeProblem& problem) : CharacteristicField(problem, characteristic_system(problem)) {}

  [[nodiscard]] std::size_t dimension() const { return n_; }
  [[nodiscard]] std::size_t state_size() const { return 2 * n_ + 1; }

  void rhs(const std::vector<double>& y, std::vector<double>& dydt) const {
    for (std::size_t i = 0; i < n_; ++i) dydt[i] = dx_[i](y);
    dydt[n_] = du_(y);
    for (std::size_t i = 0; i < n_; ++i) dydt[n_ + 1 + i] = dp_[i](y);
  }

  [[nodiscard]] double f_residual(const std::vector<double>& y) const { return std::abs(F_(y)); }

  [[nodiscard]] double strip_residual(const std::vector<double>& y) const {
    double sum = du_(y);
    for (std::size_t i = 0; i < n_; ++i) sum -= y[n_ + 1 + i] * dx_[i](y);
    return std::abs(sum);
  }

  [[nodiscard]] bool singular_direction(const std::vector<double>& y) const {
    return std::all_of(dx_.begin(), dx_.end(), [&](const Program& f) { return f(y) == 0.0; });
  }

  [[nodiscard]] std::vector<double> pack(const std::vector<double>& x, double u, const std::vector<double>& p) const {
    if (x.size() != n_ || p.size() != n_) throw ValidationError("E_DIMENSION", "strip dimension does not match the PDE");
    std::vector<double> y = x;
    y.push_back(u);
    y.insert(y.end(), p.begin(), p.end());
    return y;
  }

  [[nodiscard]] TrajectorySample sample(double s, const std::vector<double>& y) const {
    TrajectorySample out;
    out.s = s;
    out.x.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_));
    out.u = y[n_];
    out.p.assign(y.begin() + static_cast<std::ptrdiff_t>(n_) + 1, y.end());
    out.f_residual = f_residual(y);
    out.strip_residual = strip_residual(y);
    return out;
  }

 private:
  std::size_t n_;
  std::vector<std::string> slots_;
  Program F_;
  std::vector<Program> dx_;
  Program du_;
  std::vector<Program> dp_;
};

/// Recomputes the strip residual of a stored sample from `field`.
inline double strip_residual(const CharacteristicField& field, const TrajectorySample& s) {
  return field.strip_residual(field.pack(s.x, s.u, s.p));
}

/// Number of RK4 steps for [0, s_max] at step h; sample count is this plus one.
inline std::size_t step_count(double s_max, double h) {
  return static_cast<std::size_t>(std::floor(s_max / h + 1e-9));
}

inline Trajectory integrate_strip(const CharacteristicField& field, const CharacteristicStrip& strip0, double s_max,
                                  double h, const IntegrationOptions& opt = {}) {
  if (!(h > 0.0)) throw ValidationError("E_STEP", "step h must be positive");
  if (!(s_max >= h)) throw ValidationError("E_STEP", "s_max must be at least h");
  std::vector<double> y = field.pack(strip0.x, strip0.u, strip0.p);

  Trajectory traj;
  traj.h = h;
  const double f0 = field.f_residual(y);
  if (opt.require_admissible && !(f0 < opt.strip_tolerance)) throw InadmissibleStripError(f0, opt.strip_tolerance);

  const std::size_t steps = step_count(s_max, h);
  traj.samples.reserve(steps + 1);
  RungeKutta4 rk(y.size());
  auto system = [&](const std::vector<double>& state, std::vector<double>& dydt) { field.rhs(state, dydt); };
  for (std::size_t k = 0;; ++k) {
    const double s = static_cast<double>(k) * h;
    try {
      if (field.singular_direction(y)) {
        traj.error = "singular direction at s = " + format_double(s) + ": all dF/dp_i vanish";
        return traj;
      }
      traj.samples.push_back(field.sample(s, y));
      if (k == steps) break;
      rk.step(system, y, h);
    } catch (const DomainError& e) {
      traj.error = "domain error after s = " + format_double(s) + ": " + e.what();
      return traj;
    }
  }
  return traj;
}

inline Trajectory integrate_strip(const PdeProblem& problem, const CharacteristicStrip& strip0, double s_max, double h,
                                  const IntegrationOptions& opt = {}) {
  return integrate_strip(CharacteristicField(problem), strip0, s_max, h, opt);
}

/// max_s |F(x(s), u(s), p(s))|: F plays the dual form whose differential
/// vanishes on the realized structure.
inline double dual_residual(const Trajectory& traj) {
  if (traj.samples.empty()) throw ValidationError("E_EMPTY", "trajectory has no samples");
  double m = 0.0;
  for (const auto& s : traj.samples) m = std::max(m, s.f_residual);
  return m;
}

// ---------------------------------------------------------------------------
// Bundles: one-parameter families of strips.

struct Bundle {
  std::vector<double> labels;
  int transverse = 0;  // 0-based position component used for the Jacobian
  std::vector<CharacteristicStrip> strips;
};

/// J(s; k) = (x_t(s; k+1) - x_t(s; k-1)) / (label(k+1) - label(k-1)) for one interior k.
struct JacobianSeries {
  std::size_t index = 0;
  double label = 0.0;
  std::vector<double> s;
  std::vector<double> value;
};

struct BundleResult {
  std::vector<double> labels;
  int transverse = 0;
  std::vector<Trajectory> trajectories;
  std::vector<JacobianSeries> jacobians;  // interior indices 1..K-2, in order
};

inline BundleResult solve_bundle(const CharacteristicField& field, const Bundle& bundle, double s_max, double h,
                                 const IntegrationOptions& opt = {}) {
  const std::size_t K = bundle.strips.size();
  if (K < 3) throw ValidationError("E_BUNDLE", "bundle needs at least 3 strips");
  if (bundle.labels.size() != K) throw ValidationError("E_BUNDLE", "one label per strip required");
  if (bundle.transverse < 0 || bundle.transverse >= static_cast<int>(field.dimension()))
    throw ValidationError("E_BUNDLE", "transverse coordinate out of range");
  for (std::size_t k = 1; k < K; ++k)
    if (!(bundle.labels[k] > bundle.labels[k - 1]))
      throw ValidationError("E_BUNDLE", "labels must be strictly increasing");

  BundleResult out;
  out.labels = bundle.labels;
  out.transverse = bundle.transverse;
  // Trajectories are independent; integrated in input order.
  for (const auto& strip : bundle.strips) {
    try {
      out.trajectories.push_back(integrate_strip(field, strip, s_max, h, opt));
    } catch (const InadmissibleStripError& e) {
      Trajectory failed;
      failed.h = h;
      failed.error = e.what();
      out.trajectories.push_back(std::move(failed));
    }
  }

  const auto t = static_cast<std::size_t>(bundle.transverse);
  for (std::size_t k = 1; k + 1 < K; ++k) {
    const auto& lo = out.trajectories[k - 1].samples;
    const auto& hi = out.trajectories[k + 1].samples;
    JacobianSeries series;
    series.index = k;
    series.label = bundle.labels[k];
    const double dl = bundle.labels[k + 1] - bundle.labels[k - 1];
    const std::size_t m = std::min({lo.size(), hi.size(), out.trajectories[k].samples.size()});
    for (std::size_t j = 0; j < m; ++j) {
      series.s.push_back(lo[j].s);
      series.value.push_back((hi[j].x[t] - lo[j].x[t]) / dl);
    }
    out.jacobians.push_back(std::move(series));
  }
  return out;
}

inline BundleResult solve_bundle(const PdeProblem& problem, const Bundle& bundle, double s_max, double h,
                                 const IntegrationOptions& opt = {}) {
  return solve_bundle(CharacteristicField(problem), bundle, s_max, h, opt);
}

/// Completes an initial strip on a non-characteristic curve: solves F = 0 for
/// p[solve_for] by Newton iteration from the given guess.
inline CharacteristicStrip complete_strip(const PdeProblem& problem, CharacteristicStrip strip, int solve_for) {
  const auto names = problem.names();
  const Program F(problem.F, names);
  const Program dF(differentiate(problem.F, problem.p[static_cast<std::size_t>(solve_for)]), names);
  const std::size_t slot = problem.x.size() + 1 + static_cast<std::size_t>(solve_for);
  std::vector<double> y = strip.x;
  y.push_back(strip.u);
  y.insert(y.end(), strip.p.begin(), strip.p.end());
  for (int it = 0; it < 50; ++it) {
    const double f = F(y);
    if (std::abs(f) < 1e-15) break;
    const double d = dF(y);
    if (d == 0.0) throw ValidationError("E_CHARACTERISTIC_CURVE", "initial curve is characteristic (dF/dp = 0)");
    y[slot] -= f / d;
  }
  strip.p[static_cast<std::size_t>(solve_for)] = y[slot];
  return strip;
}

/// Bundle from an initial profile u = u0(sigma) on the line x^time = 0,
/// x^transverse = sigma (other coordinates 0). p_transverse = u0'(sigma);
/// p_time is solved from F = 0; remaining momenta start at 0.
inline Bundle profile_bundle(const PdeProblem& problem, const Expr& u0, const std::string& sigma,
                             const std::vector<double>& labels, int time_index, int transverse) {
  const std::vector<std::string> sv{sigma};
  const Program u0p(u0, sv);
  const Program du0p(differentiate(u0, sigma), sv);
  Bundle b;
  b.labels = labels;
  b.transverse = transverse;
  const std::size_t n = problem.x.size();
  for (double l : labels) {
    CharacteristicStrip s;
    s.x.assign(n, 0.0);
    s.p.assign(n, 0.0);
    s.x[static_cast<std::size_t>(transverse)] = l;
    const std::vector<double> arg{l};
    s.u = u0p(arg);
    s.p[static_cast<std::size_t>(transverse)] = du0p(arg);
    b.strips.push_back(complete_strip(problem, s, time_index));
  }
  return b;
}

}  // namespace skewforms
