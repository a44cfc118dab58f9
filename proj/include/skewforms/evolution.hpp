#pragma once

// Evolutionary relations d(psi) = A_1 dxi^1 + A_2 dxi^2 in two variables
// (xi^1 time-like, xi^2 space-like). The relation is identical exactly when
// omega is closed, i.e. when the commutator
//
//   K_12 = dA_2/dxi^1 - dA_1/dxi^2
//
// vanishes. Also: sign-change events of bundle Jacobians and the check that
// du = omega holds along a realized characteristic.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skewforms/characteristics.hpp"
#include "skewforms/forms.hpp"
#include "skewforms/symbolic.hpp"

namespace skewforms {

/// Uniform two-dimensional grid; node (i1, i2) sits at origin + (i1 h1, i2 h2)
/// and has flat index i1 * n2 + i2.
struct GridSpec {
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> spacing{1.0, 1.0};
  std::array<std::size_t, 2> shape{0, 0};

  [[nodiscard]] std::size_t size() const { return shape[0] * shape[1]; }
  [[nodiscard]] double coordinate(int axis, std::size_t i) const {
    const auto a = static_cast<std::size_t>(axis);
    return origin[a] + static_cast<double>(i) * spacing[a];
  }
  [[nodiscard]] std::size_t flat(std::size_t i1, std::size_t i2) const { return i1 * shape[1] + i2; }
  [[nodiscard]] bool interior(std::size_t i1, std::size_t i2) const {
    return i1 > 0 && i2 > 0 && i1 + 1 < shape[0] && i2 + 1 < shape[1];
  }

  void validate() const {
    if (!(spacing[0] > 0.0) || !(spacing[1] > 0.0)) throw ValidationError("E_SHAPE", "grid spacings must be positive");
    if (shape[0] < 3 || shape[1] < 3) throw ValidationError("E_SHAPE", "grid needs at least 3 nodes per axis");
  }

  /// n x n nodes covering [lo, hi]^2.
  static GridSpec square(double lo, double hi, std::size_t n) {
    const double h = (hi - lo) / static_cast<double>(n - 1);
    return GridSpec{{lo, lo}, {h, h}, {n, n}};
  }
};

struct GridField {
  GridSpec grid;
  std::map<std::string, std::vector<double>> components;

  [[nodiscard]] const std::vector<double>& component(const std::string& name) const {
    auto it = components.find(name);
    if (it == components.end()) throw ValidationError("E_SHAPE", "grid field has no component '" + name + "'");
    return it->second;
  }

  void validate() const {
    grid.validate();
    for (const auto& [name, values] : components)
      if (values.size() != grid.size())
        throw ValidationError("E_SHAPE", "component '" + name + "' has " + std::to_string(values.size()) +
                                             " values, grid has " + std::to_string(grid.size()));
  }
};

/// Samples expressions over `vars` = (xi1, xi2) at every node of `grid`.
inline GridField sample_grid(const GridSpec& grid, const std::map<std::string, Expr>& exprs,
                             const std::vector<std::string>& vars = {"xi1", "xi2"}) {
  GridField out{grid, {}};
  for (const auto& [name, e] : exprs) {
    const Program f(e, vars);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.shape[0]; ++i)
      for (std::size_t j = 0; j < grid.shape[1]; ++j) {
        const std::array<double, 2> pt{grid.coordinate(0, i), grid.coordinate(1, j)};
        values[grid.flat(i, j)] = f(pt);
      }
    out.components.emplace(name, std::move(values));
  }
  return out;
}

namespace detail {

// Second-order derivative along `axis`: central inside, one-sided at edges.
inline std::vector<double> grid_derivative(const GridSpec& g, const std::vector<double>& f, int axis) {
  std::vector<double> d(f.size());
  const std::size_t n = g.shape[static_cast<std::size_t>(axis)];
  const double h = g.spacing[static_cast<std::size_t>(axis)];
  for (std::size_t i = 0; i < g.shape[0]; ++i)
    for (std::size_t j = 0; j < g.shape[1]; ++j) {
      auto at = [&](std::size_t k) { return axis == 0 ? f[g.flat(k, j)] : f[g.flat(i, k)]; };
      const std::size_t k = axis == 0 ? i : j;
      double v;
      if (k == 0) {
        v = (-3 * at(0) + 4 * at(1) - at(2)) / (2 * h);
      } else if (k + 1 == n) {
        v = (3 * at(n - 1) - 4 * at(n - 2) + at(n - 3)) / (2 * h);
      } else {
        v = (at(k + 1) - at(k - 1)) / (2 * h);
      }
      d[g.flat(i, j)] = v;
    }
  return d;
}

}  // namespace detail

inline constexpr double kIdentityTolerance = 1e-8;

struct EvolutionaryRelation {
  enum class Kind { Symbolic, Grid };
  Kind kind = Kind::Symbolic;
  std::vector<std::string> vars{"xi1", "xi2"};

  // Symbolic data.
  Expr A1, A2, K;
  GridSpec evaluation{{-1.0, -1.0}, {0.1, 0.1}, {21, 21}};  // where max|K| is measured

  // Grid data: K sampled at every node; verdicts use interior nodes.
  GridSpec grid;
  std::vector<double> K_grid;
  std::optional<std::vector<double>> psi;

  double identity_tolerance = kIdentityTolerance;
};

inline EvolutionaryRelation build_relation(const Expr& A1, const Expr& A2,
                                           const std::vector<std::string>& vars = {"xi1", "xi2"}) {
  if (vars.size() != 2) throw ValidationError("E_SHAPE", "evolutionary relations use two variables");
  for (const Expr* a : {&A1, &A2})
    for (const auto& v : free_variables(*a))
      if (v != vars[0] && v != vars[1]) throw ValidationError("E_SHAPE", "coefficient uses '" + v + "' outside the relation variables");
  EvolutionaryRelation rel;
  rel.kind = EvolutionaryRelation::Kind::Symbolic;
  rel.vars = vars;
  rel.A1 = simplify(A1);
  rel.A2 = simplify(A2);
  rel.K = simplify(differentiate(rel.A2, vars[0]) - differentiate(rel.A1, vars[1]));
  return rel;
}

inline EvolutionaryRelation build_relation(const GridField& field, const std::string& a1 = "A1",
                                           const std::string& a2 = "A2", const std::string& psi = "psi") {
  field.validate();
  const auto& A1 = field.component(a1);
  const auto& A2 = field.component(a2);
  EvolutionaryRelation rel;
  rel.kind = EvolutionaryRelation::Kind::Grid;
  rel.grid = field.grid;
  const auto d2 = detail::grid_derivative(field.grid, A2, 0);
  const auto d1 = detail::grid_derivative(field.grid, A1, 1);
  rel.K_grid.resize(d1.size());
  for (std::size_t i = 0; i < d1.size(); ++i) rel.K_grid[i] = d2[i] - d1[i];
  if (auto it = field.components.find(psi); it != field.components.end()) rel.psi = it->second;
  return rel;
}

/// Relation from a 1-form over two variables.
inline EvolutionaryRelation build_relation(const ExteriorForm& omega) {
  if (omega.degree() != 1)
    throw ValidationError("E_UNSUPPORTED_DEGREE", "unsupported degree " + std::to_string(omega.degree()) +
                                                      ": evolutionary relations take 1-forms");
  if (omega.dimension() != 2) throw ValidationError("E_SHAPE", "evolutionary relations use two variables");
  return build_relation(omega.coefficient({0}), omega.coefficient({1}), omega.vars());
}

struct NonidentityReport {
  bool identical = true;
  double max_abs = 0.0;
  std::array<double, 2> location{0.0, 0.0};
  std::size_t flat_index = 0;
  std::size_t skipped_nodes = 0;  // symbolic K not evaluable there
};

inline NonidentityReport nonidentity_report(const EvolutionaryRelation& rel, const ZeroTestOptions& zt = {}) {
  NonidentityReport rep;
  auto consider = [&](double v, std::size_t flat, const GridSpec& g) {
    if (std::abs(v) > rep.max_abs || (rep.max_abs == 0.0 && flat < rep.flat_index)) {
      rep.max_abs = std::abs(v);
      rep.flat_index = flat;
      rep.location = {g.coordinate(0, flat / g.shape[1]), g.coordinate(1, flat % g.shape[1])};
    }
  };
  if (rel.kind == EvolutionaryRelation::Kind::Symbolic) {
    const GridSpec& g = rel.evaluation;
    rep.flat_index = g.size();
    const Program k(rel.K, rel.vars);
    for (std::size_t i = 0; i < g.shape[0]; ++i)
      for (std::size_t j = 0; j < g.shape[1]; ++j) {
        const std::array<double, 2> pt{g.coordinate(0, i), g.coordinate(1, j)};
        try {
          consider(k(pt), g.flat(i, j), g);
        } catch (const DomainError&) {
          ++rep.skipped_nodes;
        }
      }
    if (rep.flat_index == g.size()) rep.flat_index = 0;
    rep.identical = is_identically_zero(rel.K, zt);
    return rep;
  }
  const GridSpec& g = rel.grid;
  rep.flat_index = g.size();
  for (std::size_t i = 1; i + 1 < g.shape[0]; ++i)
    for (std::size_t j = 1; j + 1 < g.shape[1]; ++j) consider(rel.K_grid[g.flat(i, j)], g.flat(i, j), g);
  if (rep.flat_index == g.size()) rep.flat_index = 0;
  rep.identical = rep.max_abs < rel.identity_tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// Structure events.

struct StructureEvent {
  double s_star = 0.0;
  std::size_t index = 0;     // trajectory index in the bundle
  double label = 0.0;
  double location = 0.0;     // transverse coordinate at s*
  std::string functional = "jacobian";
  int pre_sign = 0;
  int post_sign = 0;
  double conserved_u = 0.0;  // u carried into the event
  double bracket = 0.0;      // width of the final bisection interval
};

inline constexpr double kEventWidth = 1e-6;

namespace detail {

// Piecewise-linear interpolant of (s, f), s ascending; extrapolates linearly.
inline double linear_at(const std::vector<double>& s, const std::vector<double>& f, double t) {
  if (s.size() == 1) return f.front();
  std::size_t hi = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), t) - s.begin());
  hi = std::clamp<std::size_t>(hi, 1, s.size() - 1);
  const std::size_t lo = hi - 1;
  return f[lo] + (t - s[lo]) / (s[hi] - s[lo]) * (f[hi] - f[lo]);
}

inline int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace detail

/// First sign change of each interior Jacobian series, refined by bisection
/// on its piecewise-linear interpolant to width `width`. Only events with
/// J(s* - w) J(s* + w) < 0 (w the stored bracket) are emitted.
inline std::vector<StructureEvent> jacobian_scan(const BundleResult& bundle, double width = kEventWidth) {
  std::vector<StructureEvent> events;
  const auto t = static_cast<std::size_t>(bundle.transverse);
  for (const auto& series : bundle.jacobians) {
    const auto& s = series.s;
    const auto& J = series.value;
    if (s.size() < 2) continue;
    std::optional<std::size_t> last_nonzero;
    std::optional<std::pair<std::size_t, std::size_t>> seg;
    for (std::size_t i = 0; i < J.size() && !seg; ++i) {
      if (J[i] == 0.0) continue;
      if (last_nonzero && detail::sign_of(J[*last_nonzero]) != detail::sign_of(J[i])) seg = {{*last_nonzero, i}};
      last_nonzero = i;
    }
    if (!seg) continue;
    double lo = s[seg->first], hi = s[seg->second];
    double flo = J[seg->first];
    while (hi - lo > width) {
      const double mid = 0.5 * (lo + hi);
      const double fm = detail::linear_at(s, J, mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if (detail::sign_of(fm) == detail::sign_of(flo)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    StructureEvent ev;
    ev.s_star = 0.5 * (lo + hi);
    ev.bracket = std::max(hi - lo, width / 2);
    ev.pre_sign = detail::sign_of(detail::linear_at(s, J, ev.s_star - ev.bracket));
    ev.post_sign = detail::sign_of(detail::linear_at(s, J, ev.s_star + ev.bracket));
    if (ev.pre_sign * ev.post_sign >= 0) continue;
    ev.index = series.index;
    ev.label = series.label;
    const auto& samples = bundle.trajectories[series.index].samples;
    std::vector<double> ts, us, xs;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      ts.push_back(samples[i].s);
      us.push_back(samples[i].u);
      xs.push_back(samples[i].x[t]);
    }
    // The step across s* may pass through a blow-up of p, so samples after
    // the event are not a valid continuation: carry u from the last sample
    // at or before s*.
    const auto before = std::upper_bound(ts.begin(), ts.end(), ev.s_star) - ts.begin();
    ev.conserved_u = us[static_cast<std::size_t>(std::max<std::ptrdiff_t>(before - 1, 0))];
    ev.location = detail::linear_at(ts, xs, ev.s_star);
    events.push_back(ev);
  }
  std::stable_sort(events.begin(), events.end(), [](const StructureEvent& a, const StructureEvent& b) {
    if (a.s_star != b.s_star) return a.s_star < b.s_star;
    return a.index < b.index;
  });
  return events;
}

// ---------------------------------------------------------------------------
// du = omega along a realized structure.

struct StructureIdentity {
  double delta_psi = 0.0;
  double integral = 0.0;
  double residual = 0.0;
};

/// Trapezoid line integral of A1 dxi^1 + A2 dxi^2 along a trajectory of a
/// two-variable PDE, compared with the change of psi. A1, A2 may use the
/// problem's names (x, u, p) and `xi`, which is bound to (x^1, x^2). Without
/// explicit psi endpoints the carried u is used.
inline StructureIdentity identity_on_structure(const Trajectory& traj, const PdeProblem& problem, const Expr& A1,
                                               const Expr& A2,
                                               std::optional<std::pair<double, double>> psi_endpoints = {},
                                               const std::vector<std::string>& xi = {"xi1", "xi2"}) {
  if (problem.dimension() != 2) throw ValidationError("E_SHAPE", "identity on structure needs a two-variable PDE");
  if (traj.samples.size() < 2) throw ValidationError("E_EMPTY", "trajectory needs at least two samples");
  std::vector<std::string> slots = problem.names();
  slots.insert(slots.end(), xi.begin(), xi.end());
  const Program a1(A1, slots), a2(A2, slots);

  auto state = [&](const TrajectorySample& s) {
    std::vector<double> y = s.x;
    y.push_back(s.u);
    y.insert(y.end(), s.p.begin(), s.p.end());
    y.push_back(s.x[0]);
    y.push_back(s.x[1]);
    return y;
  };
  StructureIdentity out;
  auto prev = state(traj.samples.front());
  double prev1 = a1(prev), prev2 = a2(prev);
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const auto cur = state(traj.samples[k]);
    const double c1 = a1(cur), c2 = a2(cur);
    out.integral += 0.5 * (prev1 + c1) * (cur[0] - prev[0]) + 0.5 * (prev2 + c2) * (cur[1] - prev[1]);
    prev = cur;
    prev1 = c1;
    prev2 = c2;
  }
  out.delta_psi = psi_endpoints ? psi_endpoints->second - psi_endpoints->first
                                : traj.samples.back().u - traj.samples.front().u;
  out.residual = std::abs(out.delta_psi - out.integral);
  return out;
}

}  // namespace skewforms
