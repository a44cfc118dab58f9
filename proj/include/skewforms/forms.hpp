#pragma once

// Skew-symmetric differential forms over an n-variable space with symbolic
// coefficients.
//
// A p-form is stored as a map from strictly increasing index tuples
// (0-based) to coefficient expressions; a missing tuple is a zero
// coefficient. Terms added in arbitrary index order are normalized with the
// permutation sign, and tuples with a repeated index vanish
// (dx^i ^ dx^i = 0, dx^i ^ dx^j = -dx^j ^ dx^i).

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "skewforms/symbolic.hpp"

namespace skewforms {

using IndexTuple = std::vector<int>;

/// Sorts `idx` in place. Returns the permutation sign, or 0 when an index repeats.
inline int normalize_indices(IndexTuple& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i - 1] == idx[i]) return 0;
  return sign;
}

class ExteriorForm {
 public:
  ExteriorForm(std::vector<std::string> vars, int degree) : vars_(std::move(vars)), degree_(degree) {
    if (vars_.empty()) throw ValidationError("E_DIMENSION", "form needs at least one variable");
    // degree n+1 is admitted only as the (necessarily empty) differential of an n-form
    if (degree_ < 0 || degree_ > dimension() + 1)
      throw ValidationError("E_DEGREE", "degree " + std::to_string(degree_) + " outside 0.." +
                                            std::to_string(dimension()));
  }

  /// The 0-form f.
  static ExteriorForm function(std::vector<std::string> vars, Expr f) {
    ExteriorForm out(std::move(vars), 0);
    out.add_term({}, std::move(f));
    return out;
  }

  /// coeff * dx^{i1} ^ ... ^ dx^{ip}, indices 0-based in any order.
  static ExteriorForm monomial(std::vector<std::string> vars, IndexTuple idx, Expr coeff = Expr(1)) {
    ExteriorForm out(std::move(vars), static_cast<int>(idx.size()));
    out.add_term(std::move(idx), std::move(coeff));
    return out;
  }

  [[nodiscard]] int dimension() const { return static_cast<int>(vars_.size()); }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] const std::vector<std::string>& vars() const { return vars_; }
  [[nodiscard]] const std::map<IndexTuple, Expr>& terms() const { return terms_; }
  [[nodiscard]] bool empty() const { return terms_.empty(); }

  [[nodiscard]] Expr coefficient(IndexTuple idx) const {
    const int s = normalize_indices(idx);
    if (s == 0) return Expr();
    auto it = terms_.find(idx);
    if (it == terms_.end()) return Expr();
    return s > 0 ? it->second : simplify(-it->second);
  }

  /// Accumulates coeff * dx^idx. The result is not simplified until `canonical()`.
  void add_term(IndexTuple idx, Expr coeff) {
    if (static_cast<int>(idx.size()) != degree_)
      throw ValidationError("E_DEGREE", "index tuple length does not match form degree");
    for (int i : idx)
      if (i < 0 || i >= dimension()) throw ValidationError("E_INDEX", "index out of range: " + std::to_string(i + 1));
    const int s = normalize_indices(idx);
    if (s == 0) return;
    Expr c = s > 0 ? std::move(coeff) : -std::move(coeff);
    auto [it, inserted] = terms_.try_emplace(std::move(idx), c);
    if (!inserted) it->second = it->second + c;
  }

  /// Coefficients simplified; terms whose coefficient simplifies to 0 removed.
  [[nodiscard]] ExteriorForm canonical() const {
    ExteriorForm out(vars_, degree_);
    for (const auto& [idx, c] : terms_) {
      Expr s = simplify(c);
      if (!s.is_zero()) out.terms_.emplace(idx, std::move(s));
    }
    return out;
  }

  [[nodiscard]] ExteriorForm scaled(const Expr& f) const {
    ExteriorForm out(vars_, degree_);
    for (const auto& [idx, c] : terms_) out.terms_.emplace(idx, f * c);
    return out.canonical();
  }

  friend ExteriorForm operator+(const ExteriorForm& a, const ExteriorForm& b) {
    a.require_compatible(b);
    if (a.degree_ != b.degree_) throw ValidationError("E_DEGREE", "sum of forms of different degree");
    ExteriorForm out = a;
    for (const auto& [idx, c] : b.terms_) out.add_term(idx, c);
    return out.canonical();
  }
  friend ExteriorForm operator-(const ExteriorForm& a, const ExteriorForm& b) { return a + b.scaled(Expr(-1)); }

  void require_compatible(const ExteriorForm& o) const {
    if (vars_ != o.vars_) throw ValidationError("E_DIMENSION", "forms are over different variable lists");
  }

 private:
  std::vector<std::string> vars_;
  int degree_;
  std::map<IndexTuple, Expr> terms_;
};

/// Structure coefficients of a possibly non-closed frame:
/// d(dx^k) = sum_{i<j} c^k_{ij} dx^i ^ dx^j. All zero models an integrable basis.
class FrameSpec {
 public:
  explicit FrameSpec(int n) : n_(n) {
    if (n <= 0) throw ValidationError("E_DIMENSION", "frame dimension must be positive");
  }

  /// 0-based k, i, j with i < j.
  void set(int k, int i, int j, Expr coeff) {
    if (k < 0 || k >= n_ || i < 0 || j >= n_ || i >= j)
      throw ValidationError("E_INDEX", "frame coefficient needs 1 <= k <= n and 1 <= i < j <= n");
    c_[{k, i, j}] = simplify(coeff);
  }

  [[nodiscard]] int dimension() const { return n_; }
  [[nodiscard]] bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const auto& kv) { return kv.second.is_zero(); });
  }
  [[nodiscard]] const std::map<std::tuple<int, int, int>, Expr>& coefficients() const { return c_; }

  /// d(dx^k) as (i, j, c) triples.
  [[nodiscard]] std::vector<std::tuple<int, int, Expr>> basis_differential(int k) const {
    std::vector<std::tuple<int, int, Expr>> out;
    for (auto it = c_.lower_bound({k, -1, -1}); it != c_.end() && std::get<0>(it->first) == k; ++it) {
      if (!it->second.is_zero()) out.emplace_back(std::get<1>(it->first), std::get<2>(it->first), it->second);
    }
    return out;
  }

 private:
  int n_;
  std::map<std::tuple<int, int, int>, Expr> c_;
};

/// Closed polygon in R^n (last vertex joins the first), sampled for line integrals.
struct Loop {
  std::vector<std::vector<double>> vertices;
  int samples_per_edge = 16;

  void validate(int n) const {
    if (vertices.size() < 3) throw ValidationError("E_LOOP", "loop needs at least 3 vertices");
    if (samples_per_edge <= 0) throw ValidationError("E_LOOP", "samples_per_edge must be positive");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (static_cast<int>(vertices[i].size()) != n)
        throw ValidationError("E_DIMENSION", "loop vertex " + std::to_string(i) + " has wrong dimension");
      if (vertices[i] == vertices[(i + 1) % vertices.size()])
        throw ValidationError("E_LOOP", "consecutive loop vertices coincide at " + std::to_string(i));
    }
  }
};

inline ExteriorForm wedge(const ExteriorForm& a, const ExteriorForm& b) {
  a.require_compatible(b);
  const int p = a.degree() + b.degree();
  if (p > a.dimension())
    throw ValidationError("E_DIMENSION", "wedge degree " + std::to_string(p) + " exceeds dimension " +
                                             std::to_string(a.dimension()));
  ExteriorForm out(a.vars(), p);
  for (const auto& [ia, ca] : a.terms()) {
    for (const auto& [ib, cb] : b.terms()) {
      IndexTuple idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      out.add_term(std::move(idx), ca * cb);
    }
  }
  return out.canonical();
}

/// d(theta) = sum da_I ^ dx^I + sum a_I d(dx^I), the second sum expanded with
/// the graded product rule over the frame's structure coefficients.
inline ExteriorForm exterior_derivative(const ExteriorForm& theta, const FrameSpec& frame) {
  if (theta.dimension() != frame.dimension())
    throw ValidationError("E_DIMENSION", "form and frame dimensions differ");
  ExteriorForm out(theta.vars(), theta.degree() + 1);
  if (theta.degree() >= theta.dimension()) return out;
  const int n = theta.dimension();
  for (const auto& [idx, a] : theta.terms()) {
    for (int m = 0; m < n; ++m) {
      Expr da = differentiate(a, theta.vars()[m]);
      if (da.is_zero()) continue;
      IndexTuple t{m};
      t.insert(t.end(), idx.begin(), idx.end());
      out.add_term(std::move(t), std::move(da));
    }
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const Expr sign(r % 2 == 0 ? 1 : -1);
      for (const auto& [i, j, c] : frame.basis_differential(idx[r])) {
        IndexTuple t(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(r));
        t.push_back(i);
        t.push_back(j);
        t.insert(t.end(), idx.begin() + static_cast<std::ptrdiff_t>(r) + 1, idx.end());
        out.add_term(std::move(t), sign * a * c);
      }
    }
  }
  return out.canonical();
}

inline ExteriorForm exterior_derivative(const ExteriorForm& theta) {
  return exterior_derivative(theta, FrameSpec(theta.dimension()));
}

struct ClosureResult {
  bool closed = false;
  ExteriorForm residual;  // d(theta), always populated
};

inline ClosureResult is_closed(const ExteriorForm& theta, const FrameSpec& frame, const ZeroTestOptions& opt = {}) {
  ClosureResult r{true, exterior_derivative(theta, frame)};
  for (const auto& [idx, c] : r.residual.terms()) {
    try {
      if (!is_identically_zero(c, opt)) r.closed = false;
    } catch (const InconclusiveError& e) {
      std::string where;
      for (int i : idx) where += (where.empty() ? "" : ",") + std::to_string(i + 1);
      throw InconclusiveError("coefficient [" + where + "]: " + e.what());
    }
  }
  return r;
}

inline ClosureResult is_closed(const ExteriorForm& theta, const ZeroTestOptions& opt = {}) {
  return is_closed(theta, FrameSpec(theta.dimension()), opt);
}

/// K[i][j] = d a_j / d x^i - d a_i / d x^j for a 1-form over an integrable basis.
inline std::vector<std::vector<Expr>> commutator_coefficients(const ExteriorForm& theta) {
  if (theta.degree() != 1) throw ValidationError("E_DEGREE", "commutator needs a 1-form");
  const int n = theta.dimension();
  std::vector<Expr> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = theta.coefficient({i});
  std::vector<std::vector<Expr>> k(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      Expr kij = simplify(differentiate(a[uj], theta.vars()[ui]) - differentiate(a[ui], theta.vars()[uj]));
      k[uj][ui] = simplify(-kij);
      k[ui][uj] = std::move(kij);
    }
  }
  return k;
}

/// Composite-midpoint line integral of sum a_i dx^i around the closed polygon.
inline double loop_integral(const ExteriorForm& theta, const Loop& loop) {
  if (theta.degree() != 1) throw ValidationError("E_DEGREE", "loop integral needs a 1-form");
  const int n = theta.dimension();
  loop.validate(n);
  std::vector<Program> coeff;
  for (int i = 0; i < n; ++i) coeff.emplace_back(theta.coefficient({i}), theta.vars());

  const auto m = static_cast<std::size_t>(loop.samples_per_edge);
  const std::size_t nv = loop.vertices.size();
  std::vector<double> point(static_cast<std::size_t>(n));
  double total = 0.0;
  for (std::size_t e = 0; e < nv; ++e) {
    const auto& a = loop.vertices[e];
    const auto& b = loop.vertices[(e + 1) % nv];
    double edge = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      const double t = (static_cast<double>(s) + 0.5) / static_cast<double>(m);
      for (std::size_t i = 0; i < point.size(); ++i) point[i] = a[i] + t * (b[i] - a[i]);
      for (std::size_t i = 0; i < point.size(); ++i) edge += coeff[i](point) * (b[i] - a[i]);
    }
    total += edge / static_cast<double>(m);
  }
  return total;
}

}  // namespace skewforms
