#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "skewforms/legendre.hpp"

using namespace skewforms;

namespace {

Lagrangian lag1(std::string_view text) { return Lagrangian::from_text(text, 1); }
Lagrangian lag2(std::string_view text) { return Lagrangian::from_text(text, 2); }

double eval_p(const Expr& e, double p) { return evaluate(e, {{"p", p}}); }

}  // namespace

TEST(Transform, QuadraticIsSelfDual) {
  const auto t = legendre_transform(lag1("v^2/2"), {{-1, 1}}, 201);
  ASSERT_EQ(t.H.size(), 201u);
  for (std::size_t i = 0; i < t.H.size(); ++i) {
    EXPECT_DOUBLE_EQ(t.p[i][0], t.v[i][0]);
    EXPECT_NEAR(t.H[i], t.p[i][0] * t.p[i][0] / 2, 1e-15);
  }
  ASSERT_TRUE(t.closed_form.has_value());
  EXPECT_TRUE(is_identically_zero(*t.closed_form - parse("p^2/2", {"p"})));
}

TEST(Transform, QuarticOnPositiveDomain) {
  const auto t = legendre_transform(lag1("v^4/4"), {{0.1, 2}}, 191);
  ASSERT_TRUE(t.closed_form.has_value());
  EXPECT_NEAR(eval_p(*t.closed_form, 1.0), 0.75, 1e-14);
  for (std::size_t i = 0; i < t.H.size(); ++i) {
    const double p = t.p[i][0];
    EXPECT_NEAR(t.H[i], 0.75 * std::pow(p, 4.0 / 3.0), 1e-12 * std::max(1.0, t.H[i]));
  }
  EXPECT_EQ(to_string(*t.closed_form), "3/4*p^(4/3)");
}

TEST(Transform, QuarticOnSymmetricDomainHasNoClosedForm) {
  // Mixed quartic and quadratic terms fall outside the recognized shapes.
  const auto t = legendre_transform(lag1("v^4/4 + v^2/2"), {{-1, 1}}, 21);
  EXPECT_FALSE(t.closed_form.has_value());
}

TEST(Transform, GeneralQuadratic) {
  // L = 3v^2 + 2v - 1: p = 6v + 2, H = (p - 2)^2 / 12 + 1.
  const auto t = legendre_transform(lag1("3*v^2 + 2*v - 1"), {{-2, 2}}, 41);
  ASSERT_TRUE(t.closed_form.has_value());
  for (std::size_t i = 0; i < t.H.size(); ++i) {
    const double p = t.p[i][0];
    EXPECT_NEAR(t.H[i], (p - 2) * (p - 2) / 12 + 1, 1e-12);
    EXPECT_NEAR(eval_p(*t.closed_form, p), t.H[i], 1e-12);
  }
}

TEST(Transform, LinearIsDegenerate) {
  try {
    legendre_transform(lag1("v"), {{-1, 1}}, 11);
    FAIL();
  } catch (const DegeneracyError& e) {
    EXPECT_EQ(e.code(), "E_DEGENERATE");
  }
}

TEST(Transform, SampledZeroIsDegenerate) {
  EXPECT_THROW(legendre_transform(lag1("v^3/3"), {{-1, 1}}, 11), DegeneracyError);
  EXPECT_NO_THROW(legendre_transform(lag1("v^3/3"), {{0.5, 1}}, 11));
}

TEST(Transform, TwoVelocities) {
  const auto t = legendre_transform(lag2("(v1^2 + v2^2)/2 + v1*v2/4"), {{-1, 1}, {-1, 1}}, 5);
  ASSERT_EQ(t.H.size(), 25u);
  // Row-major: second axis fastest.
  EXPECT_DOUBLE_EQ(t.v[1][0], -1.0);
  EXPECT_DOUBLE_EQ(t.v[1][1], -0.5);
  for (std::size_t i = 0; i < t.H.size(); ++i) {
    const double v1 = t.v[i][0], v2 = t.v[i][1];
    EXPECT_NEAR(t.p[i][0], v1 + v2 / 4, 1e-14);
    EXPECT_NEAR(t.p[i][1], v2 + v1 / 4, 1e-14);
    EXPECT_NEAR(t.H[i], (v1 * v1 + v2 * v2) / 2 + v1 * v2 / 4, 1e-14);
    EXPECT_NEAR(t.det[i], 1 - 1.0 / 16, 1e-15);
  }
  EXPECT_FALSE(t.closed_form.has_value());
}

TEST(Transform, Validation) {
  EXPECT_THROW(Lagrangian::from_text("v + w", 1), UnknownIdentifierError);
  EXPECT_THROW(Lagrangian::from_text("v", 3), ValidationError);
  EXPECT_THROW(legendre_transform(lag1("v^2"), {{-1, 1}, {0, 1}}, 11), ValidationError);
  EXPECT_THROW(legendre_transform(lag1("v^2"), {{-1, 1}}, 1), ValidationError);
}

TEST(Degeneracy, Examples) {
  const auto q = degeneracy_check(lag1("v^2/2"), {{-1, 1}});
  EXPECT_EQ(to_string(q.determinant), "1");
  EXPECT_FALSE(q.identically_degenerate);
  EXPECT_TRUE(q.zeros.empty());

  const auto c = degeneracy_check(lag1("v^3/3"), {{-1, 1}});
  EXPECT_TRUE(is_identically_zero(c.determinant - parse("2*v", {"v"})));
  ASSERT_EQ(c.zeros.size(), 1u);
  EXPECT_NEAR(c.zeros[0][0], 0.0, 1e-10);

  const auto s = degeneracy_check(lag2("v1*v2"), {{-1, 1}, {-1, 1}});
  EXPECT_EQ(to_string(s.determinant), "-1");
  EXPECT_TRUE(s.zeros.empty());

  EXPECT_TRUE(degeneracy_check(lag1("v"), {{-1, 1}}).identically_degenerate);
}

TEST(Degeneracy, OffGridRootIsBisected) {
  // det = 6v - 2 vanishes at v = 1/3, between grid nodes.
  const auto r = degeneracy_check(lag1("v^3 - v^2"), {{-1, 1}});
  ASSERT_EQ(r.zeros.size(), 1u);
  EXPECT_NEAR(r.zeros[0][0], 1.0 / 3.0, 1e-10);
}

TEST(Degeneracy, TwoDimensionalZeroCurve) {
  // det = 2 v1 vanishes along the line v1 = 0.
  const auto r = degeneracy_check(lag2("v1^3/3 + v2^2/2"), {{-1, 1}, {-1, 1}});
  ASSERT_FALSE(r.zeros.empty());
  for (const auto& z : r.zeros) EXPECT_NEAR(z[0], 0.0, 1e-10);
}

TEST(Involution, Examples) {
  EXPECT_LT(involution_error(lag1("v^2/2"), {{-1, 1}}, 201), 1e-6);
  EXPECT_LT(involution_error(lag1("v^4/4 + v^2/2"), {{0.1, 1}}, 401), 1e-5);
  EXPECT_THROW(involution_error(lag1("v^3/3"), {{-1, 1}}, 201), DegeneracyError);
  EXPECT_THROW(involution_error(lag2("v1^2 + v2^2"), {{-1, 1}, {-1, 1}}, 11), ValidationError);
}

TEST(HamiltonJacobi, FreeParticle) {
  const auto pr = hamilton_jacobi_problem(parse("p2^2/2", {"p2"}), 2);
  const auto names = pr.names();
  EXPECT_TRUE(is_identically_zero(pr.F - parse("p1 + p2^2/2", names)));
  const auto sys = characteristic_system(pr);
  EXPECT_TRUE(is_identically_zero(sys.dx[1] - var("p2")));
  EXPECT_TRUE(sys.dp[1].is_zero() || is_identically_zero(sys.dp[1]));
}

TEST(HamiltonJacobi, AdvectionReduction) {
  const auto pr = hamilton_jacobi_problem(parse("2*p2", {"p2"}), 2);
  EXPECT_TRUE(is_identically_zero(pr.F - parse("p1 + 2*p2", pr.names())));
}

TEST(HamiltonJacobi, ThreeDimensions) {
  const auto pr = hamilton_jacobi_problem(parse("(p2^2 + p3^2)/2", {"p2", "p3"}), 3);
  const auto sys = characteristic_system(pr);
  EXPECT_TRUE(is_identically_zero(sys.dx[1] - var("p2")));
  EXPECT_TRUE(is_identically_zero(sys.dx[2] - var("p3")));
}

TEST(HamiltonJacobi, Errors) {
  EXPECT_THROW(hamilton_jacobi_problem(parse("p1^2", {"p1"}), 2), ValidationError);
  EXPECT_THROW(hamilton_jacobi_problem(parse("u", {"u"}), 2), ValidationError);
  EXPECT_THROW(hamilton_jacobi_problem(parse("q", {"q"}), 2), UnknownIdentifierError);
  EXPECT_THROW(hamilton_jacobi_problem(parse("p2", {"p2"}), 1), ValidationError);
}

// ---------------------------------------------------------------------------
// Properties

TEST(LegendreProperties, ScaledQuadratic) {
  gen::Engine rng(21);
  for (int t = 0; t < 50; ++t) {
    const int num = gen::uniform_int(rng, 1, 20), den = gen::uniform_int(rng, 1, 8);
    const double a = static_cast<double>(num) / den;
    const Lagrangian lag{Expr(num) / Expr(den) * pow(var("v"), Expr(2)), {"v"}};
    const double lo = gen::uniform(rng, -3, 0), hi = gen::uniform(rng, 0.1, 3);
    const auto table = legendre_transform(lag, {{lo, hi}}, 51);
    for (std::size_t i = 0; i < table.H.size(); ++i) {
      const double p = table.p[i][0];
      EXPECT_NEAR(table.H[i], p * p / (4 * a), 1e-10);
    }
  }
}

TEST(LegendreProperties, PolynomialZeroHessianIsSymbolic) {
  gen::Engine rng(22);
  for (int t = 0; t < 30; ++t) {
    // Affine L has a vanishing Hessian.
    const Expr L = Expr(gen::uniform_int(rng, -5, 5)) * var("v") + Expr(gen::uniform_int(rng, -5, 5));
    const auto r = degeneracy_check(Lagrangian{L, {"v"}}, {{-1, 1}}, 3);
    EXPECT_TRUE(r.identically_degenerate);
    EXPECT_TRUE(r.zeros.empty());
  }
  const auto mixed = degeneracy_check(lag2("v1 + 3*v2 - 7"), {{-1, 1}, {-1, 1}}, 3);
  EXPECT_TRUE(mixed.identically_degenerate);
}

TEST(LegendreProperties, HamiltonJacobiCharacteristicsAreHamiltonEquations) {
  gen::Engine rng(23);
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + t % 2;
    std::vector<std::string> names;
    for (int i = 2; i <= n; ++i) {
      names.push_back("x" + std::to_string(i));
      names.push_back("p" + std::to_string(i));
    }
    const Expr H = gen::polynomial(rng, names, 3, 4);
    const auto pr = hamilton_jacobi_problem(H, n);
    const auto sys = characteristic_system(pr);
    for (int i = 2; i <= n; ++i) {
      const auto k = static_cast<std::size_t>(i - 1);
      EXPECT_TRUE(is_identically_zero(sys.dx[k] - differentiate(H, "p" + std::to_string(i))));
      EXPECT_TRUE(is_identically_zero(sys.dp[k] + differentiate(H, "x" + std::to_string(i))));
    }
    EXPECT_TRUE(is_identically_zero(sys.dx[0] - Expr(1)));
  }
}
