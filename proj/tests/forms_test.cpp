#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "skewforms/forms.hpp"

using namespace skewforms;

namespace {

const std::vector<std::string> kX2{"x1", "x2"};
const std::vector<std::string> kX3{"x1", "x2", "x3"};

ExteriorForm one_form(const std::vector<std::string>& vars, const std::vector<std::string>& coeffs) {
  ExteriorForm f(vars, 1);
  for (std::size_t i = 0; i < coeffs.size(); ++i) f.add_term({static_cast<int>(i)}, parse(coeffs[i], vars));
  return f;
}

ExteriorForm angular() { return one_form(kX2, {"-x2/(x1^2 + x2^2)", "x1/(x1^2 + x2^2)"}); }

// Every coefficient of a - b passes the zero test.
::testing::AssertionResult forms_equal(const ExteriorForm& a, const ExteriorForm& b) {
  const auto diff = (a - b).canonical();
  for (const auto& [idx, c] : diff.terms())
    if (!is_identically_zero(c)) return ::testing::AssertionFailure() << "coefficient differs: " << to_string(c);
  return ::testing::AssertionSuccess();
}

Loop regular_polygon(int sides, double radius, double cx = 0, double cy = 0, int samples = 16) {
  Loop l;
  l.samples_per_edge = samples;
  for (int k = 0; k < sides; ++k) {
    const double a = 2 * std::numbers::pi * k / sides;
    l.vertices.push_back({cx + radius * std::cos(a), cy + radius * std::sin(a)});
  }
  return l;
}

Loop square(double cx, double cy, double side, int samples) {
  const double h = side / 2;
  return Loop{{{cx - h, cy - h}, {cx + h, cy - h}, {cx + h, cy + h}, {cx - h, cy + h}}, samples};
}

}  // namespace

TEST(Indices, NormalizationTracksParity) {
  IndexTuple a{2, 0, 1};
  EXPECT_EQ(normalize_indices(a), 1);
  EXPECT_EQ(a, (IndexTuple{0, 1, 2}));
  IndexTuple b{1, 0};
  EXPECT_EQ(normalize_indices(b), -1);
  IndexTuple c{1, 1};
  EXPECT_EQ(normalize_indices(c), 0);
}

TEST(Form, AddTermNormalizesAndCancels) {
  ExteriorForm f(kX2, 2);
  f.add_term({1, 0}, Expr(3));
  EXPECT_EQ(to_string(f.coefficient({0, 1})), "-3");
  f.add_term({0, 1}, Expr(3));
  EXPECT_TRUE(f.canonical().empty());
  f.add_term({0, 0}, Expr(5));
  EXPECT_TRUE(f.canonical().empty());
}

TEST(Form, RejectsBadDegreeAndMismatch) {
  EXPECT_THROW(ExteriorForm(kX2, -1), ValidationError);
  EXPECT_THROW(ExteriorForm(std::vector<std::string>{}, 0), ValidationError);
  const auto a = ExteriorForm::monomial(kX2, {0});
  const auto b = ExteriorForm::monomial(kX3, {0});
  EXPECT_THROW(wedge(a, b), ValidationError);
  EXPECT_THROW(a + b, ValidationError);
}

TEST(Wedge, WorkedExamples) {
  const auto dx1 = ExteriorForm::monomial(kX2, {0});
  const auto dx2 = ExteriorForm::monomial(kX2, {1});
  EXPECT_TRUE(wedge(dx1, dx1).empty());
  EXPECT_TRUE(forms_equal(wedge(dx1, dx2), wedge(dx2, dx1).scaled(Expr(-1))));
  const auto a = ExteriorForm::monomial(kX2, {0}, var("x2"));
  const auto b = ExteriorForm::monomial(kX2, {1}, var("x1"));
  EXPECT_EQ(to_string(wedge(a, b).coefficient({0, 1})), "x1*x2");
}

TEST(Wedge, DegreeOverflowIsAnError) {
  const auto a = ExteriorForm::monomial(kX2, {0, 1});
  EXPECT_THROW(wedge(a, ExteriorForm::monomial(kX2, {0})), ValidationError);
}

TEST(Wedge, ZeroFormsScale) {
  const auto f = ExteriorForm::function(kX2, var("x1"));
  const auto dx2 = ExteriorForm::monomial(kX2, {1});
  EXPECT_EQ(to_string(wedge(f, dx2).coefficient({1})), "x1");
}

TEST(Derivative, WorkedExamples) {
  const auto d0 = exterior_derivative(ExteriorForm::function(kX2, parse("x1*x2", kX2)));
  EXPECT_EQ(to_string(d0.coefficient({0})), "x2");
  EXPECT_EQ(to_string(d0.coefficient({1})), "x1");

  const auto d1 = exterior_derivative(ExteriorForm::monomial(kX2, {0}, var("x2")));
  EXPECT_EQ(to_string(d1.coefficient({0, 1})), "-1");

  FrameSpec frame(3);
  frame.set(2, 0, 1, Expr(1));
  const auto d2 = exterior_derivative(ExteriorForm::monomial(kX3, {2}), frame);
  EXPECT_EQ(to_string(d2.coefficient({0, 1})), "1");
  EXPECT_EQ(d2.terms().size(), 1u);
}

TEST(Derivative, TopDegreeFormHasEmptyDifferential) {
  const auto top = ExteriorForm::monomial(kX2, {0, 1}, parse("x1^2", kX2));
  const auto d = exterior_derivative(top);
  EXPECT_TRUE(d.empty());
  EXPECT_EQ(d.degree(), 3);
}

TEST(Derivative, BasisTermUsesGradedProductRule) {
  // d(x1 dx3) = dx1 ^ dx3 + x1 dx1 ^ dx2 when d(dx3) = dx1 ^ dx2.
  FrameSpec frame(3);
  frame.set(2, 0, 1, Expr(1));
  const auto d = exterior_derivative(ExteriorForm::monomial(kX3, {2}, var("x1")), frame);
  EXPECT_EQ(to_string(d.coefficient({0, 2})), "1");
  EXPECT_EQ(to_string(d.coefficient({0, 1})), "x1");

  FrameSpec f2(3);
  f2.set(1, 0, 2, Expr(1));  // d(dx2) = dx1 ^ dx3
  // d(dx2 ^ dx3) = d(dx2) ^ dx3 - dx2 ^ d(dx3) = dx1 ^ dx3 ^ dx3 = 0
  EXPECT_TRUE(exterior_derivative(ExteriorForm::monomial(kX3, {1, 2}), f2).empty());
  // d(dx3 ^ dx2) = -d(dx2 ^ dx3) = 0 as well; d(dx1 ^ dx2) = -dx1 ^ dx1 ^ dx3 = 0
  EXPECT_TRUE(exterior_derivative(ExteriorForm::monomial(kX3, {0, 1}), f2).empty());
  FrameSpec f3(3);
  f3.set(0, 1, 2, var("x1"));  // d(dx1) = x1 dx2 ^ dx3
  // d(x2 dx1) = dx2 ^ dx1 + x2 x1 dx2 ^ dx3
  const auto d3 = exterior_derivative(ExteriorForm::monomial(kX3, {0}, var("x2")), f3);
  EXPECT_EQ(to_string(d3.coefficient({0, 1})), "-1");
  EXPECT_EQ(to_string(d3.coefficient({1, 2})), "x1*x2");
}

TEST(Derivative, NonzeroFrameDifferentialIsReportedNotAsserted) {
  FrameSpec frame(3);
  frame.set(0, 1, 2, var("x1"));
  const auto theta = ExteriorForm::monomial(kX3, {0});
  const auto dd = exterior_derivative(exterior_derivative(theta, frame), frame);
  // d(x1 dx2^dx3) = dx1^dx2^dx3 on this frame: the evolutionary form's differential persists.
  EXPECT_EQ(to_string(dd.coefficient({0, 1, 2})), "1");
}

TEST(Frame, RejectsBadIndices) {
  FrameSpec f(2);
  EXPECT_THROW(f.set(0, 1, 0, Expr(1)), ValidationError);
  EXPECT_THROW(f.set(2, 0, 1, Expr(1)), ValidationError);
  EXPECT_THROW(f.set(0, 0, 0, Expr(1)), ValidationError);
  EXPECT_THROW(exterior_derivative(ExteriorForm::monomial(kX3, {0}), f), ValidationError);
}

TEST(Closure, WorkedExamples) {
  EXPECT_TRUE(is_closed(one_form(kX2, {"x2", "x1"})).closed);
  const auto r = is_closed(one_form(kX2, {"x2", "0"}));
  EXPECT_FALSE(r.closed);
  EXPECT_EQ(to_string(r.residual.coefficient({0, 1})), "-1");
}

TEST(Closure, AngularFormIsClosedByIndependentNumericCurl) {
  const Expr a1 = parse("-x2/(x1^2 + x2^2)", kX2);
  const Expr a2 = parse("x1/(x1^2 + x2^2)", kX2);
  ZeroTestSampler s(42);
  const double h = 1e-6;
  for (int i = 0; i < 32; ++i) {
    const double x = s.next_coordinate(), y = s.next_coordinate();
    auto f = [](const Expr& e, double u, double v) { return evaluate(e, {{"x1", u}, {"x2", v}}); };
    // Curl from the closed form of the partials, not from the library's derivative.
    const double r2 = x * x + y * y;
    const double exact = (r2 - 2 * x * x) / (r2 * r2) - (-(r2 - 2 * y * y) / (r2 * r2));
    const double fd = (f(a2, x + h, y) - f(a2, x - h, y)) / (2 * h) - (f(a1, x, y + h) - f(a1, x, y - h)) / (2 * h);
    ASSERT_LT(std::abs(exact), 1e-9);
    ASSERT_LT(std::abs(fd), 1e-6);
  }
  EXPECT_TRUE(is_closed(angular()).closed);
}

TEST(Closure, InconclusiveReportsCoefficient) {
  ExteriorForm f(std::vector<std::string>{"x1", "x2"}, 1);
  f.add_term({0}, parse("sqrt(-(x1^2) - 1)*x2", kX2));
  try {
    is_closed(f);
    FAIL();
  } catch (const InconclusiveError& e) {
    EXPECT_NE(std::string(e.what()).find("coefficient [1,2]"), std::string::npos) << e.what();
  }
}

TEST(Commutator, WorkedExamples) {
  const auto df = exterior_derivative(ExteriorForm::function(kX3, parse("x1^2*x2", kX3)));
  for (const auto& row : commutator_coefficients(df))
    for (const auto& k : row) EXPECT_TRUE(is_identically_zero(k));
  EXPECT_EQ(to_string(commutator_coefficients(one_form(kX2, {"x2", "0"}))[0][1]), "-1");
  const std::vector<std::string> xi{"xi1", "xi2"};
  const auto k = commutator_coefficients(one_form(xi, {"xi2", "-xi1"}));
  EXPECT_EQ(to_string(k[0][1]), "-2");
  EXPECT_EQ(to_string(k[1][0]), "2");
  EXPECT_THROW(commutator_coefficients(ExteriorForm::monomial(kX2, {0, 1})), ValidationError);
}

TEST(Loop, WorkedExamples) {
  const auto exact = exterior_derivative(ExteriorForm::function(kX2, parse("x1*x2", kX2)));
  EXPECT_NEAR(loop_integral(exact, square(0.5, 0.5, 1.0, 64)), 0.0, 1e-10);
  EXPECT_NEAR(loop_integral(angular(), regular_polygon(64, 1.0)), 2 * std::numbers::pi, 1e-3);
  EXPECT_NEAR(loop_integral(angular(), square(3, 3, 1.0, 512)), 0.0, 1e-8);
}

TEST(Loop, MidpointRuleConvergesQuadratically) {
  const double e1 = std::abs(loop_integral(angular(), square(3, 3, 1.0, 32)));
  const double e2 = std::abs(loop_integral(angular(), square(3, 3, 1.0, 64)));
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

TEST(Loop, Validation) {
  EXPECT_THROW(loop_integral(angular(), Loop{{{1, 0}, {0, 1}}, 4}), ValidationError);
  EXPECT_THROW(loop_integral(angular(), Loop{{{1, 0}, {1, 0}, {0, 1}}, 4}), ValidationError);
  EXPECT_THROW(loop_integral(angular(), Loop{{{1, 0}, {0, 1}, {1, 0}}, 4}), ValidationError);
  EXPECT_THROW(loop_integral(angular(), Loop{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 4}), ValidationError);
  EXPECT_THROW(loop_integral(angular(), Loop{{{1, 0}, {0, 1}, {-1, 0}}, 0}), ValidationError);
  // a vertex on the singularity
  EXPECT_THROW(loop_integral(angular(), Loop{{{-1, -1}, {1, 1}, {1, -1}}, 1}), DomainError);
}

// ---------------------------------------------------------------------------
// Properties

TEST(FormProperties, DifferentialSquaredVanishes) {
  gen::Engine rng(1);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 3;
    const auto vars = gen::names("x", n);
    const int degree = gen::uniform_int(rng, 0, n - 2);
    const auto theta = gen::form(rng, vars, degree);
    const auto dd = exterior_derivative(exterior_derivative(theta));
    for (const auto& [idx, c] : dd.terms()) EXPECT_TRUE(is_identically_zero(c)) << to_string(c);
  }
}

TEST(FormProperties, WedgeIsGradedAnticommutative) {
  gen::Engine rng(2);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 3;
    const auto vars = gen::names("x", n);
    const int p = gen::uniform_int(rng, 0, n);
    const int q = gen::uniform_int(rng, 0, n - p);
    const auto a = gen::form(rng, vars, p);
    const auto b = gen::form(rng, vars, q);
    const Expr sign((p * q) % 2 == 0 ? 1 : -1);
    EXPECT_TRUE(forms_equal(wedge(a, b), wedge(b, a).scaled(sign)));
  }
}

TEST(FormProperties, LeibnizRule) {
  gen::Engine rng(3);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 3;
    const auto vars = gen::names("x", n);
    const int p = gen::uniform_int(rng, 0, n - 1);
    const int q = gen::uniform_int(rng, 0, n - 1 - p);
    const auto a = gen::form(rng, vars, p);
    const auto b = gen::form(rng, vars, q);
    const Expr sign(p % 2 == 0 ? 1 : -1);
    const auto lhs = exterior_derivative(wedge(a, b));
    const auto rhs = wedge(exterior_derivative(a), b) + wedge(a, exterior_derivative(b)).scaled(sign);
    EXPECT_TRUE(forms_equal(lhs, rhs));
  }
}

TEST(FormProperties, ExactFormsAreClosed) {
  gen::Engine rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto f = ExteriorForm::function(kX3, gen::smooth(rng, kX3, 3));
    EXPECT_TRUE(is_closed(exterior_derivative(f)).closed);
  }
}

TEST(FormProperties, CommutatorMatchesDerivative) {
  gen::Engine rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto vars = gen::names("x", 2 + t % 3);
    const auto theta = gen::form(rng, vars, 1);
    const auto k = commutator_coefficients(theta);
    const auto d = exterior_derivative(theta);
    const int n = static_cast<int>(vars.size());
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
        EXPECT_TRUE(is_identically_zero(k[ui][uj] - d.coefficient({i, j})));
        EXPECT_TRUE(is_identically_zero(k[ui][uj] + k[uj][ui]));
      }
  }
}
