#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "skewforms/symbolic.hpp"

using namespace skewforms;

namespace {

const std::vector<std::string> kX{"x1", "x2"};

double at(const Expr& e, std::initializer_list<std::pair<const char*, double>> b) {
  Bindings m;
  for (const auto& [k, v] : b) m.emplace(k, v);
  return evaluate(e, m);
}

Bindings random_point(gen::Engine& rng, const std::vector<std::string>& vars, double lo = -1.5, double hi = 1.5) {
  Bindings b;
  for (const auto& v : vars) b[v] = gen::uniform(rng, lo, hi);
  return b;
}

}  // namespace

TEST(Parse, WorkedExamples) {
  const std::vector<std::string> p{"p1", "p2"};
  EXPECT_NEAR(at(parse("p1^2 + p2^2 - 1", p), {{"p1", 0.6}, {"p2", 0.8}}), 0.0, 1e-15);
  EXPECT_EQ(at(parse("x2*sin(x1)", kX), {{"x1", 0.0}, {"x2", 7.5}}), 0.0);
  EXPECT_EQ(at(parse("p1 + u*p2", std::vector<std::string>{"u", "p1", "p2"}), {{"u", 2}, {"p1", 1}, {"p2", 3}}), 7.0);
}

TEST(Parse, AssociativityAndPrecedence) {
  const std::vector<std::string> none;
  EXPECT_EQ(evaluate(parse("8 - 3 - 2", none), {}), 3.0);
  EXPECT_EQ(evaluate(parse("8 / 4 / 2", none), {}), 1.0);
  EXPECT_EQ(evaluate(parse("2^3^2", none), {}), 512.0);
  EXPECT_EQ(evaluate(parse("-2^2", none), {}), 4.0);  // unary minus binds to the atom
  EXPECT_EQ(evaluate(parse("-(2^2)", none), {}), -4.0);
  EXPECT_EQ(evaluate(parse("2 + 3 * 4", none), {}), 14.0);
  EXPECT_EQ(evaluate(parse("1.5e2", none), {}), 150.0);
  EXPECT_EQ(evaluate(parse("0.25", none), {}), 0.25);
}

TEST(Parse, ExactDecimalLiterals) {
  const Expr e = simplify(parse("0.1 + 0.2 - 0.3", std::vector<std::string>{}));
  EXPECT_TRUE(e.is_zero());
}

TEST(Parse, SyntaxErrorsCarryOffsets) {
  try {
    parse("x1 + * x2", kX);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 5u);
    EXPECT_EQ(e.code(), "E_SYNTAX");
  }
  EXPECT_THROW(parse("(x1", kX), ParseError);
  EXPECT_THROW(parse("", kX), ParseError);
  EXPECT_THROW(parse("x1 x2", kX), ParseError);
  EXPECT_THROW(parse("sin x1", kX), ParseError);
  EXPECT_THROW(parse("x1 # 2", kX), ParseError);
}

TEST(Parse, UnknownIdentifierNamed) {
  try {
    parse("x1 + y", kX);
    FAIL();
  } catch (const UnknownIdentifierError& e) {
    EXPECT_EQ(e.name(), "y");
  }
  EXPECT_THROW(parse("foo(x1)", kX), UnknownIdentifierError);
}

TEST(Evaluate, WorkedExamples) {
  EXPECT_EQ(evaluate(parse_unchecked("exp(0)"), {}), 1.0);
  EXPECT_NEAR(at(parse_unchecked("p1^2+p2^2-1"), {{"p1", 0.6}, {"p2", 0.8}}), 0.0, 1e-15);
  EXPECT_THROW(at(parse_unchecked("ln(x1)"), {{"x1", -1.0}}), DomainError);
}

TEST(Evaluate, DomainAndUnboundErrors) {
  EXPECT_THROW(at(parse_unchecked("1/x1"), {{"x1", 0.0}}), DomainError);
  EXPECT_THROW(at(parse_unchecked("sqrt(x1)"), {{"x1", -0.5}}), DomainError);
  EXPECT_THROW(at(parse_unchecked("x1^0.5"), {{"x1", -2.0}}), DomainError);
  EXPECT_THROW(at(parse_unchecked("x1^(-1)"), {{"x1", 0.0}}), DomainError);
  EXPECT_THROW(at(parse_unchecked("exp(x1)"), {{"x1", 1000.0}}), DomainError);
  EXPECT_THROW(at(parse_unchecked("x1 + x2"), {{"x1", 1.0}}), UnboundVariableError);
}

TEST(Evaluate, ProgramMatchesTreeEvaluation) {
  gen::Engine rng(7);
  for (int t = 0; t < 50; ++t) {
    const Expr e = gen::smooth(rng, kX, 4);
    const Program prog(e, kX);
    const auto b = random_point(rng, kX);
    const std::vector<double> v{b.at("x1"), b.at("x2")};
    EXPECT_NEAR(prog(v), evaluate(e, b), 1e-12 * (1 + std::abs(evaluate(e, b)))) << to_string(e);
  }
}

TEST(Differentiate, WorkedExamples) {
  const std::vector<std::string> p{"p1", "p2"};
  EXPECT_EQ(to_string(differentiate(parse("p1^2 + p2^2 - 1", p), "p1")), "2*p1");
  EXPECT_EQ(to_string(differentiate(parse_unchecked("p1 + u*p2"), "u")), "p2");
  const Expr d = differentiate(parse("x2/(x1^2+x2^2)", kX), "x1");
  EXPECT_EQ(to_string(d), "-2*x1*x2/(x1^2 + x2^2)^2");
}

TEST(Differentiate, QuotientAgreesWithCentralDifferences) {
  const Expr f = parse("x2/(x1^2+x2^2)", kX);
  const Expr d = differentiate(f, "x1");
  gen::Engine rng(11);
  const double h = 1e-5;
  for (int i = 0; i < 20; ++i) {
    ZeroTestSampler s(rng());
    const double x1 = s.next_coordinate(), x2 = s.next_coordinate();
    const double fd = (at(f, {{"x1", x1 + h}, {"x2", x2}}) - at(f, {{"x1", x1 - h}, {"x2", x2}})) / (2 * h);
    EXPECT_LT(std::abs(at(d, {{"x1", x1}, {"x2", x2}}) - fd), 1e-6);
  }
}

TEST(Differentiate, FunctionRules) {
  const std::vector<std::string> v{"x"};
  EXPECT_EQ(to_string(differentiate(parse("sin(x)", v), "x")), "cos(x)");
  EXPECT_EQ(to_string(differentiate(parse("exp(2*x)", v), "x")), "2*exp(2*x)");
  EXPECT_EQ(to_string(differentiate(parse("ln(x)", v), "x")), "1/x");
  EXPECT_TRUE(differentiate(parse("sin(x)", v), "y").is_zero());
  // x^x = exp(x ln x): derivative x^x (ln x + 1)
  const Expr d = differentiate(parse("x^x", v), "x");
  EXPECT_NEAR(at(d, {{"x", 1.7}}), std::pow(1.7, 1.7) * (std::log(1.7) + 1), 1e-12);
}

TEST(Differentiate, PropertyMatchesFiniteDifferences) {
  gen::Engine rng(2024);
  const double h = 1e-5;
  for (int t = 0; t < 100; ++t) {
    const Expr e = gen::smooth(rng, kX, 4);
    const std::string& v = kX[static_cast<std::size_t>(t % 2)];
    const Expr d = differentiate(e, v);
    for (int k = 0; k < 10; ++k) {
      auto b = random_point(rng, kX);
      const double val = evaluate(d, b);
      auto plus = b, minus = b;
      plus[v] += h;
      minus[v] -= h;
      const double fd = (evaluate(e, plus) - evaluate(e, minus)) / (2 * h);
      EXPECT_LT(std::abs(val - fd), 1e-5) << to_string(e) << " d/d" << v;
    }
  }
}

TEST(Simplify, WorkedExamples) {
  EXPECT_TRUE(simplify(parse("x1 - x1", kX)).is_zero());
  EXPECT_EQ(to_string(simplify(parse("1*(x2 + 0)", kX))), "x2");
  EXPECT_TRUE(simplify(parse("x1*x2 - x2*x1", kX)).is_zero());
}

TEST(Simplify, GuaranteedRewrites) {
  EXPECT_EQ(to_string(simplify(parse("0 + x1", kX))), "x1");
  EXPECT_TRUE(simplify(parse("0*sin(x1)", kX)).is_zero());
  EXPECT_EQ(to_string(simplify(parse("1/3 + 1/6", kX))), "1/2");
  EXPECT_EQ(to_string(simplify(parse("x1*x1*x1", kX))), "x1^3");
  EXPECT_EQ(to_string(simplify(parse("(x1 + (x2 + x1))", kX))), "2*x1 + x2");
  EXPECT_EQ(to_string(simplify(parse("2^-1", kX))), "1/2");
  EXPECT_EQ(to_string(simplify(parse("sqrt(4)", kX))), "2");
}

TEST(Simplify, PreservesValueAndIsIdempotent) {
  gen::Engine rng(99);
  for (int t = 0; t < 100; ++t) {
    const Expr e = gen::smooth(rng, kX, 4);
    const Expr s = simplify(e);
    EXPECT_TRUE(structurally_equal(simplify(s), s)) << to_string(e);
    for (int k = 0; k < 10; ++k) {
      const auto b = random_point(rng, kX);
      const double a = evaluate(e, b);
      EXPECT_NEAR(evaluate(s, b), a, 1e-12 * std::max(1.0, std::abs(a))) << to_string(e);
    }
  }
}

TEST(Print, RoundTripPreservesValue) {
  gen::Engine rng(5);
  for (int t = 0; t < 100; ++t) {
    const Expr e = t % 2 ? gen::smooth(rng, kX, 4) : simplify(gen::smooth(rng, kX, 4));
    const std::string text = to_string(e);
    SCOPED_TRACE(text);
    const Expr back = parse(text, kX);
    for (int k = 0; k < 10; ++k) {
      const auto b = random_point(rng, kX);
      const double a = evaluate(e, b);
      EXPECT_NEAR(evaluate(back, b), a, 1e-12 * std::max(1.0, std::abs(a))) << text;
    }
  }
}

TEST(Print, NegativesAndPowers) {
  EXPECT_EQ(to_string(simplify(parse("-x1^2", kX))), "x1^2");
  EXPECT_EQ(to_string(simplify(parse("-(x1^2)", kX))), "-(x1^2)");
  EXPECT_EQ(to_string(simplify(parse("x1 - 2*x2", kX))), "x1 - 2*x2");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "0");
}

TEST(ZeroTest, WorkedExamples) {
  EXPECT_TRUE(is_identically_zero(parse("x1 - x1", kX)));
  EXPECT_FALSE(is_identically_zero(parse("x2", kX)));
  const Expr a = parse("x1/(x1^2+x2^2)", kX);
  const Expr b = parse("-x2/(x1^2+x2^2)", kX);
  const Expr curl = differentiate(a, "x1") - differentiate(b, "x2");
  const auto r = zero_test(curl);
  EXPECT_TRUE(r.zero);
  // Independent brute-force check at every sample point.
  ZeroTestSampler s(42);
  for (int i = 0; i < 32; ++i) {
    const auto pt = s.next_point({kX.begin(), kX.end()});
    EXPECT_LT(std::abs(evaluate(curl, pt)), 1e-9);
  }
}

TEST(ZeroTest, SymbolicStageHandlesExpansion) {
  const auto r = zero_test(parse("(x1 + x2)^2 - x1^2 - 2*x1*x2 - x2^2", kX));
  EXPECT_TRUE(r.zero);
  EXPECT_TRUE(r.symbolic);
}

TEST(ZeroTest, NumericStageForTranscendentalIdentities) {
  const auto r = zero_test(parse("sin(x1)^2 + cos(x1)^2 - 1", kX));
  EXPECT_TRUE(r.zero);
  EXPECT_FALSE(r.symbolic);
  EXPECT_EQ(r.evaluated_points, 32u);
}

TEST(ZeroTest, SamplerIsDeterministicAndAvoidsSmallMagnitudes) {
  ZeroTestSampler a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = a.next_coordinate();
    EXPECT_EQ(x, b.next_coordinate());
    EXPECT_GE(std::abs(x), 0.1);
    EXPECT_LE(std::abs(x), 2.0);
  }
}

TEST(ZeroTest, InconclusiveWhenMostPointsAreSingular) {
  EXPECT_THROW(zero_test(parse("sqrt(-(x1^2) - 1) * x1", std::vector<std::string>{"x1"})), InconclusiveError);
}
