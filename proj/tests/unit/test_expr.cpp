#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "algred/errors.hpp"
#include "algred/expr.hpp"
#include "test_support.hpp"

using namespace algred;

namespace {

ChartPtr xy() { return make_chart({"x", "y"}); }

}  // namespace

TEST(Parse, PrecedenceTree) {
  EXPECT_EQ(parse_expression("x^2 + sin(y)", xy()).to_sexpr(), "(+ (^ x 2) (sin y))");
  EXPECT_EQ(parse_expression("x - y - 1", xy()).to_sexpr(), "(- (- x y) 1)");
  EXPECT_EQ(parse_expression("x * y / 2", xy()).to_sexpr(), "(/ (* x y) 2)");
  EXPECT_EQ(parse_expression("x^y^2", xy()).to_sexpr(), "(^ x (^ y 2))");
  EXPECT_EQ(parse_expression("-x^2", xy()).to_sexpr(), "(neg (^ x 2))");
  EXPECT_EQ(parse_expression("2*-x", xy()).to_sexpr(), "(* 2 (neg x))");
}

TEST(Parse, Literal) {
  const auto e = parse_expression("1", make_chart({"x"}));
  ASSERT_TRUE(e.is_constant());
  EXPECT_EQ(*e.constant_value(), 1.0);
  EXPECT_DOUBLE_EQ(*parse_expression("2.5e-1", xy()).constant_value(), 0.25);
  EXPECT_NEAR(*parse_expression("pi", xy()).constant_value(), M_PI, 0.0);
}

TEST(Parse, RightAssociativePowerValue) {
  EXPECT_DOUBLE_EQ(parse_expression("2^3^2", xy()).value({0, 0}), 512.0);
  EXPECT_DOUBLE_EQ(parse_expression("-2^2", xy()).value({0, 0}), -4.0);
}

TEST(Parse, UnknownCoordinate) {
  try {
    parse_expression("x + z", xy());
    FAIL() << "expected UnknownCoordinate";
  } catch (const UnknownCoordinate& e) {
    EXPECT_EQ(e.name(), "z");
    EXPECT_EQ(e.offset(), 4u);
  }
}

TEST(Parse, SyntaxErrors) {
  for (const auto& [text, offset] : std::vector<std::pair<std::string, std::size_t>>{
           {"x +", 3}, {"(x", 2}, {"x y", 2}, {"sin x", 4}, {"", 0}, {"x $ y", 2}, {"tan(x)", 0}}) {
    try {
      parse_expression(text, xy());
      FAIL() << "expected SyntaxError for '" << text << "'";
    } catch (const SyntaxError& e) {
      EXPECT_EQ(e.offset(), offset) << text;
      EXPECT_FALSE(e.expected().empty()) << text;
    } catch (const UnknownCoordinate&) {
      EXPECT_EQ(text, "tan(x)");
    }
  }
}

TEST(Parse, PrintParsesBack) {
  std::mt19937_64 rng(7);
  const auto chart = make_chart({"x", "y", "z"});
  for (int i = 0; i < 200; ++i) {
    const auto e = parse_expression(support::random_expression(rng, chart->names()), chart);
    const auto back = parse_expression(e.to_string(), chart);
    EXPECT_TRUE(structurally_equal(e, back)) << e.to_string();
  }
}

TEST(Jet, SpecExamples) {
  const auto j = eval_jet2(parse_expression("x^2 + sin(y)", xy()), {1, 0});
  EXPECT_DOUBLE_EQ(j.value(), 1.0);
  EXPECT_DOUBLE_EQ(j.gradient(0), 2.0);
  EXPECT_DOUBLE_EQ(j.gradient(1), 1.0);
  EXPECT_DOUBLE_EQ(j.hessian(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(j.hessian(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(j.hessian(1, 1), 0.0);

  const double a = 1.5, b = -0.25;
  const auto k = eval_jet2(parse_expression("x*y", xy()), {a, b});
  EXPECT_DOUBLE_EQ(k.value(), a * b);
  EXPECT_DOUBLE_EQ(k.gradient(0), b);
  EXPECT_DOUBLE_EQ(k.gradient(1), a);
  EXPECT_EQ(k.hessian_matrix(), (std::vector<std::vector<double>>{{0, 1}, {1, 0}}));

  const auto e = eval_jet2(parse_expression("exp(x)", make_chart({"x"})), {0});
  EXPECT_DOUBLE_EQ(e.value(), 1.0);
  EXPECT_DOUBLE_EQ(e.gradient(0), 1.0);
  EXPECT_DOUBLE_EQ(e.hessian(0, 0), 1.0);
}

TEST(Jet, HessianSymmetricByStorage) {
  const auto j = eval_jet2(parse_expression("sin(x*y) * exp(y)", xy()), {0.3, -0.7});
  EXPECT_EQ(j.hessian(0, 1), j.hessian(1, 0));
}

TEST(Jet, DomainErrors) {
  const auto chart = make_chart({"x"});
  for (const char* text : {"log(x)", "sqrt(x - 1)", "1 / x", "x^0.5 * 0 + log(x - 2)"}) {
    try {
      eval_jet2(parse_expression(text, chart), {0.0});
      FAIL() << text;
    } catch (const DomainError& e) {
      ASSERT_EQ(e.point().size(), 1u) << text;
      EXPECT_EQ(e.point()[0], 0.0);
    }
  }
  EXPECT_THROW(parse_expression("log(x)", chart).value({-1.0}), DomainError);
}

TEST(Jet, PowerCases) {
  const auto chart = make_chart({"x"});
  const auto j = eval_jet2(parse_expression("x^3", chart), {-2.0});
  EXPECT_DOUBLE_EQ(j.value(), -8.0);
  EXPECT_DOUBLE_EQ(j.gradient(0), 12.0);
  EXPECT_DOUBLE_EQ(j.hessian(0, 0), -12.0);
  const auto g = eval_jet2(parse_expression("x^x", chart), {2.0});
  EXPECT_NEAR(g.value(), 4.0, 1e-15);
  EXPECT_NEAR(g.gradient(0), 4.0 * (std::log(2.0) + 1.0), 1e-12);
}

TEST(Jet, AlgebraicIdentities) {
  std::mt19937_64 rng(11);
  const auto chart = make_chart({"x", "y"});
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const std::string f = support::random_expression(rng, chart->names());
    const std::string g = support::random_expression(rng, chart->names());
    const Point p{u(rng), u(rng)};
    const Jet2 jf = eval_jet2(parse_expression(f, chart), p), jg = eval_jet2(parse_expression(g, chart), p);
    const Jet2 sum = eval_jet2(parse_expression("(" + f + ") + (" + g + ")", chart), p);
    const Jet2 prod = eval_jet2(parse_expression("(" + f + ") * (" + g + ")", chart), p);
    const Jet2 esum = jf + jg, eprod = jf * jg;
    for (const auto& [a, b] : {std::pair{sum, esum}, std::pair{prod, eprod}}) {
      std::vector<double> va{a.value()}, vb{b.value()};
      for (std::size_t r = 0; r < 2; ++r) {
        va.push_back(a.gradient(r));
        vb.push_back(b.gradient(r));
        for (std::size_t c = r; c < 2; ++c) {
          va.push_back(a.hessian(r, c));
          vb.push_back(b.hessian(r, c));
        }
      }
      EXPECT_LE(support::relative_error(va, vb), 1e-13);
    }
  }
}

TEST(Jet, FiniteDifferenceOracle) {
  std::mt19937_64 rng(2024);
  const auto chart = make_chart({"x", "y", "z"});
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto e = parse_expression(support::random_expression(rng, chart->names()), chart);
    const Point p{u(rng), u(rng), u(rng)};
    const Jet2 j = eval_jet2(e, p);
    const auto fd = support::central_differences(e, p);
    std::vector<double> grad(j.gradient().begin(), j.gradient().end()), hj, hf;
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) {
        hj.push_back(j.hessian(r, c));
        hf.push_back(fd.hessian[r][c]);
      }
    EXPECT_LE(support::relative_error(grad, fd.gradient), 1e-6) << e.to_string();
    EXPECT_LE(support::relative_error(hj, hf), 1e-4) << e.to_string();
    EXPECT_NEAR(j.value(), e.value(p), 1e-14 * std::max(1.0, std::abs(j.value())));
  }
}

TEST(Rechart, SubstitutesCoordinatesAndValues) {
  const auto src = make_chart({"x", "y", "z"});
  const auto dst = make_chart({"a", "b"});
  const auto e = parse_expression("x * y + exp(z)", src);
  const auto r = rechart(e, dst, {std::size_t{1}, 2.0, std::size_t{0}});
  EXPECT_EQ(r.chart(), dst);
  EXPECT_NEAR(r.value({0.5, 3.0}), 3.0 * 2.0 + std::exp(0.5), 1e-14);
  EXPECT_FALSE(rechart(parse_expression("y", src), dst, {std::size_t{0}, 4.0, std::size_t{1}}).depends_on(0));
}

TEST(Fold, ConstantsFold) {
  const auto chart = xy();
  const auto x = Expression::coordinate(0, chart);
  const auto zero = Expression::constant(0.0, chart), one = Expression::constant(1.0, chart);
  EXPECT_TRUE((x * zero).is_zero());
  EXPECT_TRUE(structurally_equal(x * one, x));
  EXPECT_TRUE(structurally_equal(x + zero, x));
  EXPECT_EQ(*(Expression::constant(2.0, chart) * Expression::constant(3.0, chart)).constant_value(), 6.0);
}
