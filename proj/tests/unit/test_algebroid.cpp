#include <gtest/gtest.h>

#include <random>

#include "algred/algebroid.hpp"
#include "algred/errors.hpp"
#include "algred/model_file.hpp"
#include "test_support.hpp"

using namespace algred;

namespace {

const char* kSymplectic = R"(
[chart]
coordinates = q p
[bundle]
frame = d_q d_p
[anchor]
d_q = 1, 0
d_p = 0, 1
[mu]
degree = 2
d_q.dp = 1
d_p.dq = -1
)";

const char* kPresymplectic = R"(
[chart]
coordinates = x y z
[bundle]
frame = d_x d_y d_z
[anchor]
d_x = 1, 0, 0
d_y = 0, 1, 0
d_z = 0, 0, 1
[mu]
degree = 2
d_x.dy = 1
d_y.dx = -1
)";

std::vector<Point> grid(std::size_t n, std::size_t count = 32) { return sample_points(Box::uniform(n), count, 0); }

double jacobi_spec_sign(const PointData& d, std::size_t a, std::size_t b, std::size_t c, std::size_t e) {
  double s = 0.0;
  const std::size_t idx[3] = {a, b, c};
  for (int k = 0; k < 3; ++k) {
    const std::size_t p = idx[k], q = idx[(k + 1) % 3], r = idx[(k + 2) % 3];
    for (std::size_t m = 0; m < d.r; ++m) s += d.structure(m, p, q).value() * d.structure(e, m, r).value();
    for (std::size_t i = 0; i < d.n; ++i) s += d.rho[p].comps[i].value() * d.structure(e, q, r).gradient(i);
  }
  return s;
}

SectionJets random_section(std::mt19937_64& rng, const ChartPtr& chart, std::size_t r, const Point& x) {
  std::vector<Expression> coeffs;
  for (std::size_t a = 0; a < r; ++a)
    coeffs.push_back(parse_expression(support::random_expression(rng, chart->names(), 2), chart));
  return eval_section(coeffs, x);
}

}  // namespace

TEST(Axioms, So3Constants) {
  const auto m = parse_model(R"(
[chart]
coordinates = x y z
[bundle]
frame = e1 e2 e3
[anchor]
e1 = 0, 0, 0
e2 = 0, 0, 0
e3 = 0, 0, 0
[brackets]
[e1, e2].e3 = 1
[e2, e3].e1 = 1
[e3, e1].e2 = 1
[mu]
degree = 2
)");
  const auto r = check_algebroid_axioms(m.algebroid, grid(3), 1e-12);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_EQ(*r.residual, 0.0);
}

TEST(Axioms, TangentR2) {
  const auto A = AlgebroidModel::tangent(make_chart({"x", "y"}));
  EXPECT_EQ(A.frame(), (std::vector<std::string>{"d_x", "d_y"}));
  EXPECT_EQ(check_algebroid_axioms(A, grid(2), 1e-12).verdict, Verdict::Pass);
}

TEST(Axioms, SingleNonconstantStructureFunctionSatisfiesJacobi) {
  // rho = 0 and only C^1_23 = x: each cyclic term contains C_12 or C_31, which vanish.
  const auto m = parse_model(R"(
[chart]
coordinates = x y z
[bundle]
frame = e1 e2 e3
[anchor]
e1 = 0, 0, 0
e2 = 0, 0, 0
e3 = 0, 0, 0
[brackets]
[e2, e3].e1 = x
[mu]
degree = 2
)");
  const auto r = check_algebroid_axioms(m.algebroid, grid(3), 1e-12);
  EXPECT_EQ(r.find("jacobi")->verdict, Verdict::Pass);
}

TEST(Axioms, PlantedJacobiViolation) {
  const auto m = support::load("corpus/fail/bad_jacobi.alg");
  const auto r = check_algebroid_axioms(m.algebroid, grid(1), 1e-9);
  EXPECT_EQ(r.find("jacobi")->verdict, Verdict::Fail);
  EXPECT_EQ(r.find("anchor-morphism")->verdict, Verdict::Pass);
  EXPECT_NEAR(*r.find("jacobi")->residual, 1.0, 1e-15);
}

TEST(Axioms, JacobiDerivativeSign) {
  // so(3) action on R^3 with e1 rescaled by exp(x): non-constant C with a
  // nonzero quadratic part, so the sign of the rho.dC term matters.
  const auto m = parse_model(R"(
[chart]
coordinates = x y z
[bundle]
frame = e1 e2 e3
[anchor]
e1 = 0, exp(x)*z, -exp(x)*y
e2 = -z, 0, x
e3 = y, -x, 0
[brackets]
[e1, e2].e1 = z
[e1, e2].e3 = exp(x)
[e1, e3].e2 = -exp(x)
[e1, e3].e1 = -y
[e2, e3].e1 = exp(-x)
[mu]
degree = 2
)");
  const auto samples = grid(3);
  const auto r = check_algebroid_axioms(m.algebroid, samples, 1e-12);
  EXPECT_EQ(r.find("anchor-morphism")->verdict, Verdict::Pass) << render_text(r);
  EXPECT_EQ(r.find("jacobi")->verdict, Verdict::Pass) << render_text(r);
  double spec_sign = 0.0;
  for (const auto& x : samples) {
    const PointData d = evaluate_point(m.algebroid, nullptr, x);
    for (std::size_t e = 0; e < 3; ++e) {
      EXPECT_LT(std::abs(jacobi_residual(d, 0, 1, 2, e)), 1e-12);
      spec_sign = std::max(spec_sign, std::abs(jacobi_spec_sign(d, 0, 1, 2, e)));
    }
  }
  EXPECT_GT(spec_sign, 0.1);
}

TEST(Axioms, AnchorMorphismFailure) {
  const auto m = support::load("tests/data/mutants/anchor_morphism.alg");
  const auto r = check_algebroid_axioms(m.algebroid, grid(2), 1e-9);
  EXPECT_EQ(r.find("anchor-morphism")->verdict, Verdict::Fail);
  EXPECT_EQ(r.find("jacobi")->verdict, Verdict::Pass);
}

TEST(IM, SymplecticPasses) {
  const auto m = parse_model(kSymplectic);
  const auto r = im_residuals(m.algebroid, m.form, grid(2), 1e-12);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_EQ(*r.residual, 0.0);
}

TEST(IM, ConstantBivectorCotangent) {
  // pi = d_x ^ d_y: rho(dx) = pi(., dx) = -d_y, rho(dy) = d_x.
  const auto m = parse_model(R"(
[chart]
coordinates = x y
[bundle]
frame = ax ay
[anchor]
ax = 0, -1
ay = 1, 0
[mu]
degree = 2
ax.dx = 1
ay.dy = 1
)");
  EXPECT_EQ(im_residuals(m.algebroid, m.form, grid(2), 1e-12).verdict, Verdict::Pass);
}

TEST(IM, SymmetricMuFailsFirstEquation) {
  std::string text = kSymplectic;
  text.replace(text.find("d_p.dq = -1"), 11, "d_p.dq = 1");
  const auto m = parse_model(text);
  const auto r = im_residuals(m.algebroid, m.form, grid(2), 1e-9);
  EXPECT_EQ(r.find("im-i")->verdict, Verdict::Fail);
  EXPECT_DOUBLE_EQ(*r.find("im-i")->residual, 2.0);
}

TEST(IM, DegreeOneSkipsFirstEquation) {
  const auto m = support::load("corpus/pass/function_r2.alg");
  const auto r = im_residuals(m.algebroid, m.form, grid(2), 1e-12);
  EXPECT_EQ(r.find("im-i")->verdict, Verdict::Skipped);
  EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(IM, DegreeMismatchRejected) {
  auto m = parse_model(kSymplectic);
  m.form.mu[0] = FormField(2, m.algebroid.chart());
  EXPECT_THROW(im_residuals(m.algebroid, m.form, grid(2), 1e-9), DegreeMismatch);
}

TEST(LinearForm, ZeroSectionFormulas) {
  const auto m = parse_model(kSymplectic);
  const TotalSpacePoint z{{0.2, -0.4}, {0, 0}};
  // omega((0, e_q), (v, 0)) = mu(d_q)(v) = dp(v)
  EXPECT_DOUBLE_EQ(linear_form_value(m.algebroid, m.form, z, {{{0, 0}, {1, 0}}, {{0.3, 0.7}, {0, 0}}}), 0.7);
  EXPECT_DOUBLE_EQ(linear_form_value(m.algebroid, m.form, z, {{{1, 2}, {0, 0}}, {{0.3, 0.7}, {0, 0}}}), 0.0);
  const auto pm = parse_model(kPresymplectic);
  const TotalSpacePoint u{{0.1, 0.2, 0.3}, {0, 0, 1}};
  EXPECT_DOUBLE_EQ(linear_form_value(pm.algebroid, pm.form, u, {{{0, 0, 1}, {0, 0, 0}}, {{0.5, -1, 2}, {0, 0, 0}}}), 0.0);
  EXPECT_THROW(linear_form_value(m.algebroid, m.form, z, {{{0, 0}, {1, 0}}}), ArityMismatch);
}

TEST(LinearForm, RecoversMu) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const char* rel : {"corpus/pass/poisson_r2.alg", "corpus/pass/twisted_graph_r3.alg", "corpus/pass/volume_r3.alg"}) {
    const auto m = support::load(rel);
    const std::size_t n = m.algebroid.dim(), r = m.algebroid.rank(), k = m.form.degree;
    for (int trial = 0; trial < 10; ++trial) {
      Point x(n);
      for (auto& c : x) c = u(rng);
      const PointData d = evaluate_point(m.algebroid, &m.form, x);
      for (std::size_t a = 0; a < r; ++a) {
        std::vector<TangentE> t(k);
        t[0] = {std::vector<double>(n, 0.0), std::vector<double>(r, 0.0)};
        t[0].udot[a] = 1.0;
        std::vector<std::vector<double>> vs;
        for (std::size_t s = 1; s < k; ++s) {
          std::vector<double> v(n);
          for (auto& c : v) c = u(rng);
          t[s] = {v, std::vector<double>(r, 0.0)};
          vs.push_back(v);
        }
        const double lhs = linear_form_value(m.algebroid, m.form, {x, std::vector<double>(r, 0.0)}, t);
        EXPECT_NEAR(lhs, evaluate(d.mu[a], vs), 1e-13) << rel;
      }
    }
  }
}

TEST(LinearForm, SectionPullback) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const char* rel : {"corpus/pass/poisson_r2.alg", "corpus/pass/twisted_graph_r3.alg", "corpus/pass/volume_r4.alg",
                          "corpus/pass/lie_poisson_so3.alg"}) {
    const auto m = support::load(rel);
    const auto& chart = m.algebroid.chart();
    const std::size_t n = m.algebroid.dim(), r = m.algebroid.rank(), k = m.form.degree;
    for (int trial = 0; trial < 10; ++trial) {
      Point x(n);
      for (auto& c : x) c = u(rng);
      const PointData d = evaluate_point(m.algebroid, &m.form, x);
      const SectionJets s = random_section(rng, chart, r, x);
      std::vector<double> ux(r);
      for (std::size_t a = 0; a < r; ++a) ux[a] = s[a].value();
      std::vector<TangentE> t;
      std::vector<std::vector<double>> vs;
      for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> v(n), udot(r, 0.0);
        for (auto& c : v) c = u(rng);
        for (std::size_t a = 0; a < r; ++a)
          for (std::size_t j = 0; j < n; ++j) udot[a] += s[a].gradient(j) * v[j];
        t.push_back({v, udot});
        vs.push_back(v);
      }
      const double lhs = linear_form_value(m.algebroid, m.form, {x, ux}, t);
      const double rhs = evaluate(exterior_derivative(mu_of(d, s)) + eta_of(d, s), vs);
      EXPECT_NEAR(lhs, rhs, 1e-9) << rel;
    }
  }
}

TEST(IM, TensorialOnRandomSections) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& rel : support::corpus_files("corpus/pass")) {
    const auto m = support::load(rel);
    const std::size_t n = m.algebroid.dim(), r = m.algebroid.rank();
    for (int trial = 0; trial < 8; ++trial) {
      Point x(n);
      for (auto& c : x) c = u(rng);
      const PointData d = evaluate_point(m.algebroid, &m.form, x);
      const auto s1 = random_section(rng, m.algebroid.chart(), r, x);
      const auto s2 = random_section(rng, m.algebroid.chart(), r, x);
      const auto res = im_residual_forms(d, s1, s2);
      if (res.first) EXPECT_LE(res.first->max_abs_value(), 1e-8) << rel;
      EXPECT_LE(res.second.max_abs_value(), 1e-8) << rel;
      EXPECT_LE(res.third.max_abs_value(), 1e-8) << rel;
    }
  }
}

TEST(Kernel, SymplecticIsNondegenerate) {
  const auto m = parse_model(kSymplectic);
  for (const TotalSpacePoint& p : {TotalSpacePoint{{0, 0}, {0, 0}}, TotalSpacePoint{{0.3, 1}, {2, -1}}}) {
    const auto k = kernel_at(m.algebroid, m.form, p);
    EXPECT_TRUE(k.kernel_basis.empty());
  }
}

TEST(Kernel, PresymplecticSplitsAtZeroSection) {
  const auto m = parse_model(kPresymplectic);
  const auto k0 = kernel_at(m.algebroid, m.form, {{0.1, 0.2, 0.3}, {0, 0, 0}});
  ASSERT_EQ(k0.kernel_basis.size(), 2u);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(6, 2);
  expected(2, 0) = 1.0;  // (e_z, 0)
  expected(5, 1) = 1.0;  // (0, e_3)
  EXPECT_LT(subspace_distance(k0.kernel_matrix(6), expected), 1e-12);
  EXPECT_EQ(kernel_at(m.algebroid, m.form, {{0.1, 0.2, 0.3}, {1, 0, 0}}).kernel_basis.size(), 2u);
}

TEST(Kernel, DimensionMatchesZeroSectionSplitting) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const char* rel : {"corpus/pass/presymplectic_r3.alg", "corpus/pass/symplectic_r2.alg",
                          "corpus/pass/volume_r3.alg", "corpus/pass/volume_r4.alg"}) {
    const auto m = support::load(rel);
    const std::size_t n = m.algebroid.dim(), r = m.algebroid.rank();
    const PointData d0 = evaluate_point(m.algebroid, &m.form, Point(n, 0.0));
    const auto expected = null_space(mu_matrix(d0)).cols() + null_space(mu_sharp_matrix(d0)).cols();
    for (int i = 0; i < 50; ++i) {
      TotalSpacePoint p{Point(n), std::vector<double>(r)};
      for (auto& c : p.base) c = u(rng);
      for (auto& c : p.fiber) c = u(rng);
      EXPECT_EQ(static_cast<Eigen::Index>(kernel_at(m.algebroid, m.form, p).kernel_basis.size()), expected) << rel;
    }
  }
}

TEST(Kernel, FiberLengthChecked) {
  const auto m = parse_model(kSymplectic);
  EXPECT_THROW(kernel_at(m.algebroid, m.form, {{0, 0}, {0}}), ArityMismatch);
}
