#include <gtest/gtest.h>

#include "algred/errors.hpp"
#include "algred/model_file.hpp"
#include "algred/pipeline.hpp"
#include "algred/structures.hpp"
#include "test_support.hpp"

using namespace algred;

namespace {

std::vector<Point> samples_of(const ModelFile& m, std::size_t count = 32) {
  return sample_points(m.samples.box, count, m.samples.seed);
}

TwistSpec volume_twist(const ChartPtr& chart, double c) {
  FormField chi(3, chart);
  chi.set({0, 1, 2}, Expression::constant(c, chart));
  return {chi, true};
}

const char* kLineOverR3 = R"(
[chart]
coordinates = x y z
[bundle]
frame = e1
[mu]
degree = 2
)";

// twisted_r4 with an extra coordinate x5 and kernel section d5, with eta
// written out explicitly as eta_chi for chi = -exp(x3) dx1^dx2^dx3.
const char* kExplicitR5 = R"(
[chart]
coordinates = x1 x2 x3 x4 x5
[bundle]
frame = d1 d2 d3 d4 d5
[anchor]
d1 = 1, 0, 0, 0, 0
d2 = 0, 1, 0, 0, 0
d3 = 0, 0, 1, 0, 0
d4 = 0, 0, 0, 1, 0
d5 = 0, 0, 0, 0, 1
[mu]
degree = 2
d1.dx2 = exp(x3)
d2.dx1 = -exp(x3)
d3.dx4 = 1
d4.dx3 = -1
[eta]
d1.dx2^dx3 = exp(x3)
d2.dx1^dx3 = -exp(x3)
d3.dx1^dx2 = exp(x3)
[quotient]
fiber = x5
kernel = d5
)";

TwistSpec twist_on(const ChartPtr& chart, const std::string& coefficient) {
  FormField chi(3, chart);
  chi.set({0, 1, 2}, parse_expression(coefficient, chart));
  return {chi, true};
}

}  // namespace

TEST(Twist, UntwistedZero) {
  const auto m = support::load("corpus/pass/symplectic_r2.alg");
  const auto T = TwistSpec::from_components(m.algebroid, m.form);
  EXPECT_EQ(T.chi.degree(), 3u);
  EXPECT_TRUE(T.chi.is_zero());
  EXPECT_EQ(check_twist(m.algebroid, m.form, T, samples_of(m), 1e-9).verdict, Verdict::Pass);
}

TEST(Twist, ZeroAnchorForcesZeroEta) {
  auto m = parse_model(std::string(kLineOverR3) + "[anchor]\ne1 = 0, 0, 0\n");
  const auto T = volume_twist(m.algebroid.chart(), 2.5);
  EXPECT_EQ(check_twist(m.algebroid, m.form, T, samples_of(m), 1e-9).verdict, Verdict::Pass);
  m.form.eta[0].set({0, 1}, Expression::constant(1.0, m.algebroid.chart()));
  const auto r = check_twist(m.algebroid, m.form, T, samples_of(m), 1e-9);
  EXPECT_EQ(r.find("eta-twist")->verdict, Verdict::Fail);
}

TEST(Twist, ContractionSign) {
  // eta(e1) = dx^dy, chi = -dx^dy^dz, rho(e1) = d_z: -i_{d_z} chi = dx^dy.
  const auto m = parse_model(std::string(kLineOverR3) + "[anchor]\ne1 = 0, 0, 1\n[eta]\ne1.dx^dy = 1\n");
  EXPECT_EQ(check_twist(m.algebroid, m.form, volume_twist(m.algebroid.chart(), -1.0), samples_of(m), 1e-9).verdict,
            Verdict::Pass);
  EXPECT_EQ(check_twist(m.algebroid, m.form, volume_twist(m.algebroid.chart(), 1.0), samples_of(m), 1e-9).verdict,
            Verdict::Fail);
}

TEST(Twist, PullbackEquivalence) {
  const auto m = parse_model(kExplicitR5);
  const auto samples = samples_of(m);
  const auto v = reduce_by(m.algebroid, m.form, *m.quotient, samples, m.samples.box.center(), 1e-9);
  const auto& q = v.model();
  for (const auto& [coefficient, expected] :
       {std::pair{"-exp(x3)", Verdict::Pass}, std::pair{"exp(x3)", Verdict::Fail}, std::pair{"0", Verdict::Fail}}) {
    const auto total = check_twist(m.algebroid, m.form, twist_on(m.algebroid.chart(), coefficient), samples, 1e-9,
                                   &*m.quotient);
    const auto quotient = check_twist(q.algebroid, q.form, twist_on(q.algebroid.chart(), coefficient),
                                      base_samples(*m.quotient, samples), 1e-8);
    EXPECT_EQ(total.verdict, expected) << coefficient;
    EXPECT_EQ(quotient.verdict, expected) << coefficient;
  }
}

TEST(Twist, BaseOnlyWithQuotient) {
  const auto m = parse_model(kExplicitR5);
  const auto r = check_twist(m.algebroid, m.form, twist_on(m.algebroid.chart(), "-exp(x3) * (1 + x5^2)"),
                             samples_of(m), 1e-9, &*m.quotient);
  EXPECT_EQ(r.find("twist-base-only")->verdict, Verdict::Fail);
  EXPECT_EQ(check_twist(m.algebroid, m.form, twist_on(m.algebroid.chart(), "-exp(x3)"), samples_of(m), 1e-9,
                        &*m.quotient)
                .find("twist-base-only")
                ->verdict,
            Verdict::Pass);
}

TEST(DiracQuotient, LibermannIsPoisson) {
  const auto m = support::load("corpus/pass/libermann_r4.alg");
  const auto sv = dirac_quotient_report(m.algebroid, m.form, *m.quotient, TwistSpec::from_components(m.algebroid, m.form),
                                        samples_of(m), 1e-9);
  EXPECT_EQ(sv.classification, Classification::PoissonQuotientData) << render_text(sv.report);
}

TEST(DiracQuotient, SimpleDiracIsNotPoisson) {
  const auto m = support::load("corpus/pass/dirac_simple_r3.alg");
  const auto sv = dirac_quotient_report(m.algebroid, m.form, *m.quotient, TwistSpec::from_components(m.algebroid, m.form),
                                        samples_of(m), 1e-9);
  EXPECT_EQ(sv.classification, Classification::DiracQuotientData) << render_text(sv.report);
  EXPECT_EQ(sv.report.verdict, Verdict::Pass);
}

TEST(DiracQuotient, RankCountViolation) {
  const auto m = support::load("tests/data/mutants/rank_count.alg");
  const auto sv = dirac_quotient_report(m.algebroid, m.form, *m.quotient, TwistSpec::from_components(m.algebroid, m.form),
                                        samples_of(m), 1e-9);
  EXPECT_EQ(sv.classification, Classification::Neither);
  EXPECT_EQ(sv.report.find("rank-count")->verdict, Verdict::Fail);
}

TEST(ReducedPoisson, LibermannCanonical) {
  const auto m = support::load("corpus/pass/libermann_r4.alg");
  const auto samples = samples_of(m);
  const auto v = reduce_by(m.algebroid, m.form, *m.quotient, samples, m.samples.box.center(), 1e-9);
  const auto base = base_samples(*m.quotient, samples);
  const auto pr = reduced_poisson(v.model().algebroid, v.model().form, base, 1e-9);
  EXPECT_EQ(pr.report.verdict, Verdict::Pass) << render_text(pr.report);
  ASSERT_TRUE(pr.bivector.has_value());
  for (const auto& x : base) {
    EXPECT_NEAR(pr.bivector->get(0, 1).value(x), 1.0, 1e-12);
    EXPECT_NEAR(pr.bivector->get(1, 0).value(x), -1.0, 1e-12);
    EXPECT_EQ(poisson_jacobi_residual(*pr.bivector, x), 0.0);
  }
}

TEST(ReducedPoisson, KernelReducedConstant) {
  const auto m = support::load("corpus/pass/presymplectic_r3.alg");
  const auto samples = samples_of(m);
  const auto Q = QuotientSpec::from_names(m.algebroid, {"z"}, {"d_z"});
  const auto v = reduce_by(m.algebroid, m.form, Q, samples, m.samples.box.center(), 1e-9);
  const auto pr = reduced_poisson(v.model().algebroid, v.model().form, base_samples(Q, samples), 1e-9);
  ASSERT_TRUE(pr.bivector.has_value());
  EXPECT_TRUE(pr.bivector->get(0, 1).is_constant());
  EXPECT_EQ(*pr.bivector->get(0, 1).constant_value(), 1.0);
}

TEST(ReducedPoisson, SingularMu) {
  const auto m = support::load("corpus/fail/rank_jump.alg");
  try {
    poisson_at(m.algebroid, m.form, {0.0, 0.3});
    FAIL() << "expected SingularMu";
  } catch (const SingularMu& e) {
    EXPECT_EQ(e.point(), (std::vector<double>{0.0, 0.3}));
  }
  const auto pr = reduced_poisson(m.algebroid, m.form, {{0.5, 0.0}, {0.0, 0.3}}, 1e-9);
  EXPECT_EQ(pr.report.find("mu-invertible")->verdict, Verdict::Fail);
}

TEST(ReducedPoisson, HamiltonSign) {
  // pi(dq, dp) = 1 gives qdot = dH/dp and pdot = -dH/dq for H = p^2/2 + cos(q).
  const auto m = support::load("corpus/pass/symplectic_r2.alg");
  const Point x{0.4, -0.8};
  const auto P = poisson_at(m.algebroid, m.form, x);
  const double dHdq = -std::sin(x[0]), dHdp = x[1];
  const double qdot = P[0][0] * dHdq + P[0][1] * dHdp;
  const double pdot = P[1][0] * dHdq + P[1][1] * dHdp;
  EXPECT_DOUBLE_EQ(qdot, dHdp);
  EXPECT_DOUBLE_EQ(pdot, -dHdq);
}

TEST(Higher, VolumeR3) {
  const auto m = support::load("corpus/pass/volume_r3.alg");
  const auto Q = QuotientSpec::trivial(3, 3);
  const auto samples = samples_of(m);
  const auto v = reduce_by(m.algebroid, m.form, Q, samples, m.samples.box.center(), 1e-9);
  const auto sv = higher_quotient_report(m.algebroid, m.form, Q, &v.model(), samples, 1e-9);
  EXPECT_EQ(sv.classification, Classification::HigherPoisson) << render_text(sv.report);
}

TEST(Higher, VolumeR4AlongW) {
  const auto m = support::load("corpus/pass/volume_r4.alg");
  const auto Q = QuotientSpec::from_names(m.algebroid, {"w"}, {"d_w"});
  const auto samples = samples_of(m);
  const auto v = reduce_by(m.algebroid, m.form, Q, samples, m.samples.box.center(), 1e-9);
  const auto sv = higher_quotient_report(m.algebroid, m.form, Q, &v.model(), samples, 1e-9);
  EXPECT_EQ(sv.classification, Classification::HigherPoisson) << render_text(sv.report);
  EXPECT_LT(*sv.report.find("weakly-lagrangian")->residual, 1e-10);
}

TEST(Higher, MissingKernelSectionFails) {
  const auto m = support::load("tests/data/mutants/higher_kernel.alg");
  const auto samples = samples_of(m);
  const auto v = reduce_by(m.algebroid, m.form, *m.quotient, samples, m.samples.box.center(), 1e-9);
  const auto sv = higher_quotient_report(m.algebroid, m.form, *m.quotient,
                                         v.quotient_model ? &*v.quotient_model : nullptr, samples, 1e-9);
  EXPECT_EQ(sv.classification, Classification::Neither);
  EXPECT_EQ(sv.report.find("higher-kernel")->verdict, Verdict::Fail);
}

TEST(Properties, PoissonJacobiOnCorpus) {
  int checked = 0;
  for (const auto& rel : support::corpus_files("corpus/pass")) {
    const auto r = run_check(support::load(rel));
    if (!r.bivector || r.model.form.chi) continue;
    const auto& box = r.quotient_model ? r.quotient_model->algebroid.chart() : r.model.algebroid.chart();
    Box base = Box::uniform(box->dim());
    if (r.quotient)
      for (std::size_t i = 0; i < r.quotient->base_coords.size(); ++i)
        base.bounds[i] = r.model.samples.box.bounds[r.quotient->base_coords[i]];
    for (const auto& x : sample_points(base, 50, 7)) {
      EXPECT_LT(poisson_jacobi_residual(*r.bivector, x), 1e-9) << rel;
      const auto P = r.bivector->values(x);
      for (std::size_t a = 0; a < P.size(); ++a)
        for (std::size_t b = 0; b < P.size(); ++b) EXPECT_EQ(P[a][b], -P[b][a]) << rel;
    }
    ++checked;
  }
  EXPECT_GE(checked, 5);
}

TEST(Properties, DiracPairing) {
  int checked = 0;
  for (const auto& rel : support::corpus_files("corpus/pass")) {
    const auto r = run_check(support::load(rel));
    if (r.classification != Classification::DiracQuotientData && r.classification != Classification::PoissonQuotientData)
      continue;
    ASSERT_TRUE(r.quotient_model.has_value()) << rel;
    const auto base = base_samples(*r.quotient, r.samples);
    const auto& q = *r.quotient_model;
    EXPECT_EQ(check_lagrangian(q.algebroid, q.form, base, r.model.tolerances.tol, {}).verdict, Verdict::Pass) << rel;
    ASSERT_TRUE(r.presentation.has_value()) << rel;
    for (std::size_t s = 0; s < r.presentation->points.size(); ++s) {
      const auto& rho = r.presentation->anchors[s];
      const auto& mu = r.presentation->forms[s];
      for (std::size_t a = 0; a < rho.size(); ++a)
        for (std::size_t b = 0; b < rho.size(); ++b) {
          double pairing = 0.0;
          for (std::size_t i = 0; i < rho[a].size(); ++i) pairing += mu[a][i] * rho[b][i] + mu[b][i] * rho[a][i];
          EXPECT_LE(std::abs(pairing), r.model.tolerances.tol) << rel;
        }
    }
    ++checked;
  }
  EXPECT_GE(checked, 6);
}

TEST(Properties, HigherPoissonHasTrivialQuotientKernel) {
  int checked = 0;
  for (const auto& rel : support::corpus_files("corpus/pass")) {
    const auto r = run_check(support::load(rel));
    if (r.classification != Classification::HigherPoisson) continue;
    const auto& q = *r.quotient_model;
    for (const auto& x : base_samples(*r.quotient, r.samples)) {
      const TotalSpacePoint p{x, std::vector<double>(q.algebroid.rank(), 0.25)};
      EXPECT_TRUE(kernel_at(q.algebroid, q.form, p).kernel_basis.empty()) << rel;
    }
    ++checked;
  }
  EXPECT_EQ(checked, 2);
}
