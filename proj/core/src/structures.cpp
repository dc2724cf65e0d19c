#include "algred/structures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "algred/errors.hpp"

namespace algred {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::None: return "none";
    case Classification::Neither: return "neither";
    case Classification::DiracQuotientData: return "DiracQuotientData";
    case Classification::PoissonQuotientData: return "PoissonQuotientData";
    case Classification::HigherDirac: return "HigherDirac";
    case Classification::HigherPoisson: return "HigherPoisson";
  }
  return "?";
}

TwistSpec TwistSpec::from_components(const AlgebroidModel& A, const IMComponents& F) {
  TwistSpec T;
  T.chi = F.chi ? *F.chi : FormField(F.degree + 1, A.chart());
  return T;
}

CheckReport check_twist(const AlgebroidModel& A, const IMComponents& F, const TwistSpec& T,
                        const std::vector<Point>& samples, double tol, const QuotientSpec* Q) {
  validate(A, F);
  if (T.chi.degree() != F.degree + 1) throw DegreeMismatch("twist must have degree k+1");
  ResidualCheck eta("eta-twist", tol), closed("twist-closed", tol), base("twist-base-only", tol);
  const std::size_t n = A.dim();
  for (const auto& x : samples) {
    PointData d;
    FormJet chi;
    try {
      d = evaluate_point(A, &F, x);
      chi = eval_form(T.chi, x);
    } catch (const DomainError& e) {
      for (auto* c : {&eta, &closed, &base}) c->fail(x, e.what());
      continue;
    }
    for (std::size_t a = 0; a < d.r; ++a) eta.observe((d.eta[a] + interior(d.rho[a], chi)).max_abs_value(), x);
    closed.observe(exterior_derivative(chi).max_abs_value(), x);
    if (Q) {
      const auto& space = multi_indices(n, chi.degree);
      for (std::size_t s = 0; s < space.size(); ++s) {
        const auto& I = space.at(s);
        if (std::any_of(I.begin(), I.end(), [&](std::size_t i) { return Q->is_fiber(i); }))
          base.observe(std::abs(chi.coeffs[s].value()), x);
        for (auto y : Q->fiber_coords) base.observe(std::abs(chi.coeffs[s].gradient(y)), x);
      }
    }
  }
  CheckReport rep = CheckReport::leaf("twist", Verdict::Pass);
  rep.add(eta.finish());
  rep.add(closed.finish());
  rep.add(base.finish());
  return rep;
}

// ------------------------------------------------------------------ helpers

namespace {

Eigen::MatrixXd anchor_matrix(const PointData& d) {
  Eigen::MatrixXd R(static_cast<Eigen::Index>(d.n), static_cast<Eigen::Index>(d.r));
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t a = 0; a < d.r; ++a) R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) = d.rho[a].comps[i].value();
  return R;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& M, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), M.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = M.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Eigen::MatrixXd axes(std::size_t dim, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) E(static_cast<Eigen::Index>(idx[j]), static_cast<Eigen::Index>(j)) = 1.0;
  return E;
}

double clamp_distance(double d) { return std::isfinite(d) ? d : 1.0; }

// i_{d/dy} mu(e_a) for all fiber y and all a.
double annihilator_residual(const PointData& d, const QuotientSpec& Q) {
  double worst = 0.0;
  for (std::size_t a = 0; a < d.r; ++a) {
    if (d.mu[a].degree == 0) continue;
    for (auto y : Q.fiber_coords) {
      std::vector<double> e(d.n, 0.0);
      e[y] = 1.0;
      worst = std::max(worst, interior(VectorJet::constant(e), d.mu[a]).max_abs_value());
    }
  }
  return worst;
}

double equivariance_residual(const PointData& d, const QuotientSpec& Q) {
  double worst = 0.0;
  for (auto a : Q.invariant_sections)
    for (const auto& c : d.mu[a].coeffs)
      for (auto y : Q.fiber_coords) worst = std::max(worst, std::abs(c.gradient(y)));
  return worst;
}

void prefix_names(CheckReport& r, const std::string& prefix) {
  r.name = prefix + r.name;
  for (auto& c : r.children) prefix_names(c, prefix);
}

}  // namespace

DiracPresentation dirac_presentation(const AlgebroidModel& A, const IMComponents& F, const std::vector<Point>& samples) {
  DiracPresentation P;
  for (const auto& x : samples) {
    const PointData d = evaluate_point(A, &F, x);
    std::vector<std::vector<double>> an, fo;
    for (std::size_t a = 0; a < d.r; ++a) {
      an.push_back(d.rho[a].values());
      std::vector<double> c;
      for (const auto& j : d.mu[a].coeffs) c.push_back(j.value());
      fo.push_back(std::move(c));
    }
    P.points.push_back(x);
    P.anchors.push_back(std::move(an));
    P.forms.push_back(std::move(fo));
  }
  return P;
}

CheckReport check_lagrangian(const AlgebroidModel& A, const IMComponents& F, const std::vector<Point>& samples,
                             double tol, RankPolicy policy) {
  if (F.degree != 2) throw DegreeMismatch("lagrangian check needs an IM 2-form");
  ResidualCheck iso("isotropic", tol);
  CheckReport dim = CheckReport::leaf("graph-dimension", Verdict::Pass);
  dim.residual = 0.0;
  for (const auto& x : samples) {
    PointData d;
    try {
      d = evaluate_point(A, &F, x);
    } catch (const DomainError& e) {
      iso.fail(x, e.what());
      continue;
    }
    for (std::size_t a = 0; a < d.r; ++a)
      for (std::size_t b = a; b < d.r; ++b) {
        double v = 0.0;
        for (std::size_t i = 0; i < d.n; ++i)
          v += d.mu[a].coeffs[i].value() * d.rho[b].comps[i].value() + d.mu[b].coeffs[i].value() * d.rho[a].comps[i].value();
        iso.observe(std::abs(v), x);
      }
    Eigen::MatrixXd G(static_cast<Eigen::Index>(2 * d.n), static_cast<Eigen::Index>(d.r));
    for (std::size_t a = 0; a < d.r; ++a)
      for (std::size_t i = 0; i < d.n; ++i) {
        G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) = d.rho[a].comps[i].value();
        G(static_cast<Eigen::Index>(d.n + i), static_cast<Eigen::Index>(a)) = d.mu[a].coeffs[i].value();
      }
    const int rk = rank_and_kernel(G, policy).rank;
    if (rk != static_cast<int>(d.n) && dim.verdict == Verdict::Pass) {
      dim.verdict = Verdict::Fail;
      dim.witness = x;
      dim.residual = std::abs(rk - static_cast<int>(d.n));
      dim.notes.push_back("graph has dimension " + std::to_string(rk) + ", base has dimension " + std::to_string(d.n));
    }
  }
  CheckReport rep = CheckReport::leaf("lagrangian", Verdict::Pass);
  rep.add(iso.finish());
  rep.add(std::move(dim));
  return rep;
}

// ------------------------------------------------------------------ Dirac quotient data

StructureVerdict dirac_quotient_report(const AlgebroidModel& A, const IMComponents& F, const QuotientSpec& Q,
                                       const TwistSpec& T, const std::vector<Point>& samples, double tol,
                                       RankPolicy policy) {
  if (F.degree != 2) throw DegreeMismatch("Dirac quotient data needs an IM 2-form");
  StructureVerdict out;
  CheckReport rep = CheckReport::leaf("dirac-quotient", Verdict::Pass);
  rep.add(check_twist(A, F, T, samples, tol, &Q));

  ResidualCheck inter("kernel-intersection", tol), ann("image-annihilator", tol), eqv("equivariance", tol);
  bool kernel_equals_k = true;
  const std::size_t r = A.rank();
  const Eigen::MatrixXd K = axes(r, Q.kernel_sections);
  for (const auto& x : samples) {
    PointData d;
    try {
      d = evaluate_point(A, &F, x);
    } catch (const DomainError& e) {
      for (auto* c : {&inter, &ann, &eqv}) c->fail(x, e.what());
      kernel_equals_k = false;
      continue;
    }
    const Eigen::MatrixXd kmu = null_space(mu_matrix(d), policy);
    const Eigen::MatrixXd pre = null_space(rows_of(anchor_matrix(d), Q.base_coords), policy);
    inter.observe(clamp_distance(subspace_distance(intersect(kmu, pre, policy), K)), x);
    if (!(clamp_distance(subspace_distance(kmu, K)) <= tol)) kernel_equals_k = false;
    ann.observe(annihilator_residual(d, Q), x);
    eqv.observe(equivariance_residual(d, Q), x);
  }
  rep.add(inter.finish());

  CheckReport count = CheckReport::leaf("rank-count", Verdict::Pass);
  const long diff = static_cast<long>(Q.kernel_sections.size()) - (static_cast<long>(r) - static_cast<long>(Q.base_coords.size()));
  count.residual = static_cast<double>(std::labs(diff));
  if (diff != 0) {
    count.verdict = Verdict::Fail;
    count.notes.push_back("rk K = " + std::to_string(Q.kernel_sections.size()) + ", rk E - dim M~ = " +
                          std::to_string(static_cast<long>(r) - static_cast<long>(Q.base_coords.size())));
  }
  rep.add(std::move(count));
  rep.add(ann.finish());
  rep.add(eqv.finish());

  if (rep.verdict == Verdict::Pass) {
    out.classification = kernel_equals_k ? Classification::PoissonQuotientData : Classification::DiracQuotientData;
    rep.notes.push_back("weakly non-degenerate quotient");
    if (!kernel_equals_k) rep.notes.push_back("Ker(mu) != K: quotient is Dirac, not Poisson");
  } else {
    out.classification = Classification::Neither;
  }
  out.report = std::move(rep);
  return out;
}

// ------------------------------------------------------------------ Poisson

Expression Bivector::get(std::size_t m, std::size_t n) const {
  if (m == n) return Expression::constant(0.0, chart);
  auto it = coeffs.find({std::min(m, n), std::max(m, n)});
  if (it == coeffs.end()) return Expression::constant(0.0, chart);
  return m < n ? it->second : -it->second;
}

std::vector<std::vector<double>> Bivector::values(const Point& x) const {
  const std::size_t n = chart->dim();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (const auto& [key, e] : coeffs) {
    const double val = e.value(x);
    v[key.first][key.second] = val;
    v[key.second][key.first] = -val;
  }
  return v;
}

namespace {

using ExprMatrix = std::vector<std::vector<Expression>>;

Expression determinant(const ExprMatrix& M, const ChartPtr& chart) {
  const std::size_t n = M.size();
  if (n == 0) return Expression::constant(1.0, chart);
  if (n == 1) return M[0][0];
  if (n == 2) return M[0][0] * M[1][1] - M[0][1] * M[1][0];
  Expression det = Expression::constant(0.0, chart);
  for (std::size_t j = 0; j < n; ++j) {
    if (M[0][j].is_zero()) continue;
    ExprMatrix minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Expression> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(M[i][c]);
      minor.push_back(std::move(row));
    }
    const Expression term = M[0][j] * determinant(minor, chart);
    det = (j % 2) ? det - term : det + term;
  }
  return det;
}

Expression cofactor(const ExprMatrix& M, std::size_t i, std::size_t j, const ChartPtr& chart) {
  ExprMatrix minor;
  for (std::size_t a = 0; a < M.size(); ++a) {
    if (a == i) continue;
    std::vector<Expression> row;
    for (std::size_t b = 0; b < M.size(); ++b)
      if (b != j) row.push_back(M[a][b]);
    minor.push_back(std::move(row));
  }
  const Expression d = determinant(minor, chart);
  return ((i + j) % 2) ? -d : d;
}

void require_square_two_form(const AlgebroidModel& A, const IMComponents& F) {
  if (F.degree != 2) throw DegreeMismatch("Poisson structure needs an IM 2-form");
  if (A.rank() != A.dim()) throw DegreeMismatch("mu cannot be invertible: rank E != dim M");
}

}  // namespace

Bivector poisson_bivector(const AlgebroidModel& A, const IMComponents& F) {
  require_square_two_form(A, F);
  const std::size_t n = A.dim();
  const ChartPtr& chart = A.chart();
  ExprMatrix M(n, std::vector<Expression>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < n; ++i) M[a][i] = F.mu[a].get({i});
  const Expression det = determinant(M, chart);
  // (M^-1)_{l alpha} = cof(alpha, l) / det
  Bivector pi;
  pi.chart = chart;
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t l = m + 1; l < n; ++l) {
      Expression sum = Expression::constant(0.0, chart);
      for (std::size_t a = 0; a < n; ++a) {
        if (A.anchor(a, m).is_zero()) continue;
        sum = sum + cofactor(M, a, l, chart) * A.anchor(a, m);
      }
      const Expression entry = sum / det;
      if (!entry.is_zero()) pi.coeffs[{m, l}] = entry;
    }
  }
  return pi;
}

std::vector<std::vector<double>> poisson_at(const AlgebroidModel& A, const IMComponents& F, const Point& x,
                                            RankPolicy policy) {
  require_square_two_form(A, F);
  const PointData d = evaluate_point(A, &F, x);
  const Eigen::MatrixXd M = mu_matrix(d).transpose();  // rows alpha, cols coordinate
  if (rank_and_kernel(M, policy).rank < static_cast<int>(d.n)) throw SingularMu(x);
  const Eigen::MatrixXd Minv = M.inverse();
  const Eigen::MatrixXd R = anchor_matrix(d);
  // pi^{ml} = sum_alpha Minv(l, alpha) R(m, alpha)
  const Eigen::MatrixXd P = R * Minv.transpose();
  std::vector<std::vector<double>> out(d.n, std::vector<double>(d.n));
  for (std::size_t m = 0; m < d.n; ++m)
    for (std::size_t l = 0; l < d.n; ++l) out[m][l] = P(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l));
  return out;
}

double poisson_jacobi_residual(const Bivector& pi, const Point& x) {
  const std::size_t n = pi.chart->dim();
  std::vector<std::vector<Jet2>> J(n, std::vector<Jet2>(n, Jet2::constant(0.0, n)));
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t l = 0; l < n; ++l)
      if (m != l) J[m][l] = eval_jet2(pi.get(m, l), x);
  double worst = 0.0;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t a = m + 1; a < n; ++a)
      for (std::size_t p = a + 1; p < n; ++p) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l)
          s += J[l][m].value() * J[a][p].gradient(l) + J[l][a].value() * J[p][m].gradient(l) +
               J[l][p].value() * J[m][a].gradient(l);
        worst = std::max(worst, std::abs(s));
      }
  return worst;
}

PoissonResult reduced_poisson(const AlgebroidModel& A, const IMComponents& F, const std::vector<Point>& samples,
                              double tol, RankPolicy policy) {
  PoissonResult out;
  CheckReport rep = CheckReport::leaf("reduced-poisson", Verdict::Pass);
  if (F.degree != 2 || A.rank() != A.dim()) {
    CheckReport inv = CheckReport::leaf("mu-invertible", Verdict::Fail);
    inv.notes.push_back("rank E = " + std::to_string(A.rank()) + " but dim M = " + std::to_string(A.dim()));
    rep.add(std::move(inv));
    out.report = std::move(rep);
    return out;
  }
  CheckReport inv = CheckReport::leaf("mu-invertible", Verdict::Pass);
  inv.residual = 0.0;
  ResidualCheck skew("antisymmetry", tol), cons("bivector-consistency", tol);
  Bivector pi = poisson_bivector(A, F);
  for (const auto& x : samples) {
    std::vector<std::vector<double>> P;
    try {
      P = poisson_at(A, F, x, policy);
    } catch (const SingularMu& e) {
      if (inv.verdict == Verdict::Pass) {
        inv.verdict = Verdict::Fail;
        inv.witness = x;
        inv.notes.push_back(e.what());
      }
      continue;
    } catch (const DomainError& e) {
      if (inv.verdict == Verdict::Pass) {
        inv.verdict = Verdict::Fail;
        inv.witness = x;
        inv.notes.push_back(e.what());
      }
      continue;
    }
    const std::size_t n = P.size();
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m)
      for (std::size_t l = 0; l < n; ++l) s = std::max(s, std::abs(P[m][l] + P[l][m]));
    skew.observe(s, x);
    try {
      const auto V = pi.values(x);
      double c = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t l = 0; l < n; ++l) c = std::max(c, std::abs(V[m][l] - P[m][l]));
      cons.observe(c, x);
    } catch (const DomainError& e) {
      cons.fail(x, e.what());
    }
  }
  const bool invertible = inv.verdict == Verdict::Pass;
  rep.add(std::move(inv));
  if (!invertible) {
    rep.add(CheckReport::skipped("antisymmetry", "mu is singular"));
    rep.add(CheckReport::skipped("bivector-consistency", "mu is singular"));
    rep.add(CheckReport::skipped("poisson-jacobi", "mu is singular"));
    out.report = std::move(rep);
    return out;
  }
  rep.add(skew.finish());
  rep.add(cons.finish());
  const TwistSpec T = TwistSpec::from_components(A, F);
  if (T.chi.is_zero()) {
    ResidualCheck jac("poisson-jacobi", tol);
    for (const auto& x : samples) {
      try {
        jac.observe(poisson_jacobi_residual(pi, x), x);
      } catch (const DomainError& e) {
        jac.fail(x, e.what());
      }
    }
    rep.add(jac.finish());
  } else {
    rep.add(CheckReport::skipped("poisson-jacobi", "twisted; verified through the IM equations of the quotient"));
  }
  CheckReport im = im_residuals(A, F, samples, tol);
  prefix_names(im, "poisson-");
  rep.add(std::move(im));
  if (rep.verdict == Verdict::Pass) out.bivector = std::move(pi);
  out.report = std::move(rep);
  return out;
}

// ------------------------------------------------------------------ higher

StructureVerdict higher_quotient_report(const AlgebroidModel& A, const IMComponents& F, const QuotientSpec& Q,
                                        const QuotientData* quotient, const std::vector<Point>& samples, double tol,
                                        RankPolicy policy) {
  if (F.degree < 3) throw DegreeMismatch("higher quotient data needs degree >= 3");
  StructureVerdict out;
  CheckReport rep = CheckReport::leaf("higher-quotient", Verdict::Pass);
  ResidualCheck untw("untwisted", tol), hk("higher-kernel", tol), hks("higher-kernel-sharp", tol),
      ann("image-annihilator", tol);
  if (F.chi) untw.fail(samples.front(), "twisted higher forms are not supported");
  bool poisson = true;
  const std::size_t n = A.dim(), r = A.rank();
  const Eigen::MatrixXd K = axes(r, Q.kernel_sections);
  const Eigen::MatrixXd V = axes(n, Q.fiber_coords);
  for (const auto& x : samples) {
    PointData d;
    try {
      d = evaluate_point(A, &F, x);
    } catch (const DomainError& e) {
      for (auto* c : {&untw, &hk, &hks, &ann}) c->fail(x, e.what());
      poisson = false;
      continue;
    }
    double eta = 0.0;
    for (const auto& e : d.eta) eta = std::max(eta, e.max_abs_value());
    untw.observe(eta, x);
    const Eigen::MatrixXd R = anchor_matrix(d);
    const Eigen::MatrixXd kmu = null_space(mu_matrix(d), policy);
    const Eigen::MatrixXd ksharp = null_space(mu_sharp_matrix(d), policy);
    const Eigen::MatrixXd pre = null_space(rows_of(R, Q.base_coords), policy);
    hk.observe(clamp_distance(subspace_distance(intersect(kmu, pre, policy), K)), x);
    Eigen::MatrixXd span(static_cast<Eigen::Index>(n), kmu.cols() + V.cols());
    span << R * kmu, V;
    hks.observe(clamp_distance(subspace_distance(ksharp, orthonormal_columns(span, policy))), x);
    ann.observe(annihilator_residual(d, Q), x);
    if (!(clamp_distance(subspace_distance(kmu, K)) <= tol) || !(clamp_distance(subspace_distance(ksharp, V)) <= tol))
      poisson = false;
  }
  rep.add(untw.finish());
  rep.add(hk.finish());
  rep.add(hks.finish());
  rep.add(ann.finish());

  if (quotient && rep.verdict != Verdict::Pass) {
    for (const char* name : {"weakly-lagrangian", "tm-intersection", "injective"})
      rep.add(CheckReport::skipped(name, "kernel conditions on the total space did not pass"));
  } else if (quotient) {
    const auto bs = base_samples(Q, samples);
    const auto& qa = quotient->algebroid;
    const auto& qf = quotient->form;
    ResidualCheck wl("weakly-lagrangian", tol), tm("tm-intersection", tol), inj("injective", tol);
    for (const auto& x : bs) {
      PointData d;
      try {
        d = evaluate_point(qa, &qf, x);
      } catch (const DomainError& e) {
        for (auto* c : {&wl, &tm, &inj}) c->fail(x, e.what());
        continue;
      }
      double w = 0.0;
      for (std::size_t a = 0; a < d.r; ++a)
        for (std::size_t b = a; b < d.r; ++b)
          w = std::max(w, (interior(d.rho[a], d.mu[b]) + interior(d.rho[b], d.mu[a])).max_abs_value());
      wl.observe(w, x);
      const Eigen::MatrixXd R = anchor_matrix(d);
      const Eigen::MatrixXd kmu = null_space(mu_matrix(d), policy);
      const Eigen::MatrixXd ksharp = null_space(mu_sharp_matrix(d), policy);
      tm.observe(clamp_distance(subspace_distance(ksharp, orthonormal_columns(R * kmu, policy))), x);
      const Eigen::MatrixXd both = intersect(kmu, null_space(R, policy), policy);
      inj.observe(static_cast<double>(both.cols()), x);
    }
    rep.add(wl.finish());
    rep.add(tm.finish());
    rep.add(inj.finish());
  } else {
    rep.add(CheckReport::skipped("weakly-lagrangian", "no quotient model"));
  }

  if (rep.verdict == Verdict::Pass)
    out.classification = poisson ? Classification::HigherPoisson : Classification::HigherDirac;
  else
    out.classification = Classification::Neither;
  out.report = std::move(rep);
  return out;
}

}  // namespace algred
