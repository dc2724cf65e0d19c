#include "algred/algebroid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "algred/errors.hpp"

namespace algred {

AlgebroidModel::AlgebroidModel(ChartPtr chart, std::vector<std::string> frame)
    : chart_(std::move(chart)), frame_(std::move(frame)) {
  for (std::size_t i = 0; i < frame_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (frame_[i] == frame_[j]) throw std::invalid_argument("duplicate frame label '" + frame_[i] + "'");
  anchor_.assign(frame_.size(), std::vector<Expression>(dim(), Expression::constant(0.0, chart_)));
}

AlgebroidModel AlgebroidModel::tangent(const ChartPtr& chart) {
  std::vector<std::string> frame;
  for (const auto& n : chart->names()) frame.push_back("d_" + n);
  AlgebroidModel A(chart, frame);
  for (std::size_t i = 0; i < chart->dim(); ++i) A.set_anchor(i, i, Expression::constant(1.0, chart));
  return A;
}

std::optional<std::size_t> AlgebroidModel::frame_index(const std::string& label) const {
  for (std::size_t i = 0; i < frame_.size(); ++i)
    if (frame_[i] == label) return i;
  return std::nullopt;
}

void AlgebroidModel::set_anchor(std::size_t a, std::size_t i, Expression e) { anchor_.at(a).at(i) = std::move(e); }

Expression AlgebroidModel::structure(std::size_t a, std::size_t b, std::size_t c) const {
  if (a == b) return Expression::constant(0.0, chart_);
  auto it = brackets_.find({std::min(a, b), std::max(a, b), c});
  if (it == brackets_.end()) return Expression::constant(0.0, chart_);
  return a < b ? it->second : -it->second;
}

void AlgebroidModel::set_structure(std::size_t a, std::size_t b, std::size_t c, const Expression& e) {
  if (a == b) throw std::invalid_argument("bracket of a frame element with itself is zero");
  if (a >= rank() || b >= rank() || c >= rank()) throw std::out_of_range("frame index");
  const std::array<std::size_t, 3> key{std::min(a, b), std::max(a, b), c};
  if (e.is_zero()) {
    brackets_.erase(key);
    return;
  }
  brackets_[key] = a < b ? e : -e;
}

IMComponents IMComponents::untwisted(std::size_t degree, const ChartPtr& chart, std::size_t rank) {
  IMComponents F;
  F.degree = degree;
  F.mu.assign(rank, FormField(degree - 1, chart));
  F.eta.assign(rank, FormField(degree, chart));
  return F;
}

void validate(const AlgebroidModel& A, const IMComponents& F) {
  if (F.degree < 1) throw DegreeMismatch("IM form degree must be at least 1");
  if (F.mu.size() != A.rank()) throw DegreeMismatch("mu needs one form per frame element");
  for (const auto& m : F.mu)
    if (m.degree() != F.degree - 1) throw DegreeMismatch("mu(e) must have degree k-1");
  if (F.chi) {
    if (F.chi->degree() != F.degree + 1) throw DegreeMismatch("twist must have degree k+1");
  } else {
    if (F.eta.size() != A.rank()) throw DegreeMismatch("eta needs one form per frame element");
    for (const auto& e : F.eta)
      if (e.degree() != F.degree) throw DegreeMismatch("eta(e) must have degree k");
  }
}

PointData evaluate_point(const AlgebroidModel& A, const IMComponents* F, const Point& x) {
  if (x.size() != A.dim()) throw ArityMismatch(A.dim(), x.size());
  PointData d;
  d.x = x;
  d.n = A.dim();
  d.r = A.rank();
  d.rho.resize(d.r);
  for (std::size_t a = 0; a < d.r; ++a)
    for (std::size_t i = 0; i < d.n; ++i) d.rho[a].comps.push_back(eval_jet2(A.anchor(a, i), x));
  d.C.assign(d.r * d.r * d.r, Jet2::constant(0.0, d.n));
  for (const auto& [key, e] : A.structure_entries()) {
    const auto [a, b, c] = key;
    Jet2 j = eval_jet2(e, x);
    d.C[(c * d.r + a) * d.r + b] = j;
    d.C[(c * d.r + b) * d.r + a] = -j;
  }
  if (F) {
    d.k = F->degree;
    for (const auto& m : F->mu) d.mu.push_back(eval_form(m, x));
    if (F->chi) {
      d.chi = eval_form(*F->chi, x);
      for (std::size_t a = 0; a < d.r; ++a) d.eta.push_back(-1.0 * interior(d.rho[a], *d.chi));
    } else {
      for (const auto& e : F->eta) d.eta.push_back(eval_form(e, x));
    }
  }
  return d;
}

SectionJets frame_section(std::size_t a, std::size_t r, std::size_t n) {
  SectionJets s(r, Jet2::constant(0.0, n));
  s.at(a) = Jet2::constant(1.0, n);
  return s;
}

SectionJets eval_section(const std::vector<Expression>& coeffs, const Point& x) {
  SectionJets s;
  for (const auto& c : coeffs) s.push_back(eval_jet2(c, x));
  return s;
}

VectorJet anchor_of(const PointData& d, const SectionJets& s) {
  VectorJet v = VectorJet::zero(d.n);
  for (std::size_t a = 0; a < d.r; ++a) {
    if (s[a].is_zero()) continue;
    for (std::size_t i = 0; i < d.n; ++i) v.comps[i] += s[a] * d.rho[a].comps[i];
  }
  return v;
}

SectionJets bracket_of(const PointData& d, const SectionJets& f, const SectionJets& g) {
  const VectorJet rf = anchor_of(d, f), rg = anchor_of(d, g);
  SectionJets h(d.r, Jet2::constant(0.0, d.n));
  for (std::size_t c = 0; c < d.r; ++c) {
    for (std::size_t a = 0; a < d.r; ++a) {
      if (f[a].is_zero()) continue;
      for (std::size_t b = 0; b < d.r; ++b) {
        if (g[b].is_zero() || d.structure(c, a, b).is_zero()) continue;
        h[c] += f[a] * g[b] * d.structure(c, a, b);
      }
    }
    h[c] += directional(rf, g[c]) - directional(rg, f[c]);
  }
  return h;
}

namespace {
FormJet combine(const std::vector<FormJet>& forms, const SectionJets& s, std::size_t degree, std::size_t n) {
  FormJet out = FormJet::zero(degree, n);
  for (std::size_t a = 0; a < forms.size(); ++a)
    if (!s[a].is_zero()) out += s[a] * forms[a];
  return out;
}

double max_abs(const FormJet& f) { return f.max_abs_value(); }
}  // namespace

FormJet mu_of(const PointData& d, const SectionJets& s) { return combine(d.mu, s, d.k ? d.k - 1 : 0, d.n); }

FormJet eta_of(const PointData& d, const SectionJets& s) {
  return combine(d.eta, s, d.k, d.n);
}

IMResidualForms im_residual_forms(const PointData& d, const SectionJets& s1, const SectionJets& s2) {
  const VectorJet r1 = anchor_of(d, s1), r2 = anchor_of(d, s2);
  const FormJet m1 = mu_of(d, s1), m2 = mu_of(d, s2);
  const FormJet e1 = eta_of(d, s1), e2 = eta_of(d, s2);
  const SectionJets br = bracket_of(d, s1, s2);
  IMResidualForms out;
  if (m1.degree > 0) out.first = interior(r1, m2) + interior(r2, m1);
  out.second = mu_of(d, br) - lie_derivative(r1, m2) + interior(r2, exterior_derivative(m1)) + interior(r2, e1);
  out.third = eta_of(d, br) - lie_derivative(r1, e2) + interior(r2, exterior_derivative(e1));
  return out;
}

double jacobi_residual(const PointData& d, std::size_t a, std::size_t b, std::size_t c, std::size_t e) {
  const std::size_t idx[3][3] = {{a, b, c}, {b, c, a}, {c, a, b}};
  double sum = 0.0;
  for (const auto& t : idx) {
    const std::size_t p = t[0], q = t[1], s = t[2];
    for (std::size_t m = 0; m < d.r; ++m) sum += d.structure(m, p, q).value() * d.structure(e, m, s).value();
    const Jet2& Cpq = d.structure(e, p, q);
    for (std::size_t i = 0; i < d.n; ++i) sum -= d.rho[s].comps[i].value() * Cpq.gradient(i);
  }
  return sum;
}

CheckReport check_algebroid_axioms(const AlgebroidModel& A, const std::vector<Point>& samples, double tol) {
  if (samples.empty()) throw std::invalid_argument("no sample points");
  ResidualCheck jac("jacobi", tol), anc("anchor-morphism", tol);
  const std::size_t r = A.rank(), n = A.dim();
  for (const auto& x : samples) {
    PointData d;
    try {
      d = evaluate_point(A, nullptr, x);
    } catch (const DomainError& e) {
      jac.fail(x, e.what());
      anc.fail(x, e.what());
      continue;
    }
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = a + 1; b < r; ++b)
        for (std::size_t c = b + 1; c < r; ++c)
          for (std::size_t e = 0; e < r; ++e) jac.observe(std::abs(jacobi_residual(d, a, b, c, e)), x);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = a + 1; b < r; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
          double v = 0.0;
          for (std::size_t c = 0; c < r; ++c) v += d.rho[c].comps[i].value() * d.structure(c, a, b).value();
          for (std::size_t j = 0; j < n; ++j) {
            v += d.rho[b].comps[j].value() * d.rho[a].comps[i].gradient(j);
            v -= d.rho[a].comps[j].value() * d.rho[b].comps[i].gradient(j);
          }
          anc.observe(std::abs(v), x);
        }
      }
    }
  }
  CheckReport rep = CheckReport::leaf("algebroid-axioms", Verdict::Pass);
  rep.add(jac.finish());
  rep.add(anc.finish());
  return rep;
}

CheckReport im_residuals(const AlgebroidModel& A, const IMComponents& F, const std::vector<Point>& samples, double tol) {
  validate(A, F);
  if (samples.empty()) throw std::invalid_argument("no sample points");
  ResidualCheck c1("im-i", tol), c2("im-ii", tol), c3("im-iii", tol);
  const std::size_t r = A.rank(), n = A.dim();
  for (const auto& x : samples) {
    PointData d;
    try {
      d = evaluate_point(A, &F, x);
    } catch (const DomainError& e) {
      c1.fail(x, e.what());
      c2.fail(x, e.what());
      c3.fail(x, e.what());
      continue;
    }
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = 0; b < r; ++b) {
        const auto res = im_residual_forms(d, frame_section(a, r, n), frame_section(b, r, n));
        if (res.first) c1.observe(max_abs(*res.first), x);
        c2.observe(max_abs(res.second), x);
        c3.observe(max_abs(res.third), x);
      }
    }
  }
  CheckReport rep = CheckReport::leaf("im-equations", Verdict::Pass);
  if (F.degree == 1) rep.add(CheckReport::skipped("im-i", "mu has degree 0"));
  else rep.add(c1.finish());
  rep.add(c2.finish());
  rep.add(c3.finish());
  if (F.eta_from_twist()) rep.notes.push_back("eta = -i_rho chi");
  return rep;
}

double linear_form_value(const AlgebroidModel& A, const IMComponents& F, const TotalSpacePoint& pE,
                         const std::vector<TangentE>& tangents) {
  validate(A, F);
  const std::size_t k = F.degree, n = A.dim(), r = A.rank();
  if (tangents.size() != k) throw ArityMismatch(k, tangents.size());
  if (pE.fiber.size() != r) throw ArityMismatch(r, pE.fiber.size());
  for (const auto& t : tangents)
    if (t.v.size() != n || t.udot.size() != r) throw ArityMismatch(n + r, t.v.size() + t.udot.size());
  const PointData d = evaluate_point(A, &F, pE.base);
  double total = 0.0;
  std::vector<std::vector<double>> base;
  for (const auto& t : tangents) base.push_back(t.v);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t l = 0; l < k; ++l) {
      const double ud = tangents[l].udot[a];
      if (ud == 0.0) continue;
      std::vector<std::vector<double>> rest = base;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(l));
      total += (l % 2 ? -1.0 : 1.0) * ud * evaluate(d.mu[a], rest);
    }
    if (pE.fiber[a] != 0.0)
      total += pE.fiber[a] * evaluate(exterior_derivative(d.mu[a]) + d.eta[a], base);
  }
  return total;
}

namespace {
std::vector<double> unit(std::size_t n, std::size_t i) {
  std::vector<double> v(n, 0.0);
  v[i] = 1.0;
  return v;
}
}  // namespace

Eigen::MatrixXd mu_matrix(const PointData& d) {
  const std::size_t km1 = d.k ? d.k - 1 : 0;
  const auto& space = multi_indices(d.n, km1);
  Eigen::MatrixXd M(static_cast<Eigen::Index>(space.size()), static_cast<Eigen::Index>(d.r));
  for (std::size_t a = 0; a < d.r; ++a)
    for (std::size_t s = 0; s < space.size(); ++s)
      M(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) = d.mu[a].coeffs[s].value();
  return M;
}

Eigen::MatrixXd mu_sharp_matrix(const PointData& d) {
  const std::size_t km1 = d.k ? d.k - 1 : 0;
  if (km1 == 0) return Eigen::MatrixXd(0, static_cast<Eigen::Index>(d.n));
  const auto& space = multi_indices(d.n, km1 - 1);
  Eigen::MatrixXd S(static_cast<Eigen::Index>(d.r * space.size()), static_cast<Eigen::Index>(d.n));
  for (std::size_t a = 0; a < d.r; ++a) {
    for (std::size_t s = 0; s < space.size(); ++s) {
      std::vector<std::vector<double>> vecs(1);
      for (auto j : space.at(s)) vecs.push_back(unit(d.n, j));
      for (std::size_t j = 0; j < d.n; ++j) {
        vecs[0] = unit(d.n, j);
        S(static_cast<Eigen::Index>(a * space.size() + s), static_cast<Eigen::Index>(j)) = evaluate(d.mu[a], vecs);
      }
    }
  }
  return S;
}

Eigen::MatrixXd kernel_system(const PointData& d, const std::vector<double>& u) {
  const std::size_t n = d.n, r = d.r;
  const Eigen::MatrixXd S = mu_sharp_matrix(d);
  const std::size_t km1 = d.k ? d.k - 1 : 0;
  const auto& rows2 = multi_indices(n, km1);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(S.rows() + static_cast<Eigen::Index>(rows2.size()), static_cast<Eigen::Index>(n + r));
  M.topLeftCorner(S.rows(), static_cast<Eigen::Index>(n)) = S;
  std::vector<FormJet> closed;
  for (std::size_t a = 0; a < r; ++a) closed.push_back(exterior_derivative(d.mu[a]) + d.eta[a]);
  for (std::size_t s = 0; s < rows2.size(); ++s) {
    const Eigen::Index row = S.rows() + static_cast<Eigen::Index>(s);
    std::vector<std::vector<double>> vecs(1);
    for (auto j : rows2.at(s)) vecs.push_back(unit(n, j));
    for (std::size_t j = 0; j < n; ++j) {
      vecs[0] = unit(n, j);
      double v = 0.0;
      for (std::size_t a = 0; a < r; ++a)
        if (u[a] != 0.0) v += u[a] * evaluate(closed[a], vecs);
      M(row, static_cast<Eigen::Index>(j)) = v;
    }
    for (std::size_t a = 0; a < r; ++a)
      M(row, static_cast<Eigen::Index>(n + a)) = d.mu[a].coeffs[s].value();
  }
  return M;
}

LinearSubspaceResult kernel_at(const AlgebroidModel& A, const IMComponents& F, const TotalSpacePoint& pE,
                               RankPolicy policy) {
  validate(A, F);
  if (pE.fiber.size() != A.rank()) throw ArityMismatch(A.rank(), pE.fiber.size());
  const PointData d = evaluate_point(A, &F, pE.base);
  return rank_and_kernel(kernel_system(d, pE.fiber), policy);
}

}  // namespace algred
