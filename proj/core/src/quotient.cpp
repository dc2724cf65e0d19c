#include "algred/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "algred/errors.hpp"

namespace algred {

// ------------------------------------------------------------------ QuotientSpec

QuotientSpec QuotientSpec::make(std::size_t n, std::size_t r, std::vector<std::size_t> fiber,
                                std::vector<std::size_t> kernel) {
  QuotientSpec Q;
  std::sort(fiber.begin(), fiber.end());
  std::sort(kernel.begin(), kernel.end());
  if (std::adjacent_find(fiber.begin(), fiber.end()) != fiber.end()) throw std::invalid_argument("repeated fiber coordinate");
  if (std::adjacent_find(kernel.begin(), kernel.end()) != kernel.end()) throw std::invalid_argument("repeated kernel section");
  for (auto i : fiber)
    if (i >= n) throw std::out_of_range("fiber coordinate outside chart");
  for (auto a : kernel)
    if (a >= r) throw std::out_of_range("kernel section outside frame");
  Q.fiber_coords = fiber;
  Q.kernel_sections = kernel;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::binary_search(fiber.begin(), fiber.end(), i)) Q.base_coords.push_back(i);
  for (std::size_t a = 0; a < r; ++a)
    if (!std::binary_search(kernel.begin(), kernel.end(), a)) Q.invariant_sections.push_back(a);
  return Q;
}

QuotientSpec QuotientSpec::from_names(const AlgebroidModel& A, const std::vector<std::string>& fiber,
                                      const std::vector<std::string>& kernel) {
  std::vector<std::size_t> f, k;
  for (const auto& name : fiber) {
    auto i = A.chart()->index_of(name);
    if (!i) throw std::invalid_argument("unknown fiber coordinate '" + name + "'");
    f.push_back(*i);
  }
  for (const auto& label : kernel) {
    auto a = A.frame_index(label);
    if (!a) throw std::invalid_argument("unknown kernel section '" + label + "'");
    k.push_back(*a);
  }
  return make(A.dim(), A.rank(), f, k);
}

bool QuotientSpec::is_fiber(std::size_t coord) const {
  return std::binary_search(fiber_coords.begin(), fiber_coords.end(), coord);
}

bool QuotientSpec::is_kernel(std::size_t section) const {
  return std::binary_search(kernel_sections.begin(), kernel_sections.end(), section);
}

Point QuotientSpec::project(const Point& x) const {
  Point p;
  for (auto i : base_coords) p.push_back(x.at(i));
  return p;
}

const QuotientData& QuotientVerdict::model() const {
  if (!quotient_model) throw NotBasic("quotient data is not q-basic");
  return *quotient_model;
}

std::vector<Point> base_samples(const QuotientSpec& Q, const std::vector<Point>& samples) {
  std::vector<Point> out;
  std::set<Point> seen;
  for (const auto& x : samples) {
    Point p = Q.project(x);
    if (seen.insert(p).second) out.push_back(std::move(p));
  }
  return out;
}

// ------------------------------------------------------------------ basic checks

CheckReport check_algebroid_q_basic(const AlgebroidModel& A, const QuotientSpec& Q, const std::vector<Point>& samples,
                                    double tol) {
  ResidualCheck vert("anchor-kernel-vertical", tol), inv("anchor-invariant", tol), ideal("kernel-bracket", tol),
      brk("bracket-invariant", tol);
  const std::size_t r = A.rank();
  for (const auto& x : samples) {
    PointData d;
    try {
      d = evaluate_point(A, nullptr, x);
    } catch (const DomainError& e) {
      for (auto* c : {&vert, &inv, &ideal, &brk}) c->fail(x, e.what());
      continue;
    }
    for (auto k : Q.kernel_sections)
      for (auto i : Q.base_coords) vert.observe(std::abs(d.rho[k].comps[i].value()), x);
    for (auto a : Q.invariant_sections)
      for (auto i : Q.base_coords)
        for (auto y : Q.fiber_coords) inv.observe(std::abs(d.rho[a].comps[i].gradient(y)), x);
    for (auto k : Q.kernel_sections)
      for (std::size_t a = 0; a < r; ++a)
        for (auto b : Q.invariant_sections) ideal.observe(std::abs(d.structure(b, k, a).value()), x);
    for (auto a : Q.invariant_sections)
      for (auto b : Q.invariant_sections)
        for (auto c : Q.invariant_sections)
          for (auto y : Q.fiber_coords) brk.observe(std::abs(d.structure(c, a, b).gradient(y)), x);
  }
  CheckReport rep = CheckReport::leaf("algebroid-q-basic", Verdict::Pass);
  rep.add(vert.finish());
  rep.add(inv.finish());
  rep.add(ideal.finish());
  rep.add(brk.finish());
  return rep;
}

CheckReport check_form_q_basic(const AlgebroidModel& A, const IMComponents& F, const QuotientSpec& Q,
                               const std::vector<Point>& samples, double tol) {
  validate(A, F);
  ResidualCheck kmu("kernel-in-ker-mu", tol), keta("kernel-in-ker-eta", tol), hor("horizontal", tol),
      inv("invariant", tol);
  const std::size_t n = A.dim();
  for (const auto& x : samples) {
    PointData d;
    try {
      d = evaluate_point(A, &F, x);
    } catch (const DomainError& e) {
      for (auto* c : {&kmu, &keta, &hor, &inv}) c->fail(x, e.what());
      continue;
    }
    for (auto k : Q.kernel_sections) {
      kmu.observe(d.mu[k].max_abs_value(), x);
      keta.observe(d.eta[k].max_abs_value(), x);
    }
    for (auto a : Q.invariant_sections) {
      for (const FormJet* f : {&d.mu[a], &d.eta[a]}) {
        const auto& space = multi_indices(n, f->degree);
        for (std::size_t s = 0; s < space.size(); ++s) {
          const auto& I = space.at(s);
          const bool vertical = std::any_of(I.begin(), I.end(), [&](std::size_t i) { return Q.is_fiber(i); });
          if (vertical) {
            hor.observe(std::abs(f->coeffs[s].value()), x);
          } else {
            for (auto y : Q.fiber_coords) inv.observe(std::abs(f->coeffs[s].gradient(y)), x);
          }
        }
      }
    }
  }
  CheckReport rep = CheckReport::leaf("form-q-basic", Verdict::Pass);
  rep.add(kmu.finish());
  rep.add(keta.finish());
  rep.add(hor.finish());
  rep.add(inv.finish());
  return rep;
}

// ------------------------------------------------------------------ quotient model

namespace {

FormField restrict_form(const FormField& f, const QuotientSpec& Q, const ChartPtr& base,
                        const std::vector<CoordinateImage>& images) {
  FormField out(f.degree(), base);
  std::vector<std::size_t> new_index(images.size(), SIZE_MAX);
  for (std::size_t j = 0; j < Q.base_coords.size(); ++j) new_index[Q.base_coords[j]] = j;
  for (const auto& [idx, e] : f.coeffs()) {
    MultiIndex m;
    bool horizontal = true;
    for (auto i : idx) {
      if (new_index[i] == SIZE_MAX) {
        horizontal = false;
        break;
      }
      m.push_back(new_index[i]);
    }
    if (horizontal) out.set(m, rechart(e, base, images));
  }
  return out;
}

}  // namespace

QuotientData quotient_model(const AlgebroidModel& A, const IMComponents& F, const QuotientSpec& Q,
                            const Point& reference) {
  validate(A, F);
  if (reference.size() != A.dim()) throw ArityMismatch(A.dim(), reference.size());
  std::vector<std::string> names;
  for (auto i : Q.base_coords) names.push_back(A.chart()->name(i));
  const ChartPtr base = make_chart(names);
  std::vector<CoordinateImage> images(A.dim());
  for (std::size_t i = 0; i < A.dim(); ++i) images[i] = reference[i];
  for (std::size_t j = 0; j < Q.base_coords.size(); ++j) images[Q.base_coords[j]] = j;

  std::vector<std::string> frame;
  for (auto a : Q.invariant_sections) frame.push_back(A.frame()[a]);
  QuotientData q{AlgebroidModel(base, frame), IMComponents{}};
  const auto& inv = Q.invariant_sections;
  for (std::size_t al = 0; al < inv.size(); ++al)
    for (std::size_t j = 0; j < Q.base_coords.size(); ++j)
      q.algebroid.set_anchor(al, j, rechart(A.anchor(inv[al], Q.base_coords[j]), base, images));
  for (std::size_t al = 0; al < inv.size(); ++al)
    for (std::size_t be = al + 1; be < inv.size(); ++be)
      for (std::size_t ga = 0; ga < inv.size(); ++ga) {
        Expression c = rechart(A.structure(inv[al], inv[be], inv[ga]), base, images);
        if (!c.is_zero()) q.algebroid.set_structure(al, be, ga, c);
      }
  q.form.degree = F.degree;
  for (auto a : inv) q.form.mu.push_back(restrict_form(F.mu[a], Q, base, images));
  if (F.chi) {
    q.form.chi = restrict_form(*F.chi, Q, base, images);
  } else {
    for (auto a : inv) q.form.eta.push_back(restrict_form(F.eta[a], Q, base, images));
  }
  return q;
}

QuotientVerdict reduce_by(const AlgebroidModel& A, const IMComponents& F, const QuotientSpec& Q,
                          const std::vector<Point>& samples, const Point& reference, double tol) {
  QuotientVerdict v;
  v.algebroid_basic = check_algebroid_q_basic(A, Q, samples, tol);
  v.form_basic = check_form_q_basic(A, F, Q, samples, tol);
  if (v.algebroid_basic.passed() && v.form_basic.passed()) {
    try {
      v.quotient_model = quotient_model(A, F, Q, reference);
    } catch (const DomainError& e) {
      v.notes.push_back(std::string("substitution failed: ") + e.what());
    }
  } else {
    v.notes.push_back("not q-basic; no quotient model");
  }
  return v;
}

namespace {

void prefix_names(CheckReport& r, const std::string& prefix) {
  r.name = prefix + r.name;
  for (auto& c : r.children) prefix_names(c, prefix);
}

int numeric_rank(const Eigen::MatrixXd& M, RankPolicy policy) { return rank_and_kernel(M, policy).rank; }

}  // namespace

CheckReport quotient_properties(const AlgebroidModel& A, const QuotientSpec& Q, const QuotientData& q,
                                const std::vector<Point>& samples, double tol, RankPolicy policy) {
  CheckReport rep = CheckReport::leaf("quotient-model", Verdict::Pass);
  const auto bs = base_samples(Q, samples);
  CheckReport ax = check_algebroid_axioms(q.algebroid, bs, 10 * tol);
  CheckReport im = im_residuals(q.algebroid, q.form, bs, 10 * tol);
  prefix_names(ax, "quotient-");
  prefix_names(im, "quotient-");
  rep.add(std::move(ax));
  rep.add(std::move(im));

  // rank of the reduced anchor equals rank of the base rows of rho upstairs
  CheckReport rk = CheckReport::leaf("rank-formula", Verdict::Pass);
  rk.residual = 0.0;
  for (const auto& x : samples) {
    try {
      const PointData up = evaluate_point(A, nullptr, x);
      const PointData down = evaluate_point(q.algebroid, nullptr, Q.project(x));
      Eigen::MatrixXd top(static_cast<Eigen::Index>(Q.base_coords.size()), static_cast<Eigen::Index>(A.rank()));
      for (std::size_t j = 0; j < Q.base_coords.size(); ++j)
        for (std::size_t a = 0; a < A.rank(); ++a)
          top(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a)) = up.rho[a].comps[Q.base_coords[j]].value();
      Eigen::MatrixXd bot(static_cast<Eigen::Index>(down.n), static_cast<Eigen::Index>(down.r));
      for (std::size_t j = 0; j < down.n; ++j)
        for (std::size_t a = 0; a < down.r; ++a)
          bot(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a)) = down.rho[a].comps[j].value();
      const int r1 = numeric_rank(top, policy), r2 = numeric_rank(bot, policy);
      if (r1 != r2) {
        rk.verdict = Verdict::Fail;
        rk.residual = std::abs(r1 - r2);
        rk.witness = x;
        rk.notes.push_back("rank " + std::to_string(r1) + " upstairs vs " + std::to_string(r2) + " on the quotient");
        break;
      }
    } catch (const DomainError& e) {
      rk.verdict = Verdict::Fail;
      rk.witness = x;
      rk.notes.push_back(e.what());
      break;
    }
  }
  rep.add(std::move(rk));
  return rep;
}

// ------------------------------------------------------------------ kernel reduction

namespace {

// Indices of `count` well-conditioned columns of M (column-pivoted QR).
std::vector<std::size_t> pivot_columns(const Eigen::MatrixXd& M, std::size_t count) {
  std::vector<std::size_t> out;
  if (count == 0) return out;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  const auto& perm = qr.colsPermutation().indices();
  for (std::size_t i = 0; i < count; ++i) out.push_back(static_cast<std::size_t>(perm(static_cast<Eigen::Index>(i))));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::binary_search(s.begin(), s.end(), i)) out.push_back(i);
  return out;
}

std::vector<std::vector<Jet2>> mu_sharp_jets(const PointData& d) {
  std::vector<std::vector<Jet2>> S;
  const std::size_t km1 = d.k ? d.k - 1 : 0;
  if (km1 == 0) return S;
  const auto& Jspace = multi_indices(d.n, km1 - 1);
  const auto& full = multi_indices(d.n, km1);
  for (std::size_t a = 0; a < d.r; ++a) {
    for (const auto& J : Jspace.all()) {
      std::vector<Jet2> row;
      for (std::size_t j = 0; j < d.n; ++j) {
        MultiIndex idx = J;
        idx.insert(idx.begin(), j);
        const int sign = sort_with_sign(idx);
        if (sign == 0) row.push_back(Jet2::constant(0.0, d.n));
        else row.push_back(sign * d.mu[a].coeffs[full.rank(idx)]);
      }
      S.push_back(std::move(row));
    }
  }
  return S;
}

Eigen::MatrixXd values_of(const std::vector<std::vector<Jet2>>& S, std::size_t cols) {
  Eigen::MatrixXd M(static_cast<Eigen::Index>(S.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = S[i][j].value();
  return M;
}

double max_abs_vec(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Indicator subset whose span a basis (as columns) should coincide with.
std::vector<std::size_t> dominant_axes(const Eigen::MatrixXd& K) {
  std::vector<std::size_t> axes;
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    if (K.row(i).squaredNorm() > 0.5) axes.push_back(static_cast<std::size_t>(i));
  return axes;
}

Eigen::MatrixXd axis_basis(std::size_t dim, const std::vector<std::size_t>& axes) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(axes.size()));
  for (std::size_t j = 0; j < axes.size(); ++j) E(static_cast<Eigen::Index>(axes[j]), static_cast<Eigen::Index>(j)) = 1.0;
  return E;
}

std::string join_names(const std::vector<std::size_t>& idx, const std::vector<std::string>& names) {
  std::string s;
  for (auto i : idx) s += (s.empty() ? "" : " ") + names[i];
  return s.empty() ? "-" : s;
}

}  // namespace

KernelFrame kernel_frame(const std::vector<std::vector<Jet2>>& S, const Eigen::MatrixXd& K, RankPolicy policy) {
  const std::size_t n = static_cast<std::size_t>(K.rows());
  const std::size_t m = static_cast<std::size_t>(K.cols());
  KernelFrame kf;
  kf.pivots = pivot_columns(K.transpose(), m);
  const auto rest = complement(n, kf.pivots);
  std::vector<std::size_t> rows;
  if (!rest.empty()) {
    Eigen::MatrixXd SN(static_cast<Eigen::Index>(S.size()), static_cast<Eigen::Index>(rest.size()));
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = 0; j < rest.size(); ++j) SN(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = S[i][rest[j]].value();
    rows = pivot_columns(SN.transpose(), rest.size());
    (void)policy;
  }
  for (auto p : kf.pivots) {
    VectorJet v = VectorJet::zero(n);
    v.comps[p] = Jet2::constant(1.0, n);
    if (!rest.empty()) {
      std::vector<std::vector<Jet2>> sys;
      std::vector<Jet2> rhs;
      for (auto i : rows) {
        std::vector<Jet2> row;
        for (auto j : rest) row.push_back(S[i][j]);
        sys.push_back(std::move(row));
        rhs.push_back(-S[i][p]);
      }
      const auto c = solve_jets(sys, rhs);
      for (std::size_t j = 0; j < rest.size(); ++j) v.comps[rest[j]] = c[j];
    }
    kf.fields.push_back(std::move(v));
  }
  return kf;
}

double curvature_residual(const std::vector<std::vector<std::vector<Jet2>>>& gamma, const std::vector<VectorJet>& v,
                          const std::vector<std::vector<std::vector<double>>>& c) {
  const std::size_t m = v.size();
  if (m == 0 || gamma.empty()) return 0.0;
  const std::size_t b = gamma[0].size();
  double worst_entry = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t be = 0; be < b; ++be) {
        for (std::size_t al = 0; al < b; ++al) {
          double R = directional(v[i], gamma[j][be][al]).value() - directional(v[j], gamma[i][be][al]).value();
          for (std::size_t g = 0; g < b; ++g)
            R += gamma[i][be][g].value() * gamma[j][g][al].value() - gamma[j][be][g].value() * gamma[i][g][al].value();
          for (std::size_t k = 0; k < m; ++k) R -= c[i][j][k] * gamma[k][be][al].value();
          worst_entry = std::max(worst_entry, std::abs(R));
        }
      }
    }
  }
  return worst_entry;
}

KernelReduction kernel_reducibility_report(const AlgebroidModel& A, const IMComponents& F,
                                           const std::vector<Point>& samples, double tol, RankPolicy policy) {
  validate(A, F);
  if (F.degree < 2) throw DegreeMismatch("kernel reducibility needs degree >= 2");
  const std::size_t n = A.dim(), r = A.rank(), k = F.degree;
  KernelReduction out;
  CheckReport rep = CheckReport::leaf("kernel-reducibility", Verdict::Pass);

  CheckReport rank_mu = CheckReport::leaf("mu-rank-constant", Verdict::Pass);
  CheckReport rank_sharp = CheckReport::leaf("mu-sharp-rank-constant", Verdict::Pass);
  ResidualCheck contain("kernel-in-ker-eta", tol), invol("involutivity", tol), conn("connection", tol),
      flat("flat", tol), par("eta-parallel", tol);
  std::optional<int> r_mu, r_sharp;
  Point p_mu, p_sharp;
  bool eval_failed = false;

  std::vector<std::size_t> fiber_axes, kernel_axes;
  bool aligned = true;
  double worst_angle = 0.0;
  Point angle_witness;

  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Point& x = samples[s];
    PointData d;
    try {
      d = evaluate_point(A, &F, x);
    } catch (const DomainError& e) {
      eval_failed = true;
      for (auto* c : {&contain, &invol, &conn, &flat, &par}) c->fail(x, e.what());
      continue;
    }
    const Eigen::MatrixXd M = mu_matrix(d);
    const auto Sj = mu_sharp_jets(d);
    const Eigen::MatrixXd S = values_of(Sj, n);
    const auto kmu = rank_and_kernel(M, policy);
    const auto ksharp = rank_and_kernel(S, policy);

    auto track = [&](CheckReport& node, std::optional<int>& ref, Point& ref_point, int rank) {
      if (!ref) {
        ref = rank;
        ref_point = x;
      } else if (*ref != rank && node.verdict == Verdict::Pass) {
        node.verdict = Verdict::Indeterminate;
        node.witness = x;
        node.notes.push_back("rank " + std::to_string(*ref) + " at " + format_point(ref_point) + ", rank " +
                             std::to_string(rank) + " at " + format_point(x));
      }
    };
    track(rank_mu, r_mu, p_mu, kmu.rank);
    track(rank_sharp, r_sharp, p_sharp, ksharp.rank);

    const Eigen::MatrixXd Kmu = kmu.kernel_matrix(static_cast<Eigen::Index>(r));
    const Eigen::MatrixXd Ksharp = ksharp.kernel_matrix(static_cast<Eigen::Index>(n));

    // (3) Ker mu in Ker eta, Ker mu^sharp in Ker eta^sharp
    double c3 = 0.0;
    for (Eigen::Index c = 0; c < Kmu.cols(); ++c) {
      FormJet e = FormJet::zero(k, n);
      for (std::size_t a = 0; a < r; ++a) e += Kmu(static_cast<Eigen::Index>(a), c) * d.eta[a];
      c3 = std::max(c3, e.max_abs_value());
    }
    for (Eigen::Index c = 0; c < Ksharp.cols(); ++c) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = Ksharp(static_cast<Eigen::Index>(i), c);
      const VectorJet vj = VectorJet::constant(v);
      for (std::size_t a = 0; a < r; ++a) c3 = std::max(c3, interior(vj, d.eta[a]).max_abs_value());
    }
    contain.observe(c3, x);

    // (4) involutivity of Ker mu^sharp via a graph frame
    const KernelFrame kf = kernel_frame(Sj, Ksharp, policy);
    const std::size_t m = kf.fields.size();
    std::vector<std::vector<std::vector<double>>> cijk(m, std::vector<std::vector<double>>(m, std::vector<double>(m, 0.0)));
    double c4 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const auto w = lie_bracket(kf.fields[i], kf.fields[j]).values();
        std::vector<double> resid = w;
        for (std::size_t q = 0; q < m; ++q) {
          const double coef = w[kf.pivots[q]];
          cijk[i][j][q] = coef;
          cijk[j][i][q] = -coef;
          for (std::size_t l = 0; l < n; ++l) resid[l] -= coef * kf.fields[q].comps[l].value();
        }
        for (double t : resid) c4 = std::max(c4, std::abs(t));
      }
    }
    invol.observe(c4, x);

    // (5) i_v (dmu + eta)(e_a) lies in the image of mu
    std::vector<FormJet> dmu;
    for (std::size_t a = 0; a < r; ++a) dmu.push_back(exterior_derivative(d.mu[a]));
    if (k >= 3) {
      const Eigen::MatrixXd U = orthonormal_columns(M, policy);
      double c5 = 0.0;
      for (const auto& v : kf.fields) {
        for (std::size_t a = 0; a < r; ++a) {
          const FormJet beta = interior(v, dmu[a] + d.eta[a]);
          Eigen::VectorXd b(static_cast<Eigen::Index>(beta.coeffs.size()));
          for (std::size_t t = 0; t < beta.coeffs.size(); ++t) b(static_cast<Eigen::Index>(t)) = beta.coeffs[t].value();
          const Eigen::VectorXd res = U.cols() ? Eigen::VectorXd(b - U * (U.transpose() * b)) : b;
          c5 = std::max(c5, max_abs_vec(res));
        }
      }
      conn.observe(c5, x);
    }

    // (6) connection coefficients on a complement B of Ker mu, then curvature
    const auto frame_pivots = pivot_columns(Kmu.transpose(), static_cast<std::size_t>(Kmu.cols()));
    const auto B = complement(r, frame_pivots);
    if (!B.empty() && M.rows() > 0) {
      Eigen::MatrixXd MB(M.rows(), static_cast<Eigen::Index>(B.size()));
      for (std::size_t j = 0; j < B.size(); ++j) MB.col(static_cast<Eigen::Index>(j)) = M.col(static_cast<Eigen::Index>(B[j]));
      const auto rows = pivot_columns(MB.transpose(), B.size());
      // gamma[j][beta][alpha]
      std::vector<std::vector<std::vector<Jet2>>> gamma(
          m, std::vector<std::vector<Jet2>>(B.size(), std::vector<Jet2>(B.size(), Jet2::constant(0.0, n))));
      bool singular = false;
      for (std::size_t j = 0; j < m && !singular; ++j) {
        for (std::size_t al = 0; al < B.size(); ++al) {
          const FormJet rhs = interior(kf.fields[j], dmu[B[al]]);
          std::vector<std::vector<Jet2>> sys;
          std::vector<Jet2> b;
          for (auto row : rows) {
            std::vector<Jet2> line;
            for (auto be : B) line.push_back(d.mu[be].coeffs[row]);
            sys.push_back(std::move(line));
            b.push_back(rhs.coeffs[row]);
          }
          try {
            const auto sol = solve_jets(sys, b);
            for (std::size_t be = 0; be < B.size(); ++be) gamma[j][be][al] = sol[be];
          } catch (const DomainError&) {
            singular = true;
            break;
          }
        }
      }
      if (singular) {
        flat.fail(x, "connection system singular");
        par.fail(x, "connection system singular");
      } else {
        flat.observe(curvature_residual(gamma, kf.fields, cijk), x);
        double c7 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t al = 0; al < B.size(); ++al) {
            FormJet res = interior(kf.fields[j], exterior_derivative(d.eta[B[al]]));
            for (std::size_t be = 0; be < B.size(); ++be) res -= gamma[j][be][al] * d.eta[B[be]];
            c7 = std::max(c7, res.max_abs_value());
          }
        }
        par.observe(c7, x);
      }
    } else {
      flat.observe(0.0, x);
      par.observe(0.0, x);
    }

    // alignment with coordinate / frame axes
    if (s == 0) {
      fiber_axes = dominant_axes(Ksharp);
      kernel_axes = dominant_axes(Kmu);
    }
    const double a1 = subspace_distance(Ksharp, axis_basis(n, fiber_axes));
    const double a2 = subspace_distance(Kmu, axis_basis(r, kernel_axes));
    const double a = std::max(a1, a2);
    if (!(a <= tol)) aligned = false;
    if (s == 0 || a > worst_angle) {
      worst_angle = a;
      angle_witness = x;
    }
  }

  const bool ranks_ok = rank_mu.verdict == Verdict::Pass && rank_sharp.verdict == Verdict::Pass && !eval_failed;
  rank_mu.residual = 0.0;
  rank_sharp.residual = 0.0;
  CheckReport c3r = contain.finish(), c4r = invol.finish(), c5r = conn.finish(), c6r = flat.finish(),
              c7r = par.finish();
  rep.add(rank_mu);
  rep.add(rank_sharp);
  rep.add(c3r);
  if (!ranks_ok) {
    rep.add(CheckReport::skipped("involutivity", "rank is not constant"));
    rep.add(CheckReport::skipped("connection", "rank is not constant"));
    rep.add(CheckReport::skipped("flat", "rank is not constant"));
    rep.add(CheckReport::skipped("eta-parallel", "rank is not constant"));
    rep.add(CheckReport::skipped("alignment", "rank is not constant"));
    out.report = std::move(rep);
    return out;
  }
  rep.add(c4r);
  if (k == 2) rep.add(CheckReport::skipped("connection", "automatic for 2-forms"));
  else rep.add(c5r);
  const bool conn_ok = c4r.passed() && (k == 2 || c5r.passed());
  if (!conn_ok) {
    rep.add(CheckReport::skipped("flat", "requires involutivity and the connection condition"));
    rep.add(CheckReport::skipped("eta-parallel", "requires involutivity and the connection condition"));
  } else {
    rep.add(c6r);
    if (c3r.passed() && c6r.passed()) rep.add(c7r);
    else rep.add(CheckReport::skipped("eta-parallel", "requires containment and flatness"));
  }

  const bool all_ok = rep.verdict == Verdict::Pass;
  if (!all_ok) {
    rep.add(CheckReport::skipped("alignment", "not kernel-reducible"));
    out.report = std::move(rep);
    return out;
  }
  CheckReport al = CheckReport::leaf("alignment", Verdict::Pass);
  al.residual = worst_angle;
  al.witness = angle_witness;
  std::vector<std::string> frame_names = A.frame();
  if (aligned) {
    out.derived = QuotientSpec::make(n, r, fiber_axes, kernel_axes);
    al.notes.push_back("fiber = " + join_names(fiber_axes, A.chart()->names()) +
                       "; kernel = " + join_names(kernel_axes, frame_names));
    al.notes.push_back("leaves of Ker(mu^sharp) assumed connected; global integrability of the flat connection not checked");
  } else {
    al.verdict = Verdict::Indeterminate;
    std::ostringstream os;
    os << "not-adapted: largest principal-angle sine " << worst_angle;
    al.notes.push_back(os.str());
  }
  rep.add(std::move(al));
  out.report = std::move(rep);
  return out;
}

CheckReport check_kernel_dimension(std::string name, const AlgebroidModel& A, const IMComponents& F,
                                   const std::vector<TotalSpacePoint>& points, int expected, RankPolicy policy) {
  CheckReport rep = CheckReport::leaf(std::move(name), Verdict::Pass);
  int worst = 0;
  for (const auto& p : points) {
    Point full = p.base;
    full.insert(full.end(), p.fiber.begin(), p.fiber.end());
    try {
      const auto res = kernel_at(A, F, p, policy);
      const int dimk = static_cast<int>(res.kernel_basis.size());
      if (dimk != expected && rep.verdict == Verdict::Pass) {
        rep.verdict = Verdict::Fail;
        rep.witness = full;
        rep.notes.push_back("kernel dimension " + std::to_string(dimk) + ", expected " + std::to_string(expected));
      }
      worst = std::max(worst, std::abs(dimk - expected));
    } catch (const DomainError& e) {
      rep.verdict = Verdict::Fail;
      rep.witness = full;
      rep.notes.push_back(e.what());
      break;
    }
  }
  rep.residual = worst;
  return rep;
}

}  // namespace algred
