#include "algred/forms.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "algred/errors.hpp"

namespace algred {

namespace {

void enumerate(std::size_t n, std::size_t k, std::size_t start, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    enumerate(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

MultiIndexSpace::MultiIndexSpace(std::size_t n, std::size_t k) : n_(n), k_(k) {
  if (k <= n) {
    MultiIndex cur;
    enumerate(n, k, 0, cur, list_);
  }
  for (std::size_t i = 0; i < list_.size(); ++i) ranks_.emplace(list_[i], i);
}

std::size_t MultiIndexSpace::rank(const MultiIndex& sorted) const {
  auto it = ranks_.find(sorted);
  if (it == ranks_.end()) throw std::out_of_range("multi-index not in space");
  return it->second;
}

const MultiIndexSpace& multi_indices(std::size_t n, std::size_t k) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<MultiIndexSpace>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{n, k}];
  if (!slot) slot = std::make_unique<MultiIndexSpace>(n, k);
  return *slot;
}

int sort_with_sign(MultiIndex& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  return sign;
}

// ------------------------------------------------------------------ FormField

FormField::FormField(std::size_t degree, ChartPtr chart) : degree_(degree), chart_(std::move(chart)) {}

void FormField::set(MultiIndex idx, const Expression& coeff) {
  if (idx.size() != degree_) throw DegreeMismatch("form index has wrong length");
  for (auto i : idx)
    if (!chart_ || i >= chart_->dim()) throw std::out_of_range("form index outside chart");
  const int sign = sort_with_sign(idx);
  if (sign == 0) throw std::invalid_argument("repeated index in form component");
  if (coeff.is_zero()) {
    coeffs_.erase(idx);
    return;
  }
  coeffs_[idx] = sign > 0 ? coeff : -coeff;
}

Expression FormField::get(const MultiIndex& sorted) const {
  auto it = coeffs_.find(sorted);
  if (it == coeffs_.end()) return Expression::constant(0.0, chart_);
  return it->second;
}

bool FormField::is_zero() const {
  for (const auto& [idx, e] : coeffs_)
    if (!e.is_zero()) return false;
  return true;
}

// ------------------------------------------------------------------ FormJet

FormJet FormJet::zero(std::size_t degree, std::size_t dim) {
  FormJet f;
  f.degree = degree;
  f.dim = dim;
  f.coeffs.assign(multi_indices(dim, degree).size(), Jet2::constant(0.0, dim));
  return f;
}

const Jet2& FormJet::at(const MultiIndex& sorted) const { return coeffs.at(multi_indices(dim, degree).rank(sorted)); }

double FormJet::max_abs_value() const {
  double m = 0.0;
  for (const auto& c : coeffs) m = std::max(m, std::abs(c.value()));
  return m;
}

FormJet& FormJet::operator+=(const FormJet& o) {
  if (degree != o.degree || dim != o.dim) throw DegreeMismatch("adding forms of different degree");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
  order = std::min(order, o.order);
  return *this;
}

FormJet& FormJet::operator-=(const FormJet& o) {
  if (degree != o.degree || dim != o.dim) throw DegreeMismatch("subtracting forms of different degree");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
  order = std::min(order, o.order);
  return *this;
}

FormJet operator*(const Jet2& f, const FormJet& a) {
  FormJet r = a;
  for (auto& c : r.coeffs) c = f * c;
  return r;
}

FormJet operator*(double s, const FormJet& a) {
  FormJet r = a;
  for (auto& c : r.coeffs) c *= s;
  return r;
}

VectorJet VectorJet::zero(std::size_t dim) {
  VectorJet v;
  v.comps.assign(dim, Jet2::constant(0.0, dim));
  return v;
}

VectorJet VectorJet::constant(const std::vector<double>& v) {
  VectorJet r;
  for (double x : v) r.comps.push_back(Jet2::constant(x, v.size()));
  return r;
}

std::vector<double> VectorJet::values() const {
  std::vector<double> v;
  for (const auto& c : comps) v.push_back(c.value());
  return v;
}

FormJet eval_form(const FormField& f, const Point& p) {
  FormJet r = FormJet::zero(f.degree(), p.size());
  const auto& space = multi_indices(p.size(), f.degree());
  for (const auto& [idx, e] : f.coeffs()) r.coeffs[space.rank(idx)] = eval_jet2(e, p);
  return r;
}

// ------------------------------------------------------------------ calculus

Jet2 directional(const VectorJet& X, const Jet2& f) {
  Jet2 r = Jet2::constant(0.0, f.dim());
  for (std::size_t j = 0; j < X.dim(); ++j) r += X.comps[j] * f.partial(j);
  return r;
}

VectorJet lie_bracket(const VectorJet& X, const VectorJet& Y) {
  VectorJet r;
  for (std::size_t i = 0; i < X.dim(); ++i) r.comps.push_back(directional(X, Y.comps[i]) - directional(Y, X.comps[i]));
  r.order = std::min(X.order, Y.order) - 1;
  return r;
}

FormJet exterior_derivative(const FormJet& a) {
  const std::size_t n = a.dim;
  FormJet r = FormJet::zero(a.degree + 1, n);
  const auto& target = multi_indices(n, a.degree + 1);
  const auto& source = multi_indices(n, a.degree);
  for (std::size_t t = 0; t < target.size(); ++t) {
    const MultiIndex& J = target.at(t);
    for (std::size_t p = 0; p < J.size(); ++p) {
      MultiIndex rest = J;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(p));
      Jet2 term = a.coeffs[source.rank(rest)].partial(J[p]);
      if (p % 2) r.coeffs[t] -= term;
      else r.coeffs[t] += term;
    }
  }
  r.order = a.order - 1;
  return r;
}

FormJet interior(const VectorJet& X, const FormJet& a) {
  if (a.degree == 0) throw DegreeMismatch("interior product of a 0-form");
  const std::size_t n = a.dim;
  FormJet r = FormJet::zero(a.degree - 1, n);
  const auto& target = multi_indices(n, a.degree - 1);
  const auto& source = multi_indices(n, a.degree);
  for (std::size_t t = 0; t < target.size(); ++t) {
    const MultiIndex& I = target.at(t);
    for (std::size_t j = 0; j < n; ++j) {
      if (std::find(I.begin(), I.end(), j) != I.end()) continue;
      MultiIndex full = I;
      auto pos = std::lower_bound(full.begin(), full.end(), j);
      const std::size_t p = static_cast<std::size_t>(pos - full.begin());
      full.insert(pos, j);
      const Jet2& c = a.coeffs[source.rank(full)];
      if (c.is_zero()) continue;
      if (p % 2) r.coeffs[t] -= X.comps[j] * c;
      else r.coeffs[t] += X.comps[j] * c;
    }
  }
  r.order = std::min(X.order, a.order);
  return r;
}

FormJet lie_derivative(const VectorJet& X, const FormJet& a) {
  FormJet r = interior(X, exterior_derivative(a));
  if (a.degree > 0) r += exterior_derivative(interior(X, a));
  r.order = std::min(X.order, a.order) - 1;
  return r;
}

double evaluate(const FormJet& a, const std::vector<std::vector<double>>& vectors) {
  if (vectors.size() != a.degree) throw ArityMismatch(a.degree, vectors.size());
  for (const auto& v : vectors)
    if (v.size() != a.dim) throw ArityMismatch(a.dim, v.size());
  if (a.degree == 0) return a.coeffs[0].value();
  const auto& space = multi_indices(a.dim, a.degree);
  const std::size_t k = a.degree;
  double total = 0.0;
  Eigen::MatrixXd m(k, k);
  for (std::size_t s = 0; s < space.size(); ++s) {
    const double c = a.coeffs[s].value();
    if (c == 0.0) continue;
    const MultiIndex& I = space.at(s);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t col = 0; col < k; ++col) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = vectors[col][I[r]];
    total += c * (k == 1 ? m(0, 0) : m.determinant());
  }
  return total;
}

FormCalculusValues form_calculus_values(const FormField& alpha, const Point& p,
                                        const std::vector<std::vector<double>>& vectors,
                                        const std::optional<std::vector<Expression>>& X) {
  const std::size_t k = alpha.degree();
  if (vectors.size() != k && vectors.size() != k + 1) throw ArityMismatch(k, vectors.size());
  if (X && vectors.size() != k) throw ArityMismatch(k, vectors.size());
  FormJet a = eval_form(alpha, p);
  FormCalculusValues out;
  if (vectors.size() == k) {
    out.alpha = evaluate(a, vectors);
    if (X) {
      if (X->size() != p.size()) throw ArityMismatch(p.size(), X->size());
      VectorJet xv;
      for (const auto& e : *X) xv.comps.push_back(eval_jet2(e, p));
      out.lie_alpha = evaluate(lie_derivative(xv, a), vectors);
    }
  } else {
    out.d_alpha = evaluate(exterior_derivative(a), vectors);
  }
  return out;
}

}  // namespace algred
