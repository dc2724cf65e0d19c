#include "algred/jet.hpp"

#include <cmath>
#include <stdexcept>

#include "algred/errors.hpp"

namespace algred {

namespace {

void require_same_dim(const Jet2& a, const Jet2& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("jet dimension mismatch");
}

}  // namespace

Jet2 Jet2::constant(double value, std::size_t dim) {
  Jet2 j;
  j.value_ = value;
  j.grad_.assign(dim, 0.0);
  j.hess_.assign(dim * (dim + 1) / 2, 0.0);
  return j;
}

Jet2 Jet2::variable(double value, std::size_t index, std::size_t dim) {
  Jet2 j = constant(value, dim);
  j.grad_.at(index) = 1.0;
  return j;
}

std::size_t Jet2::tri(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  const std::size_t n = grad_.size();
  return i * n - (i * (i + 1)) / 2 + j;
}

double Jet2::hessian(std::size_t i, std::size_t j) const { return hess_[tri(i, j)]; }

std::vector<std::vector<double>> Jet2::hessian_matrix() const {
  const std::size_t n = dim();
  std::vector<std::vector<double>> h(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h[i][j] = hessian(i, j);
  return h;
}

Jet2 Jet2::partial(std::size_t i) const {
  const std::size_t n = dim();
  Jet2 j = constant(grad_.at(i), n);
  for (std::size_t k = 0; k < n; ++k) j.grad_[k] = hessian(i, k);
  return j;
}

bool Jet2::is_zero() const {
  if (value_ != 0.0) return false;
  for (double g : grad_)
    if (g != 0.0) return false;
  for (double h : hess_)
    if (h != 0.0) return false;
  return true;
}

Jet2& Jet2::operator+=(const Jet2& o) {
  require_same_dim(*this, o);
  value_ += o.value_;
  for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] += o.grad_[i];
  for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] += o.hess_[i];
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& o) {
  require_same_dim(*this, o);
  value_ -= o.value_;
  for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] -= o.grad_[i];
  for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] -= o.hess_[i];
  return *this;
}

Jet2& Jet2::operator*=(double s) {
  value_ *= s;
  for (double& g : grad_) g *= s;
  for (double& h : hess_) h *= s;
  return *this;
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
  require_same_dim(a, b);
  const std::size_t n = a.dim();
  Jet2 r = Jet2::constant(a.value_ * b.value_, n);
  for (std::size_t i = 0; i < n; ++i) r.grad_[i] = a.grad_[i] * b.value_ + a.value_ * b.grad_[i];
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j, ++k) {
      r.hess_[k] = a.hess_[k] * b.value_ + a.value_ * b.hess_[k] + a.grad_[i] * b.grad_[j] +
                   a.grad_[j] * b.grad_[i];
    }
  }
  return r;
}

Jet2 operator/(const Jet2& a, const Jet2& b) {
  const double b0 = b.value();
  if (b0 == 0.0) throw DomainError("div");
  return a * b.compose(1.0 / b0, -1.0 / (b0 * b0), 2.0 / (b0 * b0 * b0));
}

Jet2 Jet2::compose(double f0, double f1, double f2) const {
  if (!std::isfinite(f0) || !std::isfinite(f1) || !std::isfinite(f2)) throw DomainError("overflow");
  const std::size_t n = dim();
  Jet2 r = constant(f0, n);
  for (std::size_t i = 0; i < n; ++i) r.grad_[i] = f1 * grad_[i];
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j, ++k) r.hess_[k] = f1 * hess_[k] + f2 * grad_[i] * grad_[j];
  return r;
}

Jet2 sin(const Jet2& g) {
  const double s = std::sin(g.value()), c = std::cos(g.value());
  return g.compose(s, c, -s);
}

Jet2 cos(const Jet2& g) {
  const double s = std::sin(g.value()), c = std::cos(g.value());
  return g.compose(c, -s, -c);
}

Jet2 exp(const Jet2& g) {
  const double e = std::exp(g.value());
  return g.compose(e, e, e);
}

Jet2 log(const Jet2& g) {
  const double v = g.value();
  if (!(v > 0.0)) throw DomainError("log");
  return g.compose(std::log(v), 1.0 / v, -1.0 / (v * v));
}

Jet2 sqrt(const Jet2& g) {
  const double v = g.value();
  if (!(v > 0.0)) throw DomainError("sqrt");
  const double s = std::sqrt(v);
  return g.compose(s, 0.5 / s, -0.25 / (s * v));
}

Jet2 pow(const Jet2& g, double c) {
  const double v = g.value();
  const bool integral = std::nearbyint(c) == c;
  if (!integral && !(v > 0.0)) throw DomainError("pow");
  if (integral && c < 0 && v == 0.0) throw DomainError("pow");
  if (c == 0.0) return Jet2::constant(1.0, g.dim());
  if (c == 1.0) return g;
  const double f0 = std::pow(v, c);
  const double f1 = c * std::pow(v, c - 1.0);
  const double f2 = c == 2.0 ? 2.0 : c * (c - 1.0) * std::pow(v, c - 2.0);
  return g.compose(f0, f1, f2);
}

Jet2 pow(const Jet2& g, const Jet2& h) {
  if (!(g.value() > 0.0)) throw DomainError("pow");
  return exp(h * log(g));
}

}  // namespace algred
