#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace algred {

// Second-order Taylor data of a scalar field at a point: value, gradient and
// the upper triangle of the Hessian (row-major, i <= j).
class Jet2 {
 public:
  Jet2() = default;

  static Jet2 constant(double value, std::size_t dim);
  static Jet2 variable(double value, std::size_t index, std::size_t dim);

  std::size_t dim() const { return grad_.size(); }
  double value() const { return value_; }
  double gradient(std::size_t i) const { return grad_[i]; }
  std::span<const double> gradient() const { return grad_; }
  double hessian(std::size_t i, std::size_t j) const;
  std::vector<std::vector<double>> hessian_matrix() const;

  // Jet of the partial derivative d/dx^i. Its own Hessian is unknown and set
  // to zero, so it is only valid to first order.
  Jet2 partial(std::size_t i) const;

  bool is_zero() const;

  Jet2& operator+=(const Jet2& o);
  Jet2& operator-=(const Jet2& o);
  Jet2& operator*=(double s);

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
  friend Jet2 operator*(double s, Jet2 a) { return a *= s; }
  friend Jet2 operator-(Jet2 a) { return a *= -1.0; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b);
  friend Jet2 operator/(const Jet2& a, const Jet2& b);

  // Chain rule for f(g): given f(g0), f'(g0), f''(g0).
  Jet2 compose(double f0, double f1, double f2) const;

 private:
  std::size_t tri(std::size_t i, std::size_t j) const;

  double value_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

Jet2 sin(const Jet2& g);
Jet2 cos(const Jet2& g);
Jet2 exp(const Jet2& g);
Jet2 log(const Jet2& g);
Jet2 sqrt(const Jet2& g);
Jet2 pow(const Jet2& g, double exponent);
Jet2 pow(const Jet2& g, const Jet2& h);

}  // namespace algred
