#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "algred/expr.hpp"
#include "algred/jet.hpp"

namespace algred {

using MultiIndex = std::vector<std::size_t>;

// Lexicographic enumeration of increasing k-subsets of {0..n-1}.
class MultiIndexSpace {
 public:
  MultiIndexSpace(std::size_t n, std::size_t k);
  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t size() const { return list_.size(); }
  const MultiIndex& at(std::size_t rank) const { return list_.at(rank); }
  std::size_t rank(const MultiIndex& sorted) const;
  const std::vector<MultiIndex>& all() const { return list_; }

 private:
  std::size_t n_, k_;
  std::vector<MultiIndex> list_;
  std::map<MultiIndex, std::size_t> ranks_;
};

// Shared cached instance; thread-safe.
const MultiIndexSpace& multi_indices(std::size_t n, std::size_t k);

// Sorts idx in place and returns the permutation sign, or 0 on a repeat.
int sort_with_sign(MultiIndex& idx);

// k-form with expression coefficients on sorted multi-indices.
class FormField {
 public:
  FormField() = default;
  FormField(std::size_t degree, ChartPtr chart);

  std::size_t degree() const { return degree_; }
  const ChartPtr& chart() const { return chart_; }
  const std::map<MultiIndex, Expression>& coeffs() const { return coeffs_; }

  // Unsorted indices are sorted with sign; repeated indices are rejected.
  void set(MultiIndex idx, const Expression& coeff);
  Expression get(const MultiIndex& sorted) const;
  bool is_zero() const;

 private:
  std::size_t degree_ = 0;
  ChartPtr chart_;
  std::map<MultiIndex, Expression> coeffs_;
};

// Pointwise value of a form with jets of its coefficients. `order` counts how
// many derivative levels of the coefficients are still exact (2 for fresh
// evaluations).
struct FormJet {
  std::size_t degree = 0;
  std::size_t dim = 0;
  std::vector<Jet2> coeffs;
  int order = 2;

  static FormJet zero(std::size_t degree, std::size_t dim);
  const Jet2& at(const MultiIndex& sorted) const;
  double max_abs_value() const;

  FormJet& operator+=(const FormJet& o);
  FormJet& operator-=(const FormJet& o);
  friend FormJet operator+(FormJet a, const FormJet& b) { return a += b; }
  friend FormJet operator-(FormJet a, const FormJet& b) { return a -= b; }
  friend FormJet operator*(const Jet2& f, const FormJet& a);
  friend FormJet operator*(double s, const FormJet& a);
};

struct VectorJet {
  std::vector<Jet2> comps;
  int order = 2;

  static VectorJet zero(std::size_t dim);
  static VectorJet constant(const std::vector<double>& v);
  std::size_t dim() const { return comps.size(); }
  std::vector<double> values() const;
};

FormJet eval_form(const FormField& f, const Point& p);

// X(f) for a jet f.
Jet2 directional(const VectorJet& X, const Jet2& f);
VectorJet lie_bracket(const VectorJet& X, const VectorJet& Y);

FormJet exterior_derivative(const FormJet& a);
FormJet interior(const VectorJet& X, const FormJet& a);
FormJet lie_derivative(const VectorJet& X, const FormJet& a);

// Alternating evaluation on `degree` tangent vectors.
double evaluate(const FormJet& a, const std::vector<std::vector<double>>& vectors);

struct FormCalculusValues {
  std::optional<double> alpha;
  std::optional<double> d_alpha;
  std::optional<double> lie_alpha;
};

// alpha(v..) if |vectors| = k, dalpha(v..) if |vectors| = k+1, and
// (L_X alpha)(v..) when X is given and |vectors| = k.
FormCalculusValues form_calculus_values(const FormField& alpha, const Point& p,
                                        const std::vector<std::vector<double>>& vectors,
                                        const std::optional<std::vector<Expression>>& X = std::nullopt);

}  // namespace algred
