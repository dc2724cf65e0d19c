#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "algred/expr.hpp"
#include "algred/forms.hpp"
#include "algred/linalg.hpp"
#include "algred/report.hpp"

namespace algred {

// Lie algebroid in a frame e_1..e_r over a single chart: anchor rho^i_a and
// structure functions C^c_ab with [e_a, e_b] = C^c_ab e_c.
class AlgebroidModel {
 public:
  AlgebroidModel() = default;
  AlgebroidModel(ChartPtr chart, std::vector<std::string> frame);

  static AlgebroidModel tangent(const ChartPtr& chart);

  const ChartPtr& chart() const { return chart_; }
  std::size_t dim() const { return chart_ ? chart_->dim() : 0; }
  std::size_t rank() const { return frame_.size(); }
  const std::vector<std::string>& frame() const { return frame_; }
  std::optional<std::size_t> frame_index(const std::string& label) const;

  const Expression& anchor(std::size_t a, std::size_t i) const { return anchor_.at(a).at(i); }
  void set_anchor(std::size_t a, std::size_t i, Expression e);

  // C^c_ab with antisymmetry applied; zero when a == b.
  Expression structure(std::size_t a, std::size_t b, std::size_t c) const;
  // Stores C^c_ab for a != b (C^c_ba gets the opposite sign).
  void set_structure(std::size_t a, std::size_t b, std::size_t c, const Expression& e);
  // Stored entries keyed {a, b, c} with a < b.
  const std::map<std::array<std::size_t, 3>, Expression>& structure_entries() const { return brackets_; }

 private:
  ChartPtr chart_;
  std::vector<std::string> frame_;
  std::vector<std::vector<Expression>> anchor_;
  std::map<std::array<std::size_t, 3>, Expression> brackets_;
};

// Components (mu, eta) of a linear k-form; eta either explicit or eta_chi.
struct IMComponents {
  std::size_t degree = 2;
  std::vector<FormField> mu;   // degree k-1 per frame element
  std::vector<FormField> eta;  // degree k per frame element (explicit mode)
  std::optional<FormField> chi;  // degree k+1 (twist mode)

  bool eta_from_twist() const { return chi.has_value(); }
  // Zero eta fields for every frame element.
  static IMComponents untwisted(std::size_t degree, const ChartPtr& chart, std::size_t rank);
};

struct TotalSpacePoint {
  Point base;
  std::vector<double> fiber;
};

// Jets of all structure data at one base point.
struct PointData {
  Point x;
  std::size_t n = 0, r = 0;
  std::size_t k = 0;  // form degree, 0 without a form
  std::vector<VectorJet> rho;  // rho(e_a)
  std::vector<Jet2> C;         // C^c_ab at (c * r + a) * r + b
  std::vector<FormJet> mu, eta;
  std::optional<FormJet> chi;

  const Jet2& structure(std::size_t c, std::size_t a, std::size_t b) const { return C[(c * r + a) * r + b]; }
};

PointData evaluate_point(const AlgebroidModel& A, const IMComponents* F, const Point& x);

// Coefficient jets f^a of a section sum f^a e_a.
using SectionJets = std::vector<Jet2>;
SectionJets frame_section(std::size_t a, std::size_t r, std::size_t n);
SectionJets eval_section(const std::vector<Expression>& coeffs, const Point& x);

VectorJet anchor_of(const PointData& d, const SectionJets& s);
SectionJets bracket_of(const PointData& d, const SectionJets& s1, const SectionJets& s2);
FormJet mu_of(const PointData& d, const SectionJets& s);
FormJet eta_of(const PointData& d, const SectionJets& s);

struct IMResidualForms {
  std::optional<FormJet> first;  // absent when mu has degree 0
  FormJet second;
  FormJet third;
};

IMResidualForms im_residual_forms(const PointData& d, const SectionJets& s1, const SectionJets& s2);

CheckReport check_algebroid_axioms(const AlgebroidModel& A, const std::vector<Point>& samples, double tol);

CheckReport im_residuals(const AlgebroidModel& A, const IMComponents& F, const std::vector<Point>& samples, double tol);

// Jacobiator component (cyclic sum) for frame triple (a,b,c), output index e.
double jacobi_residual(const PointData& d, std::size_t a, std::size_t b, std::size_t c, std::size_t e);

struct TangentE {
  std::vector<double> v;     // base part
  std::vector<double> udot;  // fiber part
};

double linear_form_value(const AlgebroidModel& A, const IMComponents& F, const TotalSpacePoint& pE,
                         const std::vector<TangentE>& tangents);

// The matrix of V -> i_V omega at (x,u) acting on (v, udot) in R^{n+r}.
Eigen::MatrixXd kernel_system(const PointData& d, const std::vector<double>& u);
LinearSubspaceResult kernel_at(const AlgebroidModel& A, const IMComponents& F, const TotalSpacePoint& pE,
                               RankPolicy policy = {});

// Coefficient matrix of mu: rows = multi-indices of degree k-1, cols = frame.
Eigen::MatrixXd mu_matrix(const PointData& d);
// mu^sharp: rows (a, J) with |J| = k-2, cols = coordinates.
Eigen::MatrixXd mu_sharp_matrix(const PointData& d);

void validate(const AlgebroidModel& A, const IMComponents& F);

}  // namespace algred
