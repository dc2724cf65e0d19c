#pragma once

#include <optional>
#include <string>
#include <vector>

#include "algred/algebroid.hpp"
#include "algred/linalg.hpp"
#include "algred/report.hpp"

namespace algred {

// Adapted splitting: chart = fiber (y) + base coordinates, frame = kernel +
// invariant sections. All index lists are sorted.
struct QuotientSpec {
  std::vector<std::size_t> fiber_coords;
  std::vector<std::size_t> base_coords;
  std::vector<std::size_t> kernel_sections;
  std::vector<std::size_t> invariant_sections;

  static QuotientSpec make(std::size_t n, std::size_t r, std::vector<std::size_t> fiber,
                           std::vector<std::size_t> kernel);
  static QuotientSpec from_names(const AlgebroidModel& A, const std::vector<std::string>& fiber,
                                 const std::vector<std::string>& kernel);
  static QuotientSpec trivial(std::size_t n, std::size_t r) { return make(n, r, {}, {}); }

  bool is_fiber(std::size_t coord) const;
  bool is_kernel(std::size_t section) const;
  bool is_trivial() const { return fiber_coords.empty() && kernel_sections.empty(); }

  Point project(const Point& x) const;
  bool operator==(const QuotientSpec&) const = default;
};

struct QuotientData {
  AlgebroidModel algebroid;
  IMComponents form;
};

struct QuotientVerdict {
  CheckReport algebroid_basic;
  CheckReport form_basic;
  std::optional<QuotientData> quotient_model;
  std::vector<std::string> notes;

  // Throws NotBasic when either basic check did not pass.
  const QuotientData& model() const;
};

CheckReport check_algebroid_q_basic(const AlgebroidModel& A, const QuotientSpec& Q, const std::vector<Point>& samples,
                                    double tol);
CheckReport check_form_q_basic(const AlgebroidModel& A, const IMComponents& F, const QuotientSpec& Q,
                               const std::vector<Point>& samples, double tol);

// Substitutes y := reference fiber values into base data of invariant sections.
// Does not check basicness.
QuotientData quotient_model(const AlgebroidModel& A, const IMComponents& F, const QuotientSpec& Q,
                            const Point& reference);

// Runs both basic checks and builds the quotient when they pass.
QuotientVerdict reduce_by(const AlgebroidModel& A, const IMComponents& F, const QuotientSpec& Q,
                          const std::vector<Point>& samples, const Point& reference, double tol);

// Distinct projections of the samples to the base chart, in sample order.
std::vector<Point> base_samples(const QuotientSpec& Q, const std::vector<Point>& samples);

// Axioms, IM residuals and the rank formula for the quotient model.
CheckReport quotient_properties(const AlgebroidModel& A, const QuotientSpec& Q, const QuotientData& q,
                                const std::vector<Point>& samples, double tol, RankPolicy policy);

struct KernelReduction {
  CheckReport report;
  std::optional<QuotientSpec> derived;
};

KernelReduction kernel_reducibility_report(const AlgebroidModel& A, const IMComponents& F,
                                           const std::vector<Point>& samples, double tol, RankPolicy policy = {});

// kernel_at dimension equals `expected` at every total-space point.
CheckReport check_kernel_dimension(std::string name, const AlgebroidModel& A, const IMComponents& F,
                                   const std::vector<TotalSpacePoint>& points, int expected, RankPolicy policy);

// Curvature of the connection with matrices gamma[j] (|B| x |B| jets,
// gamma[j][beta][alpha]) along frame fields v_j with structure c[i][j][k].
double curvature_residual(const std::vector<std::vector<std::vector<Jet2>>>& gamma, const std::vector<VectorJet>& v,
                          const std::vector<std::vector<std::vector<double>>>& c);

// Graph frame of a constant-rank kernel: one field per pivot coordinate.
struct KernelFrame {
  std::vector<std::size_t> pivots;  // coordinates with unit component
  std::vector<VectorJet> fields;
};
KernelFrame kernel_frame(const std::vector<std::vector<Jet2>>& S, const Eigen::MatrixXd& kernel_basis,
                         RankPolicy policy);

}  // namespace algred
