#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algred/algebroid.hpp"
#include "algred/quotient.hpp"
#include "algred/report.hpp"

namespace algred {

enum class Classification { None, Neither, DiracQuotientData, PoissonQuotientData, HigherDirac, HigherPoisson };

std::string_view to_string(Classification c);

// Candidate twist chi on the model chart; for a quotient it must be pulled
// back from the base, i.e. reference base coordinates only.
struct TwistSpec {
  FormField chi;
  bool pullback = true;

  // chi from a twisted model, otherwise the zero form of degree k+1.
  static TwistSpec from_components(const AlgebroidModel& A, const IMComponents& F);
};

CheckReport check_twist(const AlgebroidModel& A, const IMComponents& F, const TwistSpec& T,
                        const std::vector<Point>& samples, double tol, const QuotientSpec* Q = nullptr);

struct Bivector {
  ChartPtr chart;
  std::map<std::pair<std::size_t, std::size_t>, Expression> coeffs;  // m < n

  Expression get(std::size_t m, std::size_t n) const;
  std::vector<std::vector<double>> values(const Point& x) const;
};

struct DiracPresentation {
  std::vector<Point> points;
  std::vector<std::vector<std::vector<double>>> anchors;  // [sample][alpha][i]
  std::vector<std::vector<std::vector<double>>> forms;    // [sample][alpha][multi-index rank]
};

DiracPresentation dirac_presentation(const AlgebroidModel& A, const IMComponents& F, const std::vector<Point>& samples);

// Isotropy of the sampled graph and fiber dimension dim M (degree 2 only).
CheckReport check_lagrangian(const AlgebroidModel& A, const IMComponents& F, const std::vector<Point>& samples,
                             double tol, RankPolicy policy);

struct StructureVerdict {
  CheckReport report;
  Classification classification = Classification::Neither;
};

StructureVerdict dirac_quotient_report(const AlgebroidModel& A, const IMComponents& F, const QuotientSpec& Q,
                                       const TwistSpec& T, const std::vector<Point>& samples, double tol,
                                       RankPolicy policy = {});

// Symbolic pi^{ml} = sum_alpha (M^-1)_{l alpha} rho^m_alpha with M the matrix of mu.
Bivector poisson_bivector(const AlgebroidModel& A, const IMComponents& F);
// Pointwise solve; throws SingularMu.
std::vector<std::vector<double>> poisson_at(const AlgebroidModel& A, const IMComponents& F, const Point& x,
                                            RankPolicy policy = {});
// Cyclic Jacobiator of pi at x, max over index triples.
double poisson_jacobi_residual(const Bivector& pi, const Point& x);

struct PoissonResult {
  std::optional<Bivector> bivector;
  CheckReport report;
};

PoissonResult reduced_poisson(const AlgebroidModel& A, const IMComponents& F, const std::vector<Point>& samples,
                              double tol, RankPolicy policy = {});

StructureVerdict higher_quotient_report(const AlgebroidModel& A, const IMComponents& F, const QuotientSpec& Q,
                                        const QuotientData* quotient, const std::vector<Point>& samples, double tol,
                                        RankPolicy policy = {});

}  // namespace algred
