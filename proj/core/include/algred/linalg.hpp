#pragma once

#include <Eigen/Dense>
#include <vector>

#include "algred/jet.hpp"

namespace algred {

struct RankPolicy {
  double relative = 1e-8;
};

struct LinearSubspaceResult {
  int rank = 0;
  std::vector<Eigen::VectorXd> kernel_basis;
  Eigen::VectorXd singular_values;
  double tolerance_used = 0.0;

  // Kernel basis as columns (cols x dim).
  Eigen::MatrixXd kernel_matrix(Eigen::Index ambient) const;
};

LinearSubspaceResult rank_and_kernel(const Eigen::MatrixXd& M, RankPolicy policy = {});

// Orthonormal basis (as columns) of the column space of A.
Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& A, RankPolicy policy = {});

// Orthonormal basis of {x : A x = 0} as columns.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& A, RankPolicy policy = {});

// Intersection of two column spans given by orthonormal bases.
Eigen::MatrixXd intersect(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V, RankPolicy policy = {});

// Sine of the largest principal angle between two orthonormal bases of equal
// dimension; +inf when the dimensions differ.
double subspace_distance(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V);

// max over columns of V of the distance to span(U) (containment span V in span U).
double containment_residual(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V);

// Solves A x = b with jet entries by Gaussian elimination with partial pivoting
// on the values. A is square and row-major.
std::vector<Jet2> solve_jets(std::vector<std::vector<Jet2>> A, std::vector<Jet2> b);

}  // namespace algred
