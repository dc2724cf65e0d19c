#include "algred/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "algred/errors.hpp"

namespace algred {

Eigen::MatrixXd LinearSubspaceResult::kernel_matrix(Eigen::Index ambient) const {
  Eigen::MatrixXd K(ambient, static_cast<Eigen::Index>(kernel_basis.size()));
  for (std::size_t i = 0; i < kernel_basis.size(); ++i) K.col(static_cast<Eigen::Index>(i)) = kernel_basis[i];
  return K;
}

LinearSubspaceResult rank_and_kernel(const Eigen::MatrixXd& M, RankPolicy policy) {
  LinearSubspaceResult out;
  const Eigen::Index cols = M.cols();
  if (M.rows() == 0 || cols == 0) {
    out.singular_values = Eigen::VectorXd();
    for (Eigen::Index i = 0; i < cols; ++i) out.kernel_basis.push_back(Eigen::VectorXd::Unit(cols, i));
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() ? out.singular_values(0) : 0.0;
  out.tolerance_used = policy.relative * smax;
  if (smax > 0.0)
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
      if (out.singular_values(i) > out.tolerance_used) ++out.rank;
  const Eigen::MatrixXd& V = svd.matrixV();
  for (Eigen::Index i = out.rank; i < cols; ++i) out.kernel_basis.push_back(V.col(i));
  return out;
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& A, RankPolicy policy) {
  if (A.rows() == 0 || A.cols() == 0) return Eigen::MatrixXd(A.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  Eigen::Index r = 0;
  if (smax > 0.0)
    while (r < s.size() && s(r) > policy.relative * smax) ++r;
  return svd.matrixU().leftCols(r);
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& A, RankPolicy policy) {
  return rank_and_kernel(A, policy).kernel_matrix(A.cols());
}

Eigen::MatrixXd intersect(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V, RankPolicy policy) {
  if (U.cols() == 0 || V.cols() == 0) return Eigen::MatrixXd(U.rows(), 0);
  // x in both iff x = U a = V b.
  Eigen::MatrixXd stacked(U.rows(), U.cols() + V.cols());
  stacked << U, -V;
  Eigen::MatrixXd ker = null_space(stacked, policy);
  return orthonormal_columns(U * ker.topRows(U.cols()), policy);
}

double subspace_distance(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
  if (U.cols() != V.cols()) return std::numeric_limits<double>::infinity();
  if (U.cols() == 0) return 0.0;
  return std::max(containment_residual(U, V), containment_residual(V, U));
}

double containment_residual(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
  if (V.cols() == 0) return 0.0;
  Eigen::MatrixXd R = V;
  if (U.cols() > 0) R -= U * (U.transpose() * V);
  if (R.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  return svd.singularValues()(0);
}

std::vector<Jet2> solve_jets(std::vector<std::vector<Jet2>> A, std::vector<Jet2> b) {
  const std::size_t n = b.size();
  if (A.size() != n) throw std::invalid_argument("solve_jets: shape");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(A[r][col].value()) > std::abs(A[piv][col].value())) piv = r;
    if (A[piv][col].value() == 0.0) throw DomainError("singular system");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (A[r][col].is_zero()) continue;
      const Jet2 f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Jet2> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Jet2 s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= A[i][c] * x[c];
    x[i] = s / A[i][i];
  }
  return x;
}

}  // namespace algred
