#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace holelab {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Sparse LU factorization (UMFPACK) with fixed AMD ordering. The factor is
/// immutable after construction; solve() may be called concurrently.
class SparseLU {
public:
  /// Throws SolverError with UMFPACK status and reciprocal pivot condition
  /// when the matrix is singular or the factorization fails.
  explicit SparseLU(const SparseMatrix& matrix);
  ~SparseLU();
  SparseLU(const SparseLU&) = delete;
  SparseLU& operator=(const SparseLU&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  int rows() const { return static_cast<int>(matrix_.rows()); }
  /// Reciprocal condition estimate from the pivots (min/max |U_ii|).
  double rcond() const { return rcond_; }
  const SparseMatrix& matrix() const { return matrix_; }

private:
  SparseMatrix matrix_;
  void* numeric_ = nullptr;
  double rcond_ = 0.0;
};

}  // namespace holelab
