#include "holelab/sparse_direct.hpp"

#include "holelab/errors.hpp"

#include <umfpack.h>

#include <sstream>

namespace holelab {

namespace {

void default_control(double* control) {
  umfpack_di_defaults(control);
  control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
  control[UMFPACK_ORDERING] = UMFPACK_ORDERING_AMD;
  control[UMFPACK_IRSTEP] = 2;
}

}  // namespace

SparseLU::SparseLU(const SparseMatrix& matrix) : matrix_(matrix) {
  matrix_.makeCompressed();
  if (matrix_.rows() != matrix_.cols()) throw SolverError("sparse LU needs a square matrix");
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  default_control(control);
  const int n = static_cast<int>(matrix_.rows());
  void* symbolic = nullptr;
  int status = umfpack_di_symbolic(n, n, matrix_.outerIndexPtr(), matrix_.innerIndexPtr(), matrix_.valuePtr(), &symbolic,
                                   control, info);
  if (status != UMFPACK_OK) {
    std::ostringstream os;
    os << "symbolic factorization failed (UMFPACK status " << status << ", n = " << n << ")";
    throw SolverError(os.str());
  }
  status = umfpack_di_numeric(matrix_.outerIndexPtr(), matrix_.innerIndexPtr(), matrix_.valuePtr(), symbolic, &numeric_,
                              control, info);
  umfpack_di_free_symbolic(&symbolic);
  rcond_ = info[UMFPACK_RCOND];
  if (status != UMFPACK_OK) {
    if (numeric_) umfpack_di_free_numeric(&numeric_);
    std::ostringstream os;
    os << "numeric factorization failed (UMFPACK status " << status
       << (status == UMFPACK_WARNING_singular_matrix ? ": singular matrix" : "") << ", n = " << n
       << ", pivot rcond = " << rcond_ << ", min |U_ii| = " << info[UMFPACK_UMIN] << ", max |U_ii| = " << info[UMFPACK_UMAX]
       << ")";
    throw SolverError(os.str());
  }
}

SparseLU::~SparseLU() {
  if (numeric_) umfpack_di_free_numeric(&numeric_);
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != matrix_.rows()) throw SolverError("right-hand side has the wrong length");
  Eigen::VectorXd x(rhs.size());
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  default_control(control);
  const int status = umfpack_di_solve(UMFPACK_A, matrix_.outerIndexPtr(), matrix_.innerIndexPtr(), matrix_.valuePtr(),
                                      x.data(), rhs.data(), numeric_, control, info);
  if (status != UMFPACK_OK) {
    std::ostringstream os;
    os << "triangular solve failed (UMFPACK status " << status << ", pivot rcond = " << rcond_ << ")";
    throw SolverError(os.str());
  }
  return x;
}

}  // namespace holelab
