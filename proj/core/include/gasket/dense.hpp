#pragma once

#include <vector>

#include "gasket/graph.hpp"

namespace gasket {

// Small dense helpers backing the oracle routes (direct factorization is
// reserved for low levels) and the verification suite.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return a_[std::size_t(r) * cols_ + c]; }
  double operator()(int r, int c) const { return a_[std::size_t(r) * cols_ + c]; }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

// Dense -Laplacian^D on the interior, rows/cols in interior order.
DenseMatrix dense_interior_laplacian(const GasketGraph& g);

// Cholesky solve of an SPD system (in place copies; throws numerical_error
// if the matrix is not positive definite).
std::vector<double> cholesky_solve(DenseMatrix a, std::vector<double> rhs);

// Cyclic Jacobi eigendecomposition of a symmetric matrix; eigenvalues
// ascending, eigenvectors as columns of the returned matrix.
void jacobi_eigensymm(DenseMatrix a, std::vector<double>& eigenvalues, DenseMatrix& eigenvectors);

// exp(t * M) v for symmetric M given its eigendecomposition.
std::vector<double> symmetric_expm_apply(const std::vector<double>& eigenvalues,
                                         const DenseMatrix& eigenvectors, double t,
                                         const std::vector<double>& v);

} // namespace gasket
