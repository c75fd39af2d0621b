#pragma once

#include <vector>

#include "gasket/field.hpp"
#include "gasket/graph.hpp"

namespace gasket {

struct DirichletSolveReport {
  Field solution;
  double residual_norm = 0.0;  // relative to the right-hand side
  int iterations = 0;
};

struct SolveOptions {
  double rel_tol = 1e-10;
  int max_iterations = 50000;
};

// Interior operator A = -Laplacian restricted to V_n \ V_0 (SPD, <= 5 nonzeros
// per row). Holds the interior index map so repeated solves share setup.
class InteriorLaplacian {
public:
  explicit InteriorLaplacian(const GasketGraph& g);

  const GasketGraph& graph() const { return *g_; }
  int size() const { return static_cast<int>(interior_.size()); }
  VertexId vertex_of(int row) const { return interior_[row]; }
  int row_of(VertexId v) const { return row_[v]; }  // -1 for corners

  void apply(const std::vector<double>& x, std::vector<double>& out) const;

  // Jacobi-preconditioned conjugate gradients; throws numerical_error on
  // non-convergence. Returns (iterations, relative residual).
  std::pair<int, double> solve(const std::vector<double>& rhs, std::vector<double>& x,
                               const SolveOptions& opt = {}) const;

private:
  const GasketGraph* g_;
  std::vector<VertexId> interior_;
  std::vector<int> row_;
  double scale_;  // 5^n
};

// Solve -Laplacian w = f on the interior with w(a_i) = b_i exactly.
// f is read at interior vertices only.
DirichletSolveReport solve_dirichlet(const GasketGraph& g, const Field& f,
                                     const std::array<double, 3>& b,
                                     const SolveOptions& opt = {});

struct EigenPair {
  double lambda = 0.0;
  Field field;  // orthonormal in <.,.>_n
};

// Smallest m eigenpairs of the interior operator -Laplacian^D, ascending,
// by inverse subspace iteration with Rayleigh-Ritz extraction.
std::vector<EigenPair> smallest_eigenpairs(const GasketGraph& g, int m,
                                           double residual_tol = 1e-8);

} // namespace gasket
