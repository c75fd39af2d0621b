#include "gasket/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gasket/errors.hpp"
#include "gasket/operators.hpp"
#include "gasket/solver.hpp"

namespace gasket {

DenseMatrix dense_interior_laplacian(const GasketGraph& g) {
  InteriorLaplacian lap(g);
  const int m = lap.size();
  const double scale = pow5(g.level());
  DenseMatrix a(m, m);
  for (int r = 0; r < m; ++r) {
    const VertexId v = lap.vertex_of(r);
    a(r, r) = scale * g.degree(v);
    for (const VertexId* y = g.neighbors_begin(v); y != g.neighbors_end(v); ++y) {
      const int c = lap.row_of(*y);
      if (c >= 0) a(r, c) = -scale;
    }
  }
  return a;
}

std::vector<double> cholesky_solve(DenseMatrix a, std::vector<double> rhs) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(rhs.size()) != n)
    throw validation_error("cholesky_solve: shape mismatch");
  // in-place lower factor
  for (int k = 0; k < n; ++k) {
    double d = a(k, k);
    for (int t = 0; t < k; ++t) d -= a(k, t) * a(k, t);
    if (d <= 0.0) throw numerical_error("cholesky_solve: matrix not positive definite");
    const double lkk = std::sqrt(d);
    a(k, k) = lkk;
    for (int r = k + 1; r < n; ++r) {
      double s = a(r, k);
      for (int t = 0; t < k; ++t) s -= a(r, t) * a(k, t);
      a(r, k) = s / lkk;
    }
  }
  // forward then backward substitution
  for (int r = 0; r < n; ++r) {
    double s = rhs[r];
    for (int t = 0; t < r; ++t) s -= a(r, t) * rhs[t];
    rhs[r] = s / a(r, r);
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int t = r + 1; t < n; ++t) s -= a(t, r) * rhs[t];
    rhs[r] = s / a(r, r);
  }
  return rhs;
}

void jacobi_eigensymm(DenseMatrix a, std::vector<double>& eigenvalues, DenseMatrix& eigenvectors) {
  const int n = a.rows();
  if (a.cols() != n) throw validation_error("jacobi_eigensymm: matrix not square");
  DenseMatrix v(n, n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-28 * (n * n)) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    if (sweep == max_sweeps - 1) throw numerical_error("jacobi_eigensymm: no convergence");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
  eigenvalues.resize(n);
  eigenvectors = DenseMatrix(n, n);
  for (int c = 0; c < n; ++c) {
    eigenvalues[c] = a(order[c], order[c]);
    for (int r = 0; r < n; ++r) eigenvectors(r, c) = v(r, order[c]);
  }
}

std::vector<double> symmetric_expm_apply(const std::vector<double>& eigenvalues,
                                         const DenseMatrix& eigenvectors, double t,
                                         const std::vector<double>& v) {
  const int n = eigenvectors.rows();
  std::vector<double> coeff(n, 0.0);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) coeff[c] += eigenvectors(r, c) * v[r];
  std::vector<double> out(n, 0.0);
  for (int c = 0; c < n; ++c) {
    const double f = std::exp(t * eigenvalues[c]) * coeff[c];
    for (int r = 0; r < n; ++r) out[r] += f * eigenvectors(r, c);
  }
  return out;
}

} // namespace gasket
