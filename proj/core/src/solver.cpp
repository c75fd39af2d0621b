#include "gasket/solver.hpp"

#include <cmath>
#include <string>

#include "gasket/dense.hpp"
#include "gasket/errors.hpp"
#include "gasket/operators.hpp"
#include "gasket/rng.hpp"

namespace gasket {

InteriorLaplacian::InteriorLaplacian(const GasketGraph& g) : g_(&g) {
  row_.assign(g.vertex_count(), -1);
  interior_.reserve(g.interior_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.is_boundary(v)) continue;
    row_[v] = static_cast<int>(interior_.size());
    interior_.push_back(v);
  }
  scale_ = pow5(g.level());
}

void InteriorLaplacian::apply(const std::vector<double>& x, std::vector<double>& out) const {
  const GasketGraph& g = *g_;
  out.resize(interior_.size());
  for (std::size_t r = 0; r < interior_.size(); ++r) {
    const VertexId v = interior_[r];
    double s = g.degree(v) * x[r];
    for (const VertexId* y = g.neighbors_begin(v); y != g.neighbors_end(v); ++y) {
      const int ry = row_[*y];
      if (ry >= 0) s -= x[ry];
    }
    out[r] = scale_ * s;
  }
}

std::pair<int, double> InteriorLaplacian::solve(const std::vector<double>& rhs,
                                                std::vector<double>& x,
                                                const SolveOptions& opt) const {
  const std::size_t m = interior_.size();
  if (rhs.size() != m) throw validation_error("interior solve: rhs size mismatch");
  x.assign(m, 0.0);

  double bnorm = 0.0;
  for (double v : rhs) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return {0, 0.0};

  const GasketGraph& g = *g_;
  std::vector<double> inv_diag(m);
  for (std::size_t r = 0; r < m; ++r) inv_diag[r] = 1.0 / (scale_ * g.degree(interior_[r]));

  std::vector<double> r(rhs), z(m), p(m), q(m);
  for (std::size_t t = 0; t < m; ++t) z[t] = inv_diag[t] * r[t];
  p = z;
  double rz = 0.0;
  for (std::size_t t = 0; t < m; ++t) rz += r[t] * z[t];

  const double stop = opt.rel_tol * bnorm;
  int it = 0;
  double rnorm = bnorm;
  for (; it < opt.max_iterations; ++it) {
    apply(p, q);
    double pq = 0.0;
    for (std::size_t t = 0; t < m; ++t) pq += p[t] * q[t];
    if (pq <= 0.0) throw numerical_error("cg: operator lost positive-definiteness");
    const double alpha = rz / pq;
    rnorm = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      x[t] += alpha * p[t];
      r[t] -= alpha * q[t];
      rnorm += r[t] * r[t];
    }
    rnorm = std::sqrt(rnorm);
    if (rnorm <= stop) {
      ++it;
      break;
    }
    double rz_next = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      z[t] = inv_diag[t] * r[t];
      rz_next += r[t] * z[t];
    }
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t t = 0; t < m; ++t) p[t] = z[t] + beta * p[t];
  }
  const double rel = rnorm / bnorm;
  if (rel > opt.rel_tol)
    throw numerical_error("cg: no convergence after " + std::to_string(it) +
                          " iterations, relative residual " + std::to_string(rel));
  return {it, rel};
}

DirichletSolveReport solve_dirichlet(const GasketGraph& g, const Field& f,
                                     const std::array<double, 3>& b, const SolveOptions& opt) {
  require_same_level(g, f, "solve_dirichlet");
  for (double v : f.v)
    if (!std::isfinite(v)) throw validation_error("solve_dirichlet: non-finite right-hand side");

  InteriorLaplacian lap(g);
  const double scale = pow5(g.level());

  // move boundary values to the right-hand side
  std::vector<double> rhs(lap.size());
  Field bc = make_field(g);
  for (int i = 0; i < 3; ++i) bc[g.boundary()[i]] = b[i];
  for (int r = 0; r < lap.size(); ++r) {
    const VertexId v = lap.vertex_of(r);
    double s = f[v];
    for (const VertexId* y = g.neighbors_begin(v); y != g.neighbors_end(v); ++y)
      if (g.is_boundary(*y)) s += scale * bc[*y];
    rhs[r] = s;
  }

  std::vector<double> x;
  auto [iters, rel] = lap.solve(rhs, x, opt);

  DirichletSolveReport rep;
  rep.solution = bc;
  for (int r = 0; r < lap.size(); ++r) rep.solution[lap.vertex_of(r)] = x[r];
  rep.residual_norm = rel;
  rep.iterations = iters;
  return rep;
}

namespace {

// B-inner product <u,v>_n on interior coordinate vectors (uniform weights).
double dotw(const std::vector<double>& a, const std::vector<double>& b, double w) {
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) s += a[t] * b[t];
  return s * w;
}

} // namespace

std::vector<EigenPair> smallest_eigenpairs(const GasketGraph& g, int m, double residual_tol) {
  InteriorLaplacian lap(g);
  const int n_int = lap.size();
  if (m < 1 || m > n_int)
    throw validation_error("smallest_eigenpairs: need 1 <= m <= interior size");
  const double w = g.measure_weight();
  const int block = std::min(n_int, m + std::min(m, 6) + 2);

  Rng rng(0x5eed5eedULL);
  std::vector<std::vector<double>> X(block, std::vector<double>(n_int));
  for (auto& col : X)
    for (double& v : col) v = rng.normal();

  SolveOptions inner;
  inner.rel_tol = 1e-12;

  std::vector<double> evals(block, 0.0);
  std::vector<std::vector<double>> AX(block);
  const int max_outer = 400;
  for (int outer = 0; outer < max_outer; ++outer) {
    // X <- A^{-1} X
    for (int c = 0; c < block; ++c) {
      std::vector<double> sol;
      lap.solve(X[c], sol, inner);
      X[c] = std::move(sol);
    }
    // orthonormalize in <.,.>_n (modified Gram-Schmidt, twice for stability)
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < block; ++c) {
        for (int k = 0; k < c; ++k) {
          const double proj = dotw(X[c], X[k], w);
          for (int t = 0; t < n_int; ++t) X[c][t] -= proj * X[k][t];
        }
        const double nrm = std::sqrt(dotw(X[c], X[c], w));
        if (nrm < 1e-300) throw numerical_error("eigensolver: basis collapsed");
        for (int t = 0; t < n_int; ++t) X[c][t] /= nrm;
      }
    // Rayleigh-Ritz on the block
    for (int c = 0; c < block; ++c) {
      AX[c].resize(n_int);
      lap.apply(X[c], AX[c]);
    }
    DenseMatrix S(block, block);
    for (int a = 0; a < block; ++a)
      for (int b = a; b < block; ++b) {
        const double s = dotw(X[a], AX[b], w);
        S(a, b) = s;
        S(b, a) = s;
      }
    std::vector<double> theta;
    DenseMatrix Q;
    jacobi_eigensymm(S, theta, Q);
    std::vector<std::vector<double>> Y(block, std::vector<double>(n_int, 0.0));
    for (int c = 0; c < block; ++c)
      for (int a = 0; a < block; ++a) {
        const double q = Q(a, c);
        if (q == 0.0) continue;
        for (int t = 0; t < n_int; ++t) Y[c][t] += q * X[a][t];
      }
    X = std::move(Y);
    evals = theta;

    // residual check on the requested leading pairs
    bool done = true;
    for (int c = 0; c < m; ++c) {
      lap.apply(X[c], AX[0]);
      double rn = 0.0, xn = 0.0;
      for (int t = 0; t < n_int; ++t) {
        const double r = AX[0][t] - evals[c] * X[c][t];
        rn += r * r;
        xn += X[c][t] * X[c][t];
      }
      if (std::sqrt(rn) > residual_tol * std::sqrt(xn)) {
        done = false;
        break;
      }
    }
    if (done) break;
    if (outer == max_outer - 1)
      throw numerical_error("smallest_eigenpairs: no convergence");
  }

  std::vector<EigenPair> out;
  out.reserve(m);
  for (int c = 0; c < m; ++c) {
    EigenPair p;
    p.lambda = evals[c];
    p.field = make_field(g);
    for (int t = 0; t < n_int; ++t) p.field[lap.vertex_of(t)] = X[c][t];
    out.push_back(std::move(p));
  }
  return out;
}

} // namespace gasket
