#pragma once

#include "gasket/field.hpp"
#include "gasket/graph.hpp"

namespace gasket {

// pow(5, n), pow(5/3, n), pow(3, -n) without drift; n <= 12 keeps all of these
// exactly representable.
double pow5(int n);
double pow53(int n);
double pow3inv(int n);

// <u, v>_n = 3^-n sum_x u(x) v(x)
double inner_product(const GasketGraph& g, const Field& u, const Field& v);

// Discrete Laplacian at every vertex (corners included):
// (L u)(x) = 5^n sum_{y ~ x} [u(y) - u(x)]
Field apply_laplacian(const GasketGraph& g, const Field& u);

// Dirichlet variant: zero at the three corners.
Field apply_laplacian_dirichlet(const GasketGraph& g, const Field& u);

// E_n(u, v) = (5/3)^n sum_{<xy>} (u(y)-u(x)) (v(y)-v(x))
double dirichlet_form(const GasketGraph& g, const Field& u, const Field& v);

// Harmonic extension of a coarse field (level m <= n) onto g: the coarse
// values are kept and every refinement fills edge midpoints with the
// (2*sigma - opposite)/5 rule, which adds no energy.
Field harmonic_extension(const GasketGraph& g, const Field& coarse);

// The harmonic function determined by corner values (b0, b1, b2).
Field harmonic_function(const GasketGraph& g, double b0, double b1, double b2);

// d^i_n u = (5/3)^n sum_{y ~ a_i} [u(y) - u(a_i)]   (flux into the domain)
double normal_derivative(const GasketGraph& g, const Field& u, int corner);

// Defect of the discrete Green identity
//   <u, L^D v>_n - <v, L^D u>_n + sum_i [u(a_i) d^i_n v - v(a_i) d^i_n u],
// identically zero up to rounding with the inward derivative above.
double integration_by_parts_defect(const GasketGraph& g, const Field& u, const Field& v);

// (5/3)^n sum over edges with both endpoints in the block of squared
// differences; the blocks of one scale partition the edge set, so these sum
// to E_n(u, u) exactly.
double triangle_energy(const GasketGraph& g, const Field& u, const TriangleBlock& block);

// max_{x != y} |u(x)-u(y)| / |x-y|^alpha, normalized by E_n(u,u)^{1/2},
// with alpha = log(5/3) / (2 log 2). Rejects zero-energy fields.
double holder_ratio(const GasketGraph& g, const Field& u);
double holder_exponent();

} // namespace gasket
