#pragma once

#include <array>
#include <map>
#include <memory>
#include <vector>

#include "gasket/field.hpp"
#include "gasket/graph.hpp"
#include "gasket/solver.hpp"

namespace gasket {

// Sign convention used throughout: -Laplacian G(., y) = 3^n delta_y on the
// interior and G = 0 on the corners, which makes G non-negative and
// w(x) = 3^-n sum_y G(x, y) f(y) the solution of -Laplacian w = f.

struct GreenColumn {
  int level = 0;
  VertexId source = -1;
  Field values;
};

// One sparse solve; column maximum sits at the source.
GreenColumn green_column_direct(const GasketGraph& g, VertexId y,
                                const SolveOptions& opt = {});

// ||v||^2_{-1,n} = 3^{-2n} sum_{x,y} v(x) v(y) G(x,y) for v vanishing on the
// corners, evaluated as <v, w>_n with one solve of -Laplacian w = v. Keeps
// the interior index map so per-replica evaluations share setup.
class HMinusOne {
public:
  explicit HMinusOne(const GasketGraph& g, const SolveOptions& opt = {});
  double norm_sq(const Field& v) const;

private:
  const GasketGraph* g_;
  InteriorLaplacian lap_;
  SolveOptions opt_;
};

double hminus1_norm_sq(const GasketGraph& g, const Field& v, const SolveOptions& opt = {});

// --- scale recursion -------------------------------------------------------

// G(phi_i x, phi_i y) at the next level = 3/5 G(x, y) + sum_j h^j(y) G(phi_i x, phi_i a_j).
// Pairs that never land in a common half-scale image fall back to direct
// solves (cached per source).
class GreenRecursive {
public:
  GreenRecursive();
  // x, y addresses on a common level (scaled as needed)
  double value(Address x, Address y);

private:
  double midpoint_column(int mid, const Address& x);  // G(x, m_mid) by harmonic continuation
  double eval(Address x, Address y, int depth);
  double direct_fallback(const Address& x, const Address& y);
  const GasketGraph& graph_at(int level);

  std::map<int, GasketGraph> graphs_;
  std::array<std::array<double, 6>, 3> base_cols_{};  // columns at the three level-1 midpoints
  std::map<std::pair<int, VertexId>, Field> fallback_cache_;
};

// --- diagonal behavior (exact per-cell propagation) ------------------------

// The six Green values on one cell's corners, in (anchor A, +e1 B, +e2 C)
// role order: (AA, BB, CC, AB, BC, CA).
struct CellGreenValues {
  LatticeCell cell;
  std::array<double, 6> g{};
};

struct CellGreenChildren {
  // midpoint diagonals: opposite A, opposite B, opposite C
  std::array<double, 3> midpoint_diag{};
  // midpoint off-diagonals: (MA,MB), (MB,MC), (MC,MA)
  std::array<double, 3> midpoint_off{};
  std::array<CellGreenValues, 3> child{};  // at A, at B, at C
};

// One refinement of the local Green data of a cell at graph level t.
CellGreenChildren refine_cell_green(const CellGreenValues& in, int t);

// Appendix-style single-vertex update: the six diagonal values at the
// refinement midpoints of the two cells meeting at an interior vertex.
struct LocalGreenUpdate {
  std::array<double, 3> right_diag{};  // midpoints of the first adjacent cell
  std::array<double, 3> left_diag{};   // midpoints of the second adjacent cell
};
LocalGreenUpdate local_green_update(int level, const CellGreenValues& right,
                                    const CellGreenValues& left);

// Convenience: gather both adjacent cells of interior x0 from direct solves,
// then apply the update. Used to validate against level-(n+1) solves.
LocalGreenUpdate local_green_update_from_direct(const GasketGraph& g, VertexId x0,
                                                const SolveOptions& opt = {});

// Diagonal x -> G(x, x) on all of V_n via the per-cell propagation (no linear
// solves; cost O(3^n)).
Field green_diagonal_field(const GasketGraph& g);

// --- appendix recursions ----------------------------------------------------

// (a, b) -> (2/5 + a/3 + 8b/15, -1/5 + 2a/15 + b/3); fixed point (3/7, -3/14).
std::pair<double, double> diagonal_recursion_step(double a, double b);
// Linear part, rows {1/3, 8/15} and {2/15, 1/3}; eigenvalues 3/5 and 1/15.
std::array<std::array<double, 2>, 2> diagonal_recursion_matrix();
std::array<double, 2> diagonal_recursion_eigenvalues();
inline constexpr double kDiagonalFixedA = 3.0 / 7.0;
inline constexpr double kDiagonalFixedB = -3.0 / 14.0;

// (alpha, beta, gamma) -> (3/5 + alpha/3 + 8 beta/15 + 4 gamma/5,
//                          1/10 + 2 alpha/15 + beta/3 + 2 gamma/5, gamma).
std::array<double, 3> corner_recursion_step(double alpha, double beta, double gamma);
// Fixed point of the (alpha, beta) part for frozen gamma: alpha = 17/14 + 2 gamma.
std::array<double, 2> corner_recursion_fixed_point(double gamma);

// a_n = Laplacian_n of the diagonal at x over 3^n, b_n the companion
// two-cell cross term; computed from direct Green solves at each level.
struct DiagonalSeq {
  Address x;
  std::vector<int> levels;
  std::vector<double> a;
  std::vector<double> b;
};
DiagonalSeq diagonal_sequence_direct(const Address& x, int n_min, int n_max,
                                     const SolveOptions& opt = {});

// a_n read off a precomputed diagonal field (used by the fast invariants).
double diagonal_laplacian_over_3n(const GasketGraph& g, const Field& diag, VertexId x);

} // namespace gasket
