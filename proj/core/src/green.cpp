#include "gasket/green.hpp"

#include <cmath>
#include <string>

#include "gasket/errors.hpp"
#include "gasket/operators.hpp"

namespace gasket {

GreenColumn green_column_direct(const GasketGraph& g, VertexId y, const SolveOptions& opt) {
  if (g.is_boundary(y)) throw validation_error("green_column_direct: source must be interior");
  Field rhs = make_field(g);
  rhs[y] = 1.0 / pow3inv(g.level());  // 3^n
  DirichletSolveReport rep = solve_dirichlet(g, rhs, {0.0, 0.0, 0.0}, opt);
  return GreenColumn{g.level(), y, std::move(rep.solution)};
}

HMinusOne::HMinusOne(const GasketGraph& g, const SolveOptions& opt)
    : g_(&g), lap_(g), opt_(opt) {}

double HMinusOne::norm_sq(const Field& v) const {
  const GasketGraph& g = *g_;
  require_same_level(g, v, "hminus1_norm_sq");
  for (VertexId b : g.boundary())
    if (v[b] != 0.0)
      throw validation_error("hminus1_norm_sq: field must vanish on the boundary corners");
  std::vector<double> rhs(lap_.size());
  for (int r = 0; r < lap_.size(); ++r) rhs[r] = v[lap_.vertex_of(r)];
  std::vector<double> w;
  lap_.solve(rhs, w, opt_);
  double s = 0.0;
  for (int r = 0; r < lap_.size(); ++r) s += rhs[r] * w[r];
  return s * g.measure_weight();
}

double hminus1_norm_sq(const GasketGraph& g, const Field& v, const SolveOptions& opt) {
  return HMinusOne(g, opt).norm_sq(v);
}

// --- recursion over half-scale images ---------------------------------------

namespace {

// harmonic values of h^j on cell corners propagated to a target address by
// midpoint descent; cell tracked as (anchor, side) on the target level lattice
double descend_harmonic(std::int64_t ai, std::int64_t aj, std::int64_t side, double va, double vb,
                        double vc, std::int64_t pi, std::int64_t pj) {
  for (;;) {
    if (pi == ai && pj == aj) return va;
    if (pi == ai + side && pj == aj) return vb;
    if (pi == ai && pj == aj + side) return vc;
    const double sigma = va + vb + vc;
    const double ma = (2.0 * sigma - va) / 5.0;
    const double mb = (2.0 * sigma - vb) / 5.0;
    const double mc = (2.0 * sigma - vc) / 5.0;
    const std::int64_t h = side / 2;
    const std::int64_t di = pi - ai, dj = pj - aj;
    if (di + dj <= h) {  // child at anchor
      side = h;
      vb = mc;
      vc = mb;
    } else if (di >= h) {  // child at +e1
      ai += h;
      side = h;
      va = mc;
      vc = ma;
    } else {  // child at +e2
      aj += h;
      side = h;
      va = mb;
      vb = ma;
    }
  }
}

} // namespace

GreenRecursive::GreenRecursive() {
  const GasketGraph& g1 = graph_at(1);
  // the three midpoints are the interior vertices of the level-1 graph;
  // midpoint index m is the midpoint opposite corner a_m
  for (int m = 0; m < 3; ++m) {
    // opposite corner a_m: midpoint = (a_j + a_k)/2
    static const std::array<std::array<std::int64_t, 2>, 3> kMid = {{{1, 1}, {1, 0}, {0, 1}}};
    const VertexId src = g1.index_of(Address{kMid[m][0], kMid[m][1], 1});
    const GreenColumn col = green_column_direct(g1, src);
    for (VertexId v = 0; v < 6; ++v) base_cols_[m][v] = col.values[v];
  }
}

const GasketGraph& GreenRecursive::graph_at(int level) {
  auto it = graphs_.find(level);
  if (it == graphs_.end()) it = graphs_.emplace(level, GasketGraph::build(level)).first;
  return it->second;
}

double GreenRecursive::midpoint_column(int mid, const Address& x) {
  // column of the midpoint opposite corner a_mid, continued harmonically from
  // its level-1 values; evaluate inside the level-1 cell that contains x
  const GasketGraph& g1 = graph_at(1);
  const std::int64_t span = std::int64_t{1} << x.level;
  const std::int64_t h = span / 2;
  // pick a level-1 cell containing x (ties give equal values)
  std::int64_t ai = 0, aj = 0;
  if (x.i + x.j <= h) {
    ai = 0;
    aj = 0;
  } else if (x.i >= h) {
    ai = h;
    aj = 0;
  } else {
    ai = 0;
    aj = h;
  }
  auto corner_value = [&](std::int64_t ci, std::int64_t cj) {
    const Address lvl1{ci / h, cj / h, 1};
    return base_cols_[mid][g1.index_of(lvl1)];
  };
  return descend_harmonic(ai, aj, h, corner_value(ai, aj), corner_value(ai + h, aj),
                          corner_value(ai, aj + h), x.i, x.j);
}

double GreenRecursive::direct_fallback(const Address& x, const Address& y) {
  const GasketGraph& g = graph_at(x.level);
  const VertexId xv = g.index_of(x);
  const VertexId yv = g.index_of(y);
  if (g.is_boundary(yv)) return 0.0;
  auto key = std::make_pair(x.level, yv);
  auto it = fallback_cache_.find(key);
  if (it == fallback_cache_.end()) {
    GreenColumn col = green_column_direct(g, yv);
    it = fallback_cache_.emplace(key, std::move(col.values)).first;
  }
  return it->second[xv];
}

double GreenRecursive::eval(Address x, Address y, int depth) {
  const std::int64_t span = std::int64_t{1} << x.level;
  auto is_corner = [&](const Address& a) {
    return (a.i == 0 && a.j == 0) || (a.i == span && a.j == 0) || (a.i == 0 && a.j == span);
  };
  if (is_corner(x) || is_corner(y)) return 0.0;
  if (x.level <= 1) {
    const GasketGraph& g1 = graph_at(1);
    // every interior level-1 vertex is one of the three midpoints
    static const std::array<std::array<std::int64_t, 2>, 3> kMid = {{{1, 1}, {1, 0}, {0, 1}}};
    for (int m = 0; m < 3; ++m)
      if (y.i == kMid[m][0] && y.j == kMid[m][1])
        return base_cols_[m][g1.index_of(x)];
    throw numerical_error("green recursion: unreachable level-1 case");
  }

  const std::int64_t h = span / 2;
  int image = -1;
  Address xs = x, ys = y;
  if (x.i + x.j <= h && y.i + y.j <= h) {
    image = 0;  // half-scale copy toward a0
  } else if (x.i >= h && y.i >= h) {
    image = 2;  // toward a2 (+e1)
    xs.i -= h;
    ys.i -= h;
  } else if (x.j >= h && y.j >= h) {
    image = 1;  // toward a1 (+e2)
    xs.j -= h;
    ys.j -= h;
  }
  if (image < 0) return direct_fallback(x, y);

  xs.level = ys.level = x.level - 1;

  // h^j at the pulled-back source
  std::array<double, 3> hj;
  const std::int64_t hspan = std::int64_t{1} << ys.level;
  hj[0] = descend_harmonic(0, 0, hspan, 1.0, 0.0, 0.0, ys.i, ys.j);
  hj[2] = descend_harmonic(0, 0, hspan, 0.0, 1.0, 0.0, ys.i, ys.j);
  hj[1] = descend_harmonic(0, 0, hspan, 0.0, 0.0, 1.0, ys.i, ys.j);

  // images of the corners under the chosen map: phi_i(a_i) = a_i (zero
  // column); the other two are level-1 midpoints. Midpoint opposite a_m is
  // phi_i(a_j) for {i, j} != m.
  double acc = 0.6 * eval(xs, ys, depth + 1);
  for (int j = 0; j < 3; ++j) {
    if (j == image || hj[j] == 0.0) continue;
    const int mid_opposite = 3 - image - j;  // the corner not involved
    acc += hj[j] * midpoint_column(mid_opposite, x);
  }
  return acc;
}

double GreenRecursive::value(Address x, Address y) {
  if (x.level != y.level) {
    const int lvl = std::max(x.level, y.level);
    x = x.scaled_to(lvl);
    y = y.scaled_to(lvl);
  }
  if (x.level > GasketGraph::max_level())
    throw capacity_error("green recursion: level exceeds cap");
  return eval(x, y, 0);
}

// --- per-cell propagation ----------------------------------------------------

namespace {

// index into the 6-array: diag 0..2, off: AB=3, BC=4, CA=5
inline double gg(const std::array<double, 6>& v, int a, int b) {
  if (a == b) return v[a];
  const int lo = std::min(a, b), hi = std::max(a, b);
  if (lo == 0 && hi == 1) return v[3];
  if (lo == 1 && hi == 2) return v[4];
  return v[5];
}

} // namespace

CellGreenChildren refine_cell_green(const CellGreenValues& in, int t) {
  const double f3 = 0.3 * std::pow(0.6, t + 1);    // (3/10)(3/5)^{t+1}
  const double f1 = f3 / 3.0;                      // (1/10)(3/5)^{t+1}
  const auto& v = in.g;

  CellGreenChildren out;
  // diagonals of midpoints, indexed by the opposite corner
  for (int m = 0; m < 3; ++m) {
    const int j = (m + 1) % 3, k = (m + 2) % 3;
    out.midpoint_diag[m] = f3 + (gg(v, m, m) + 4.0 * gg(v, j, j) + 4.0 * gg(v, k, k) +
                                 4.0 * gg(v, m, j) + 8.0 * gg(v, j, k) + 4.0 * gg(v, k, m)) /
                                    25.0;
  }
  // off-diagonals between midpoints (MA,MB), (MB,MC), (MC,MA)
  for (int e = 0; e < 3; ++e) {
    const int x = e, y = (e + 1) % 3, z = (e + 2) % 3;
    out.midpoint_off[e] = f1 + (2.0 * gg(v, x, x) + 2.0 * gg(v, y, y) + 4.0 * gg(v, z, z) +
                                5.0 * gg(v, x, y) + 6.0 * gg(v, y, z) + 6.0 * gg(v, z, x)) /
                                   25.0;
  }
  // corner-to-midpoint by harmonic continuation:
  // G(M_x, corner c) = (2 sum_k G(k,c) - G(x,c)) / 5
  auto cm = [&](int mid, int c) {
    const double total = gg(v, 0, c) + gg(v, 1, c) + gg(v, 2, c);
    return (2.0 * total - gg(v, mid, c)) / 5.0;
  };

  const std::int64_t h = in.cell.side / 2;
  const auto MD = out.midpoint_diag;
  const auto MO = out.midpoint_off;
  // child at A: corners (A, M_C, M_B)
  out.child[0].cell = LatticeCell{in.cell.ai, in.cell.aj, h};
  out.child[0].g = {v[0], MD[2], MD[1], cm(2, 0), MO[1], cm(1, 0)};
  // child at B: corners (M_C, B, M_A)
  out.child[1].cell = LatticeCell{in.cell.ai + h, in.cell.aj, h};
  out.child[1].g = {MD[2], v[1], MD[0], cm(2, 1), cm(0, 1), MO[2]};
  // child at C: corners (M_B, M_A, C)
  out.child[2].cell = LatticeCell{in.cell.ai, in.cell.aj + h, h};
  out.child[2].g = {MD[1], MD[0], v[2], MO[0], cm(0, 2), cm(1, 2)};
  return out;
}

LocalGreenUpdate local_green_update(int level, const CellGreenValues& right,
                                    const CellGreenValues& left) {
  LocalGreenUpdate u;
  u.right_diag = refine_cell_green(right, level).midpoint_diag;
  u.left_diag = refine_cell_green(left, level).midpoint_diag;
  return u;
}

LocalGreenUpdate local_green_update_from_direct(const GasketGraph& g, VertexId x0,
                                                const SolveOptions& opt) {
  if (g.is_boundary(x0))
    throw validation_error("local_green_update: x0 must be an interior vertex");
  const auto& cells = g.vertex_cells(x0);
  std::array<CellGreenValues, 2> vals;
  for (int c = 0; c < 2; ++c) {
    const auto& cell = g.cells()[cells[c]];
    std::array<Field, 3> cols;
    for (int t = 0; t < 3; ++t) {
      if (g.is_boundary(cell[t]))
        cols[t] = make_field(g);
      else
        cols[t] = green_column_direct(g, cell[t], opt).values;
    }
    vals[c].cell = LatticeCell{g.address(cell[0]).i, g.address(cell[0]).j, 1};
    vals[c].g = {cols[0][cell[0]], cols[1][cell[1]], cols[2][cell[2]],
                 cols[0][cell[1]], cols[1][cell[2]], cols[2][cell[0]]};
  }
  return local_green_update(g.level(), vals[0], vals[1]);
}

Field green_diagonal_field(const GasketGraph& g) {
  Field diag = make_field(g);
  const int n = g.level();
  struct Item {
    CellGreenValues v;
    int t;
  };
  std::vector<Item> stack;
  CellGreenValues root;
  root.cell = LatticeCell{0, 0, g.span()};
  root.g = {0, 0, 0, 0, 0, 0};
  stack.push_back({root, 0});
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.t == n) continue;
    CellGreenChildren ch = refine_cell_green(it.v, it.t);
    const auto& c = it.v.cell;
    const std::int64_t h = c.side / 2;
    diag[g.index_of(Address{c.ai + h, c.aj + h, n})] = ch.midpoint_diag[0];
    diag[g.index_of(Address{c.ai, c.aj + h, n})] = ch.midpoint_diag[1];
    diag[g.index_of(Address{c.ai + h, c.aj, n})] = ch.midpoint_diag[2];
    for (int k = 0; k < 3; ++k) stack.push_back({ch.child[k], it.t + 1});
  }
  return diag;
}

// --- appendix recursions -----------------------------------------------------

std::pair<double, double> diagonal_recursion_step(double a, double b) {
  return {2.0 / 5.0 + a / 3.0 + 8.0 * b / 15.0, -1.0 / 5.0 + 2.0 * a / 15.0 + b / 3.0};
}

std::array<std::array<double, 2>, 2> diagonal_recursion_matrix() {
  return {{{1.0 / 3.0, 8.0 / 15.0}, {2.0 / 15.0, 1.0 / 3.0}}};
}

std::array<double, 2> diagonal_recursion_eigenvalues() {
  const auto m = diagonal_recursion_matrix();
  const double tr = m[0][0] + m[1][1];
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double disc = std::sqrt(tr * tr / 4.0 - det);
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

std::array<double, 3> corner_recursion_step(double alpha, double beta, double gamma) {
  return {3.0 / 5.0 + alpha / 3.0 + 8.0 * beta / 15.0 + 4.0 * gamma / 5.0,
          1.0 / 10.0 + 2.0 * alpha / 15.0 + beta / 3.0 + 2.0 * gamma / 5.0, gamma};
}

std::array<double, 2> corner_recursion_fixed_point(double gamma) {
  // solve (I - M)(alpha, beta) = w with w = (3/5 + 4 gamma/5, 1/10 + 2 gamma/5)
  const double w0 = 3.0 / 5.0 + 4.0 * gamma / 5.0;
  const double w1 = 1.0 / 10.0 + 2.0 * gamma / 5.0;
  const auto m = diagonal_recursion_matrix();
  const double a = 1.0 - m[0][0], b = -m[0][1], c = -m[1][0], d = 1.0 - m[1][1];
  const double det = a * d - b * c;
  return {(d * w0 - b * w1) / det, (-c * w0 + a * w1) / det};
}

namespace {

std::pair<std::array<VertexId, 2>, std::array<VertexId, 2>> adjacent_cell_mates(
    const GasketGraph& g, VertexId x) {
  const auto& cells = g.vertex_cells(x);
  std::array<std::array<VertexId, 2>, 2> mates;
  for (int c = 0; c < 2; ++c) {
    int k = 0;
    for (VertexId v : g.cells()[cells[c]])
      if (v != x) mates[c][k++] = v;
  }
  return {mates[0], mates[1]};
}

} // namespace

DiagonalSeq diagonal_sequence_direct(const Address& x, int n_min, int n_max,
                                     const SolveOptions& opt) {
  if (x.level > n_min)
    throw validation_error("diagonal_sequence_direct: x must live on level n_min or coarser");
  if (n_max > GasketGraph::max_level())
    throw capacity_error("diagonal_sequence_direct: n_max exceeds level cap");
  DiagonalSeq seq;
  seq.x = x;
  for (int n = n_min; n <= n_max; ++n) {
    const GasketGraph g = GasketGraph::build(n);
    const VertexId xv = g.index_of(x);
    if (g.is_boundary(xv))
      throw validation_error("diagonal_sequence_direct: x must be interior");

    // five solves per level: the column at x and at each of its cell mates
    std::map<VertexId, Field> cols;
    auto column = [&](VertexId v) -> const Field& {
      auto it = cols.find(v);
      if (it == cols.end()) {
        Field f = g.is_boundary(v) ? make_field(g) : green_column_direct(g, v, opt).values;
        it = cols.emplace(v, std::move(f)).first;
      }
      return it->second;
    };

    const double gxx = column(xv)[xv];
    const double inv3n = pow3inv(n);
    double lap = 0.0;
    for (const VertexId* y = g.neighbors_begin(xv); y != g.neighbors_end(xv); ++y)
      lap += column(*y)[*y] - gxx;
    const double a_n = pow5(n) * lap * inv3n;

    const auto [mates_r, mates_l] = adjacent_cell_mates(g, xv);
    const double cross_r = column(mates_r[0])[mates_r[1]];
    const double cross_l = column(mates_l[0])[mates_l[1]];
    const double b_n = pow5(n) * (cross_r + cross_l - 2.0 * gxx) * inv3n;

    seq.levels.push_back(n);
    seq.a.push_back(a_n);
    seq.b.push_back(b_n);
  }
  return seq;
}

double diagonal_laplacian_over_3n(const GasketGraph& g, const Field& diag, VertexId x) {
  if (g.is_boundary(x))
    throw validation_error("diagonal_laplacian_over_3n: x must be interior");
  double lap = 0.0;
  for (const VertexId* y = g.neighbors_begin(x); y != g.neighbors_end(x); ++y)
    lap += (g.is_boundary(*y) ? 0.0 : diag[*y]) - diag[x];
  return pow53(g.level()) * lap;
}

} // namespace gasket
