#include "doctest.h"

#include <cmath>

#include "gasket/dense.hpp"
#include "gasket/green.hpp"
#include "gasket/operators.hpp"
#include "gasket/rng.hpp"
#include "gasket/solver.hpp"

using namespace gasket;

TEST_CASE("level-1 Green column matches the 3x3 dense oracle and hand values") {
  const GasketGraph g1 = GasketGraph::build(1);
  const VertexId m1 = g1.index_of(Address{1, 0, 1});  // bottom-middle vertex
  const GreenColumn col = green_column_direct(g1, m1);

  // dense oracle on the three interior vertices
  InteriorLaplacian lap(g1);
  DenseMatrix a = dense_interior_laplacian(g1);
  std::vector<double> rhs(lap.size(), 0.0);
  rhs[lap.row_of(m1)] = 3.0;
  const std::vector<double> oracle = cholesky_solve(a, rhs);
  for (int r = 0; r < lap.size(); ++r)
    CHECK(col.values[lap.vertex_of(r)] == doctest::Approx(oracle[r]).epsilon(1e-12));

  CHECK(col.values[m1] == doctest::Approx(9.0 / 50.0).epsilon(1e-12));
  CHECK(col.values[g1.index_of(Address{1, 1, 1})] == doctest::Approx(3.0 / 50.0).epsilon(1e-12));
  CHECK(col.values[g1.index_of(Address{0, 1, 1})] == doctest::Approx(3.0 / 50.0).epsilon(1e-12));
  for (VertexId b : g1.boundary()) CHECK(col.values[b] == 0.0);
}

TEST_CASE("Green columns: non-negativity, source maximum, symmetry") {
  const GasketGraph g = GasketGraph::build(3);
  Rng rng(21);
  std::vector<VertexId> sources;
  while (sources.size() < 6) {
    const VertexId y = static_cast<VertexId>(rng.below(g.vertex_count()));
    if (!g.is_boundary(y)) sources.push_back(y);
  }
  std::vector<GreenColumn> cols;
  for (VertexId y : sources) cols.push_back(green_column_direct(g, y));
  for (const auto& c : cols) {
    double peak = 0.0;
    for (double v : c.values.v) {
      CHECK(v >= -1e-12);
      peak = std::max(peak, v);
    }
    CHECK(c.values[c.source] == doctest::Approx(peak));
  }
  for (std::size_t i = 0; i < sources.size(); ++i)
    for (std::size_t j = 0; j < sources.size(); ++j)
      CHECK(std::abs(cols[i].values[sources[j]] - cols[j].values[sources[i]]) <= 1e-9);
}

TEST_CASE("level-2 diagonal anchors (exact rational values)") {
  const GasketGraph g2 = GasketGraph::build(2);
  const VertexId central = g2.index_of(Address{1, 1, 2});
  const VertexId corner_adj = g2.index_of(Address{1, 0, 2});
  const VertexId v1mid = g2.index_of(Address{2, 0, 2});

  const double g_central = green_column_direct(g2, central).values[central];
  const double g_cadj = green_column_direct(g2, corner_adj).values[corner_adj];
  const double g_mid = green_column_direct(g2, v1mid).values[v1mid];
  CHECK(g_central == doctest::Approx(231.0 / 1250.0).epsilon(1e-11));
  CHECK(g_cadj == doctest::Approx(192.0 / 1250.0).epsilon(1e-11));
  CHECK(g_mid == doctest::Approx(9.0 / 50.0).epsilon(1e-11));

  // the per-cell propagation reproduces the same diagonal with no solves
  const Field diag = green_diagonal_field(g2);
  CHECK(diag[central] == doctest::Approx(231.0 / 1250.0).epsilon(1e-14));
  CHECK(diag[corner_adj] == doctest::Approx(192.0 / 1250.0).epsilon(1e-14));
  CHECK(diag[v1mid] == doctest::Approx(9.0 / 50.0).epsilon(1e-14));
}

TEST_CASE("diagonal field matches direct solves through level 4") {
  for (int n = 1; n <= 4; ++n) {
    const GasketGraph g = GasketGraph::build(n);
    const Field diag = green_diagonal_field(g);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (g.is_boundary(v)) {
        CHECK(diag[v] == 0.0);
        continue;
      }
      const double direct = green_column_direct(g, v).values[v];
      CHECK(diag[v] == doctest::Approx(direct).epsilon(1e-9));
    }
  }
}

TEST_CASE("recursive evaluation agrees with direct solves and nests across levels") {
  GreenRecursive rec;
  const GasketGraph g3 = GasketGraph::build(3);
  Rng rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    VertexId x = static_cast<VertexId>(rng.below(g3.vertex_count()));
    VertexId y = static_cast<VertexId>(rng.below(g3.vertex_count()));
    if (g3.is_boundary(y)) std::swap(x, y);
    if (g3.is_boundary(y)) continue;
    const double direct = green_column_direct(g3, y).values[x];
    CHECK(rec.value(g3.address(x), g3.address(y)) == doctest::Approx(direct).epsilon(1e-10));
    // the value does not depend on the level the addresses are expressed at
    const double finer = rec.value(g3.address(x).scaled_to(4), g3.address(y).scaled_to(4));
    CHECK(finer == doctest::Approx(direct).epsilon(1e-10));
  }
  // corners vanish
  CHECK(rec.value(Address{0, 0, 1}, Address{1, 0, 1}) == 0.0);
}

TEST_CASE("H_-1 norm: formula reduction and dense quadratic-form oracle") {
  const GasketGraph g = GasketGraph::build(3);
  HMinusOne hm(g);

  CHECK(hm.norm_sq(make_field(g)) == 0.0);

  // delta at y reduces to 3^{-2n} G(y,y)
  const VertexId y = g.index_of(Address{2, 2, 3});
  Field delta = make_field(g);
  delta[y] = 1.0;
  const double gyy = green_column_direct(g, y).values[y];
  const double inv32n = pow3inv(3) * pow3inv(3);
  CHECK(hm.norm_sq(delta) == doctest::Approx(inv32n * gyy).epsilon(1e-11));

  // dense double sum with explicit Green columns
  Rng rng(23);
  Field v = make_field(g);
  for (VertexId x = 0; x < g.vertex_count(); ++x) v[x] = rng.normal();
  for (VertexId b : g.boundary()) v[b] = 0.0;
  std::vector<Field> cols(g.vertex_count());
  for (VertexId x = 0; x < g.vertex_count(); ++x)
    if (!g.is_boundary(x)) cols[x] = green_column_direct(g, x).values;
  double dense = 0.0;
  for (VertexId x = 0; x < g.vertex_count(); ++x) {
    if (g.is_boundary(x)) continue;
    for (VertexId z = 0; z < g.vertex_count(); ++z) {
      if (g.is_boundary(z)) continue;
      dense += v[x] * v[z] * cols[z][x];
    }
  }
  dense *= inv32n;
  CHECK(hm.norm_sq(v) == doctest::Approx(dense).epsilon(1e-9));

  // Rayleigh bound against the smallest eigenvalue
  const double lambda1 = smallest_eigenpairs(g, 1)[0].lambda;
  for (int trial = 0; trial < 50; ++trial) {
    Field w = make_field(g);
    for (VertexId x = 0; x < g.vertex_count(); ++x) w[x] = rng.normal();
    for (VertexId b : g.boundary()) w[b] = 0.0;
    CHECK(hm.norm_sq(w) <= (1.0 + 1e-8) * inner_product(g, w, w) / lambda1);
  }

  Field bad = make_field(g, 1.0);
  CHECK_THROWS_AS(hm.norm_sq(bad), validation_error);
}

TEST_CASE("appendix recursion steps") {
  const auto [a1, b1] = diagonal_recursion_step(0.0, 0.0);
  CHECK(a1 == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(b1 == doctest::Approx(-0.2).epsilon(1e-15));
  const auto [af, bf] = diagonal_recursion_step(3.0 / 7.0, -3.0 / 14.0);
  CHECK(af == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
  CHECK(bf == doctest::Approx(-3.0 / 14.0).epsilon(1e-15));
  const auto ev = diagonal_recursion_eigenvalues();
  CHECK(ev[0] == doctest::Approx(3.0 / 5.0).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(1.0 / 15.0).epsilon(1e-14));

  for (double gamma : {-1.0, -0.25, 0.0, 0.5}) {
    const auto fp = corner_recursion_fixed_point(gamma);
    CHECK(fp[0] == doctest::Approx(17.0 / 14.0 + 2.0 * gamma).epsilon(1e-13));
    const auto step = corner_recursion_step(fp[0], fp[1], gamma);
    CHECK(step[0] == doctest::Approx(fp[0]).epsilon(1e-13));
    CHECK(step[1] == doctest::Approx(fp[1]).epsilon(1e-13));
    CHECK(step[2] == gamma);
  }
}

TEST_CASE("iterated diagonal recursion contracts at rate 3/5") {
  Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    double a = rng.u01() * 20.0 - 10.0;
    double b = rng.u01() * 20.0 - 10.0;
    double prev = std::hypot(a - kDiagonalFixedA, b - kDiagonalFixedB);
    for (int k = 0; k < 30; ++k) {
      std::tie(a, b) = diagonal_recursion_step(a, b);
      const double cur = std::hypot(a - kDiagonalFixedA, b - kDiagonalFixedB);
      if (prev > 1e-13) CHECK(cur <= 0.75 * prev);
      prev = cur;
    }
  }
}

TEST_CASE("local Green update: coefficients and cross-check against solves") {
  // all-zero inputs: the new diagonal is (3/10)(3/5)^{n+1}
  CellGreenValues zero;
  zero.cell = LatticeCell{0, 0, 2};
  const LocalGreenUpdate z = local_green_update(1, zero, zero);
  for (double d : z.right_diag) CHECK(d == doctest::Approx(0.3 * 0.36).epsilon(1e-15));

  // the own-corner diagonal enters the opposite midpoint with weight 1/25
  CellGreenValues one = zero;
  one.g[0] = 1.0;  // G(anchor, anchor)
  const auto ch = refine_cell_green(one, 1);
  CHECK(ch.midpoint_diag[0] - 0.3 * 0.36 == doctest::Approx(1.0 / 25.0).epsilon(1e-15));
  CHECK(ch.midpoint_diag[1] - 0.3 * 0.36 == doctest::Approx(4.0 / 25.0).epsilon(1e-15));

  // level-2 interior vertices: update output equals the level-3 direct solve
  const GasketGraph g2 = GasketGraph::build(2);
  const GasketGraph g3 = GasketGraph::build(3);
  int tested = 0;
  for (VertexId v = 0; v < g2.vertex_count(); ++v) {
    if (g2.is_boundary(v)) continue;
    ++tested;
    const LocalGreenUpdate upd = local_green_update_from_direct(g2, v);
    for (int side = 0; side < 2; ++side) {
      const auto& cell = g2.cells()[g2.vertex_cells(v)[side]];
      const Address a = g2.address(cell[0]).scaled_to(3);
      const std::array<Address, 3> mids{Address{a.i + 1, a.j + 1, 3},
                                        Address{a.i, a.j + 1, 3}, Address{a.i + 1, a.j, 3}};
      const auto& diag = side == 0 ? upd.right_diag : upd.left_diag;
      for (int m = 0; m < 3; ++m) {
        const VertexId mv = g3.index_of(mids[m]);
        const double direct = green_column_direct(g3, mv).values[mv];
        CHECK(diag[m] == doctest::Approx(direct).epsilon(1e-9));
      }
    }
  }
  CHECK(tested == 12);

  const GasketGraph g1 = GasketGraph::build(1);
  CHECK_THROWS_AS(local_green_update_from_direct(g1, g1.boundary()[0]), validation_error);
}

TEST_CASE("diagonal sequence from direct solves") {
  const Address x{1, 1, 2};
  const DiagonalSeq seq = diagonal_sequence_direct(x, 2, 6);
  REQUIRE(seq.levels.size() == 5);

  // hand-computed exact start: a_2 = -1/5, b_2 = -14/25 at this vertex
  CHECK(seq.a[0] == doctest::Approx(-0.2).epsilon(1e-9));
  CHECK(seq.b[0] == doctest::Approx(-0.56).epsilon(1e-9));

  for (double a : seq.a) CHECK(std::abs(a) <= 8.0);
  // consecutive pairs satisfy the affine recursion
  for (std::size_t k = 0; k + 1 < seq.a.size(); ++k) {
    const auto [ap, bp] = diagonal_recursion_step(seq.a[k], seq.b[k]);
    CHECK(std::abs(ap - seq.a[k + 1]) <= 1e-6);
    CHECK(std::abs(bp - seq.b[k + 1]) <= 1e-6);
  }
  // the sequence heads toward 3/7
  CHECK(std::abs(seq.a.back() - 3.0 / 7.0) <
        std::abs(seq.a.front() - 3.0 / 7.0));
}

TEST_CASE("diagonal boundedness and neighbor differences") {
  // level-to-level maxima of G(x,x) stabilize
  double prev_max = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const GasketGraph g = GasketGraph::build(n);
    const Field diag = green_diagonal_field(g);
    double mx = 0.0;
    for (double v : diag.v) mx = std::max(mx, v);
    if (n >= 4) CHECK(mx / prev_max <= 1.05);
    prev_max = mx;
  }

  // |G(x,x) - G(y,y)| <= 2 (3/5)^n along edges (derived bound)
  for (int n : {4, 6}) {
    const GasketGraph g = GasketGraph::build(n);
    const Field diag = green_diagonal_field(g);
    const double bound = 2.0 * std::pow(0.6, n);
    for (const auto& e : g.edges())
      CHECK(std::abs(diag[e[0]] - diag[e[1]]) <= bound);
  }

  // |a_n| <= 8 everywhere, read off the propagated diagonal
  const GasketGraph g6 = GasketGraph::build(6);
  const Field diag6 = green_diagonal_field(g6);
  for (VertexId v = 0; v < g6.vertex_count(); ++v)
    if (!g6.is_boundary(v))
      CHECK(std::abs(diagonal_laplacian_over_3n(g6, diag6, v)) <= 8.0);
}
