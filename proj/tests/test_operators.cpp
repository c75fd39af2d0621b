#include "doctest.h"

#include <cmath>

#include "gasket/dense.hpp"
#include "gasket/errors.hpp"
#include "gasket/field.hpp"
#include "gasket/operators.hpp"
#include "gasket/rng.hpp"
#include "gasket/solver.hpp"

using namespace gasket;

namespace {

Field random_field(const GasketGraph& g, Rng& rng, double lo, double hi) {
  Field f = make_field(g);
  for (auto& v : f.v) v = lo + (hi - lo) * rng.u01();
  return f;
}

} // namespace

TEST_CASE("discrete Laplacian basics") {
  const GasketGraph g1 = GasketGraph::build(1);
  const Field ones = make_field(g1, 1.0);
  const Field lap1 = apply_laplacian(g1, ones);
  for (double v : lap1.v) CHECK(v == 0.0);

  // indicator of an interior vertex: value -4 * 5 at that vertex
  Field ind = make_field(g1);
  const VertexId m = g1.index_of(Address{1, 0, 1});
  ind[m] = 1.0;
  CHECK(apply_laplacian(g1, ind)[m] == -20.0);

  const GasketGraph g3 = GasketGraph::build(3);
  const Field h = harmonic_function(g3, 1.0, 0.0, 0.0);
  const Field lap = apply_laplacian(g3, h);
  for (VertexId v = 0; v < g3.vertex_count(); ++v)
    if (!g3.is_boundary(v)) CHECK(std::abs(lap[v]) <= 1e-10);

  Field wrong{0, {1.0, 2.0, 3.0}};
  CHECK_THROWS_AS(apply_laplacian(g1, wrong), validation_error);
}

TEST_CASE("Dirichlet form values and harmonic energy") {
  const GasketGraph g0 = GasketGraph::build(0);
  Field b{0, {0.0, 0.0, 0.0}};
  b[g0.index_of(Address{0, 0, 0})] = 1.0;
  CHECK(dirichlet_form(g0, b, b) == doctest::Approx(2.0).epsilon(1e-15));

  const GasketGraph g1 = GasketGraph::build(1);
  const Field ext = harmonic_extension(g1, b);
  CHECK(dirichlet_form(g1, ext, ext) == doctest::Approx(2.0).epsilon(1e-12));

  const Field c = make_field(g1, 3.7);
  CHECK(dirichlet_form(g1, c, c) == 0.0);
}

TEST_CASE("harmonic extension: midpoint rule and invariances") {
  const GasketGraph g1 = GasketGraph::build(1);
  Field b{0, {0.0, 0.0, 0.0}};
  const GasketGraph g0 = GasketGraph::build(0);
  b[g0.index_of(Address{0, 0, 0})] = 1.0;  // corner a0

  const Field ext = harmonic_extension(g1, b);
  CHECK(ext[g1.index_of(Address{1, 1, 1})] == 1.0 / 5.0);  // opposite a0
  CHECK(ext[g1.index_of(Address{1, 0, 1})] == 2.0 / 5.0);
  CHECK(ext[g1.index_of(Address{0, 1, 1})] == 2.0 / 5.0);

  // constants extend to constants; (1,1,1) gives the all-ones field
  const GasketGraph g3 = GasketGraph::build(3);
  const Field ones = harmonic_function(g3, 1.0, 1.0, 1.0);
  for (double v : ones.v) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

  // energy equality across levels for random corner data
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Field corners{0, {rng.normal(), rng.normal(), rng.normal()}};
    const double e0 = dirichlet_form(g0, corners, corners);
    for (int p = 1; p <= 4; ++p) {
      const GasketGraph gp = GasketGraph::build(p);
      const Field e = harmonic_extension(gp, corners);
      CHECK(dirichlet_form(gp, e, e) ==
            doctest::Approx(e0).epsilon(1e-10));
    }
  }
}

TEST_CASE("harmonic extension is the energy minimizer among interpolants") {
  const GasketGraph g2 = GasketGraph::build(2);
  const GasketGraph g1 = GasketGraph::build(1);
  Rng rng(8);
  Field coarse{1, std::vector<double>(g1.vertex_count())};
  for (auto& v : coarse.v) v = rng.normal();
  const Field ext = harmonic_extension(g2, coarse);
  const double e_ext = dirichlet_form(g2, ext, ext);
  for (int trial = 0; trial < 20; ++trial) {
    Field pert = ext;
    for (VertexId v = 0; v < g2.vertex_count(); ++v)
      if (g1.find(g2.address(v)) < 0) pert[v] += 0.3 * rng.normal();
    CHECK(dirichlet_form(g2, pert, pert) >= e_ext - 1e-12);
  }
}

TEST_CASE("harmonic functions: partition of unity and maximum principle") {
  const GasketGraph g = GasketGraph::build(4);
  const Field h0 = harmonic_function(g, 1.0, 0.0, 0.0);
  const Field h1 = harmonic_function(g, 0.0, 1.0, 0.0);
  const Field h2 = harmonic_function(g, 0.0, 0.0, 1.0);
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    CHECK(h0[v] + h1[v] + h2[v] == doctest::Approx(1.0).epsilon(1e-14));

  const Field zero = harmonic_function(g, 0.0, 0.0, 0.0);
  for (double v : zero.v) CHECK(v == 0.0);

  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const double b0 = rng.normal(), b1 = rng.normal(), b2 = rng.normal();
    const Field h = harmonic_function(g, b0, b1, b2);
    const double lo = std::min({b0, b1, b2}), hi = std::max({b0, b1, b2});
    for (double v : h.v) {
      CHECK(v >= lo - 1e-14);
      CHECK(v <= hi + 1e-14);
    }
  }
}

TEST_CASE("normal derivatives") {
  const GasketGraph g0 = GasketGraph::build(0);
  Field u{0, {0.0, 0.0, 0.0}};
  u[g0.index_of(Address{0, 0, 0})] = 1.0;
  CHECK(normal_derivative(g0, u, 0) == -2.0);
  const Field c = make_field(g0, 5.0);
  CHECK(normal_derivative(g0, c, 1) == 0.0);

  // flux of a harmonic function is independent of the level
  std::array<double, 3> flux0{};
  for (int n = 0; n <= 6; ++n) {
    const GasketGraph g = GasketGraph::build(n);
    const Field h = harmonic_function(g, 1.0, 0.0, 0.0);
    for (int i = 0; i < 3; ++i) {
      const double f = normal_derivative(g, h, i);
      if (n == 0)
        flux0[i] = f;
      else
        CHECK(std::abs(f - flux0[i]) <= 1e-10);
    }
  }
}

TEST_CASE("integration by parts identity") {
  const GasketGraph g = GasketGraph::build(3);
  Rng rng(10);
  const Field u = random_field(g, rng, -1.0, 1.0);
  CHECK(integration_by_parts_defect(g, u, u) == 0.0);

  for (int trial = 0; trial < 30; ++trial) {
    const Field a = random_field(g, rng, -1.0, 1.0);
    const Field b = random_field(g, rng, -1.0, 1.0);
    CHECK(std::abs(integration_by_parts_defect(g, a, b)) <= 1e-9);
  }

  // with both fields vanishing on the corners the boundary terms drop out
  for (int trial = 0; trial < 10; ++trial) {
    Field a = random_field(g, rng, -1.0, 1.0);
    Field b = random_field(g, rng, -1.0, 1.0);
    for (VertexId c : g.boundary()) a[c] = b[c] = 0.0;
    CHECK(std::abs(integration_by_parts_defect(g, a, b)) <= 1e-12);
    CHECK(std::abs(inner_product(g, a, apply_laplacian(g, a)) +
                   dirichlet_form(g, a, a)) <= 1e-10);
  }
}

TEST_CASE("solve_dirichlet against the dense oracle") {
  const GasketGraph g = GasketGraph::build(3);

  const DirichletSolveReport zero = solve_dirichlet(g, make_field(g), {0.0, 0.0, 0.0});
  for (double v : zero.solution.v) CHECK(v == 0.0);

  // f = 0, b = (1,0,0): the harmonic function
  const DirichletSolveReport harm = solve_dirichlet(g, make_field(g), {1.0, 0.0, 0.0});
  const Field h0 = harmonic_function(g, 1.0, 0.0, 0.0);
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    CHECK(std::abs(harm.solution[v] - h0[v]) <= 1e-9);
  for (int i = 0; i < 3; ++i)
    CHECK(harm.solution[g.boundary()[i]] == (i == 0 ? 1.0 : 0.0));

  // random data against dense Cholesky
  Rng rng(11);
  Field f = random_field(g, rng, -2.0, 2.0);
  const std::array<double, 3> b{0.4, -0.3, 1.1};
  const DirichletSolveReport rep = solve_dirichlet(g, f, b);
  CHECK(rep.residual_norm <= 1e-10);

  InteriorLaplacian lap(g);
  DenseMatrix a = dense_interior_laplacian(g);
  std::vector<double> rhs(lap.size());
  Field bc = make_field(g);
  for (int i = 0; i < 3; ++i) bc[g.boundary()[i]] = b[i];
  const double scale = pow5(g.level());
  for (int r = 0; r < lap.size(); ++r) {
    const VertexId v = lap.vertex_of(r);
    double s = f[v];
    for (const VertexId* y = g.neighbors_begin(v); y != g.neighbors_end(v); ++y)
      if (g.is_boundary(*y)) s += scale * bc[*y];
    rhs[r] = s;
  }
  const std::vector<double> dense = cholesky_solve(a, rhs);
  for (int r = 0; r < lap.size(); ++r)
    CHECK(std::abs(rep.solution[lap.vertex_of(r)] - dense[r]) <= 1e-9);

  SolveOptions tight;
  tight.rel_tol = 1e-14;
  tight.max_iterations = 2;
  CHECK_THROWS_AS(solve_dirichlet(g, f, b, tight), numerical_error);
}

TEST_CASE("smallest eigenpairs against the dense oracle") {
  const GasketGraph g = GasketGraph::build(3);
  const auto pairs = smallest_eigenpairs(g, 5);
  REQUIRE(pairs.size() == 5);

  DenseMatrix a = dense_interior_laplacian(g);
  std::vector<double> evals;
  DenseMatrix evecs;
  jacobi_eigensymm(a, evals, evecs);
  for (int k = 0; k < 5; ++k) {
    CHECK(pairs[k].lambda > 0.0);
    CHECK(pairs[k].lambda == doctest::Approx(evals[k]).epsilon(1e-7));
  }
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double ip = inner_product(g, pairs[i].field, pairs[j].field);
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-8);
    }

  // spectral gap stabilizes across levels
  const double l4 = smallest_eigenpairs(GasketGraph::build(4), 1)[0].lambda;
  const double l5 = smallest_eigenpairs(GasketGraph::build(5), 1)[0].lambda;
  CHECK(std::abs(l5 - l4) / l4 <= 0.05);
}

TEST_CASE("triangle energies partition the Dirichlet form") {
  Rng rng(12);
  for (auto [n, k] : {std::pair<int, int>{3, 1}, {4, 2}}) {
    const GasketGraph g = GasketGraph::build(n);
    const Field u = random_field(g, rng, -1.0, 1.0);
    const double total = dirichlet_form(g, u, u);
    double sum = 0.0;
    for (const TriangleBlock& b : g.enumerate_blocks(k)) {
      const double e = triangle_energy(g, u, b);
      CHECK(e >= 0.0);
      CHECK(e <= total + 1e-12);
      sum += e;
    }
    CHECK(sum == doctest::Approx(total).epsilon(1e-10));
    CHECK(triangle_energy(g, make_field(g, 2.0), g.enumerate_blocks(k)[0]) == 0.0);
  }
}

TEST_CASE("Holder ratio") {
  const GasketGraph g3 = GasketGraph::build(3);
  CHECK_THROWS_AS(holder_ratio(g3, make_field(g3, 1.0)), validation_error);

  // bounded uniformly in the level for a fixed harmonic function
  double first = 0.0;
  for (int n = 3; n <= 6; ++n) {
    const GasketGraph g = GasketGraph::build(n);
    const double r = holder_ratio(g, harmonic_function(g, 1.0, 0.0, 0.0));
    if (n == 3)
      first = r;
    else
      CHECK(r <= first * 1.25);
    CHECK(r > 0.0);
  }

  // the max-over-pairs ratio dominates any single adjacent pair
  Field ind = make_field(g3);
  const VertexId m = g3.index_of(Address{1, 1, 2});
  ind[m] = 1.0;
  const double energy = dirichlet_form(g3, ind, ind);
  const VertexId nb = *g3.neighbors_begin(m);
  const ExactPoint pm = g3.coordinates(m), pn = g3.coordinates(nb);
  const double dist = std::hypot(pm.x() - pn.x(), pm.y() - pn.y());
  const double pair_bound = 1.0 / std::pow(dist, holder_exponent()) / std::sqrt(energy);
  CHECK(holder_ratio(g3, ind) >= pair_bound - 1e-12);
}
