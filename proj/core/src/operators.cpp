#include "gasket/operators.hpp"

#include <cmath>

namespace gasket {

double pow5(int n) {
  double r = 1.0;
  for (int t = 0; t < n; ++t) r *= 5.0;
  return r;
}

double pow53(int n) {
  double r = 1.0;
  for (int t = 0; t < n; ++t) r *= 5.0 / 3.0;
  return r;
}

double pow3inv(int n) {
  double r = 1.0;
  for (int t = 0; t < n; ++t) r /= 3.0;
  return r;
}

double inner_product(const GasketGraph& g, const Field& u, const Field& v) {
  require_same_level(g, u, "inner_product");
  require_same_level(g, v, "inner_product");
  double s = 0.0;
  for (VertexId x = 0; x < g.vertex_count(); ++x) s += u[x] * v[x];
  return s * g.measure_weight();
}

Field apply_laplacian(const GasketGraph& g, const Field& u) {
  require_same_level(g, u, "apply_laplacian");
  Field out = make_field(g);
  const double scale = pow5(g.level());
  for (VertexId x = 0; x < g.vertex_count(); ++x) {
    double s = 0.0;
    for (const VertexId* y = g.neighbors_begin(x); y != g.neighbors_end(x); ++y)
      s += u[*y] - u[x];
    out[x] = scale * s;
  }
  return out;
}

Field apply_laplacian_dirichlet(const GasketGraph& g, const Field& u) {
  Field out = apply_laplacian(g, u);
  for (VertexId b : g.boundary()) out[b] = 0.0;
  return out;
}

double dirichlet_form(const GasketGraph& g, const Field& u, const Field& v) {
  require_same_level(g, u, "dirichlet_form");
  require_same_level(g, v, "dirichlet_form");
  double s = 0.0;
  for (const auto& e : g.edges())
    s += (u[e[1]] - u[e[0]]) * (v[e[1]] - v[e[0]]);
  return s * pow53(g.level());
}

namespace {

// Fill one cell's refinement: corners carry (va, vb, vc); recurse until the
// cell is a single lattice triangle.
void fill_harmonic(const GasketGraph& g, Field& out, std::int64_t ai, std::int64_t aj,
                   std::int64_t side, double va, double vb, double vc) {
  const int n = g.level();
  out[g.index_of(Address{ai, aj, n})] = va;
  out[g.index_of(Address{ai + side, aj, n})] = vb;
  out[g.index_of(Address{ai, aj + side, n})] = vc;
  if (side == 1) return;
  const double sigma = va + vb + vc;
  const double ma = (2.0 * sigma - va) / 5.0;  // midpoint opposite the anchor
  const double mb = (2.0 * sigma - vb) / 5.0;  // opposite the +e1 corner
  const double mc = (2.0 * sigma - vc) / 5.0;  // opposite the +e2 corner
  const std::int64_t h = side / 2;
  fill_harmonic(g, out, ai, aj, h, va, mc, mb);
  fill_harmonic(g, out, ai + h, aj, h, mc, vb, ma);
  fill_harmonic(g, out, ai, aj + h, h, mb, ma, vc);
}

} // namespace

Field harmonic_extension(const GasketGraph& g, const Field& coarse) {
  const int m = coarse.level;
  const int n = g.level();
  if (m > n) throw validation_error("harmonic_extension: coarse level exceeds target level");
  const GasketGraph cg = GasketGraph::build(m);
  if (coarse.v.size() != static_cast<std::size_t>(cg.vertex_count()))
    throw validation_error("harmonic_extension: coarse field size does not match its level");

  Field out = make_field(g);
  const std::int64_t block = std::int64_t{1} << (n - m);
  for (const auto& cell : cg.cells()) {
    const Address a = cg.address(cell[0]).scaled_to(n);
    fill_harmonic(g, out, a.i, a.j, block, coarse[cell[0]], coarse[cell[1]], coarse[cell[2]]);
  }
  return out;
}

Field harmonic_function(const GasketGraph& g, double b0, double b1, double b2) {
  Field corners{0, {0.0, 0.0, 0.0}};
  // level-0 vertex order is (j,i)-sorted: a0=(0,0), a2=(1,0), a1=(0,1)
  const GasketGraph g0 = GasketGraph::build(0);
  corners[g0.index_of(Address{0, 0, 0})] = b0;
  corners[g0.index_of(Address{0, 1, 0})] = b1;
  corners[g0.index_of(Address{1, 0, 0})] = b2;
  return harmonic_extension(g, corners);
}

double normal_derivative(const GasketGraph& g, const Field& u, int corner) {
  require_same_level(g, u, "normal_derivative");
  if (corner < 0 || corner > 2) throw validation_error("corner index must be 0, 1 or 2");
  const VertexId a = g.boundary()[corner];
  double s = 0.0;
  for (const VertexId* y = g.neighbors_begin(a); y != g.neighbors_end(a); ++y)
    s += u[*y] - u[a];
  return pow53(g.level()) * s;
}

double integration_by_parts_defect(const GasketGraph& g, const Field& u, const Field& v) {
  const Field lv = apply_laplacian_dirichlet(g, v);
  const Field lu = apply_laplacian_dirichlet(g, u);
  double boundary = 0.0;
  for (int i = 0; i < 3; ++i) {
    const VertexId a = g.boundary()[i];
    boundary += u[a] * normal_derivative(g, v, i) - v[a] * normal_derivative(g, u, i);
  }
  return inner_product(g, u, lv) - inner_product(g, v, lu) + boundary;
}

double triangle_energy(const GasketGraph& g, const Field& u, const TriangleBlock& block) {
  require_same_level(g, u, "triangle_energy");
  if (block.level != g.level())
    throw validation_error("triangle_energy: block drawn from a different level");
  std::vector<char> in(g.vertex_count(), 0);
  for (VertexId m : block.members) in[m] = 1;
  double s = 0.0;
  for (const auto& e : g.edges())
    if (in[e[0]] && in[e[1]]) {
      const double d = u[e[1]] - u[e[0]];
      s += d * d;
    }
  return s * pow53(g.level());
}

double holder_exponent() { return std::log(5.0 / 3.0) / (2.0 * std::log(2.0)); }

double holder_ratio(const GasketGraph& g, const Field& u) {
  require_same_level(g, u, "holder_ratio");
  const double energy = dirichlet_form(g, u, u);
  if (!(energy > 0.0)) throw validation_error("holder_ratio: field has zero Dirichlet energy");
  const double alpha = holder_exponent();
  std::vector<double> xs(g.vertex_count()), ys(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const ExactPoint p = g.coordinates(v);
    xs[v] = p.x();
    ys[v] = p.y();
  }
  double best = 0.0;
  for (VertexId x = 0; x < g.vertex_count(); ++x)
    for (VertexId y = x + 1; y < g.vertex_count(); ++y) {
      const double dx = xs[x] - xs[y], dy = ys[x] - ys[y];
      const double dist = std::sqrt(dx * dx + dy * dy);
      const double r = std::abs(u[x] - u[y]) / std::pow(dist, alpha);
      if (r > best) best = r;
    }
  return best / std::sqrt(energy);
}

} // namespace gasket
