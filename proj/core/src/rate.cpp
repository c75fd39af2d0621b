#include "gasket/rate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "gasket/errors.hpp"

namespace gasket {

namespace {

void finalize(RateFunction& g) {
  g.table.resize(g.k_max + 1);
  g.table[0] = 0.0;
  for (std::int64_t k = 1; k <= g.k_max; ++k) g.table[k] = g.eval(k);
  g.monotone = true;
  g.increment_bound = 0.0;
  for (std::int64_t k = 0; k < g.k_max; ++k) {
    const double d = g.table[k + 1] - g.table[k];
    if (d < 0.0) g.monotone = false;
    g.increment_bound = std::max(g.increment_bound, std::abs(d));
  }
}

} // namespace

RateFunction rate_linear(std::int64_t k_max) {
  RateFunction g;
  g.k_max = k_max;
  g.eval = [](std::int64_t k) { return static_cast<double>(k); };
  g.id = "linear";
  finalize(g);
  return g;
}

RateFunction rate_indicator(std::int64_t k_max) {
  RateFunction g;
  g.k_max = k_max;
  g.eval = [](std::int64_t k) { return k > 0 ? 1.0 : 0.0; };
  g.id = "indicator";
  finalize(g);
  return g;
}

RateFunction rate_from_table(const std::vector<double>& values, std::int64_t k_max) {
  if (values.size() < 2) throw validation_error("rate table needs at least g(0) and g(1)");
  if (values[0] != 0.0) throw validation_error("rate table must have g(0) = 0");
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k] >= 0.0) || !std::isfinite(values[k]))
      throw validation_error("rate table entries must be finite and non-negative");
  RateFunction g;
  g.k_max = k_max;
  auto vals = std::make_shared<std::vector<double>>(values);
  g.eval = [vals](std::int64_t k) {
    if (k <= 0) return 0.0;
    const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(k), vals->size() - 1);
    return (*vals)[idx];
  };
  g.id = "table";
  finalize(g);
  return g;
}

double fugacity_radius(const RateFunction& g) {
  // radius = liminf (g(k)!)^{1/k}; use the tabulated tail's geometric mean
  double log_acc = 0.0;
  double best = 0.0;
  bool any = false;
  for (std::int64_t k = 1; k <= g.k_max; ++k) {
    const double v = g(k);
    if (v <= 0.0) return 0.0;  // rate vanishes above 0: no product measure
    log_acc += std::log(v);
    if (k >= g.k_max / 2) {
      const double est = std::exp(log_acc / static_cast<double>(k));
      if (!any || est < best) best = est;
      any = true;
    }
  }
  return best;
}

MarginalStats marginal_stats(const RateFunction& g, double phi) {
  if (phi < 0.0) throw validation_error("fugacity must be non-negative");
  MarginalStats s;
  if (phi == 0.0) return s;

  double term = 1.0;  // phi^k / g(k)!
  double z = 1.0, m1 = 0.0, m2 = 0.0;
  std::int64_t k = 0;
  const double tol = 1e-12;
  for (;;) {
    ++k;
    const double gk = g(k);
    if (gk <= 0.0)
      throw numerical_error("marginal series: rate vanishes at k=" + std::to_string(k));
    term *= phi / gk;
    z += term;
    m1 += term * static_cast<double>(k);
    m2 += term * static_cast<double>(k) * static_cast<double>(k);
    if (!std::isfinite(z))
      throw numerical_error("marginal series diverges: fugacity at or above the radius");
    // geometric tail bounds once the term ratio drops below one (for monotone
    // rates q dominates every later ratio):
    //   sum q^j = Q, sum j q^j = q/(1-q)^2, sum j^2 q^j = q(1+q)/(1-q)^3
    if (k >= 4) {
      const double q = phi / g(k + 1);
      if (q < 1.0) {
        const double kk = static_cast<double>(k);
        const double Q = q / (1.0 - q);
        const double J1 = q / ((1.0 - q) * (1.0 - q));
        const double J2 = q * (1.0 + q) / ((1.0 - q) * (1.0 - q) * (1.0 - q));
        const double tail_z = term * Q;
        const double tail_m1 = term * (kk * Q + J1);
        const double tail_m2 = term * (kk * kk * Q + 2.0 * kk * J1 + J2);
        if (tail_z <= tol * z && tail_m1 <= tol * (m1 + z) && tail_m2 <= tol * (m2 + z)) break;
      }
    }
    if (k >= g.k_max)
      throw numerical_error("marginal series: truncation cap reached with tail mass > 1e-9");
  }
  s.z = z;
  s.mean = m1 / z;
  s.variance = m2 / z - s.mean * s.mean;
  s.terms = static_cast<int>(k) + 1;
  return s;
}

double rho_of_phi(const RateFunction& g, double phi) { return marginal_stats(g, phi).mean; }

double phi_of_rho(const RateFunction& g, double rho) {
  if (rho < 0.0) throw validation_error("density must be non-negative");
  if (rho == 0.0) return 0.0;
  const double radius = fugacity_radius(g);

  // bracket [lo, hi] with rho(hi) >= rho; stay inside the zone where the
  // truncated series still meets its tail bound (fugacities very close to the
  // radius need more than k_max terms and are treated as at/above critical)
  const double safe_hi = radius > 0.0 ? 0.96 * radius : 1.0;
  double hi = std::min(1.0, 0.5 * safe_hi);
  double rho_hi = rho_of_phi(g, hi);
  int grow = 0;
  while (rho_hi < rho) {
    if (safe_hi - hi <= 1e-13 * safe_hi)
      throw numerical_error("phi_of_rho: density at or above the critical density");
    hi = std::min(safe_hi, hi + 0.5 * (safe_hi - hi) + 1e-14 * safe_hi);
    rho_hi = rho_of_phi(g, hi);
    if (++grow > 600) throw numerical_error("phi_of_rho: bracketing failed");
  }

  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const MarginalStats s = marginal_stats(g, mid);
    if (s.mean < rho)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-16 * (1.0 + hi)) break;
  }
  // Newton polish: drho/dphi = variance / phi
  double phi = 0.5 * (lo + hi);
  for (int it = 0; it < 4 && phi > 0.0; ++it) {
    const MarginalStats s = marginal_stats(g, phi);
    const double slope = s.variance / phi;
    if (!(slope > 0.0)) break;
    const double next = phi - (s.mean - rho) / slope;
    if (!(next > lo) || !(next < hi)) break;
    phi = next;
  }
  return phi;
}

PhiFunction phi_from_rate(const RateFunction& g, double rho_max, int grid) {
  if (!(rho_max > 0.0)) throw validation_error("phi_from_rate: rho_max must be positive");
  std::vector<double> rho(grid + 1), phi(grid + 1);
  for (int k = 0; k <= grid; ++k) {
    rho[k] = rho_max * k / grid;
    phi[k] = phi_of_rho(g, rho[k]);
  }
  PhiFunction f = phi_from_table(rho, phi);
  f.id = "duality:" + g.id;
  return f;
}

} // namespace gasket
