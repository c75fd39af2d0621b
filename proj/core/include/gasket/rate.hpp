#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gasket/phi.hpp"

namespace gasket {

// Microscopic jump rate g: N -> [0, inf), g(0) = 0. Values are tabulated up
// to k_max for the hot paths; the evaluator covers anything beyond.
struct RateFunction {
  std::vector<double> table;  // g(0..k_max)
  std::function<double(std::int64_t)> eval;
  bool monotone = false;            // condition (C)
  double increment_bound = 0.0;     // sup_k |g(k+1) - g(k)|  (condition (SG) part i)
  double sg_k0 = 0.0;               // exposed (SG) part ii parameters, not used numerically
  double sg_a2 = 0.0;
  std::int64_t k_max = 1024;
  std::string id;

  double operator()(std::int64_t k) const {
    if (k < static_cast<std::int64_t>(table.size())) return table[k];
    return eval(k);
  }
};

RateFunction rate_linear(std::int64_t k_max = 1024);
RateFunction rate_indicator(std::int64_t k_max = 1024);
// Table from rows g(0..K); constant extension beyond K. Requires g(0) = 0.
RateFunction rate_from_table(const std::vector<double>& values, std::int64_t k_max = 1024);

// Estimated convergence radius of sum phi^k / g(k)! (geometric-mean based;
// exact for eventually-constant and unbounded monotone rates used here).
double fugacity_radius(const RateFunction& g);

// Single-site partition data at fugacity phi, with relative tail bound 1e-12.
struct MarginalStats {
  double z = 1.0;       // normalization
  double mean = 0.0;    // rho(phi)
  double variance = 0.0;
  int terms = 1;
};
MarginalStats marginal_stats(const RateFunction& g, double phi);

// rho(phi) = mean occupation under the product marginal, and its inverse.
double rho_of_phi(const RateFunction& g, double phi);
double phi_of_rho(const RateFunction& g, double rho);

// Macroscopic flux induced by the rate function, tabulated on [0, rho_max]
// and interpolated monotonically; phi'(rho) = phi / Var_k(phi) from the series.
PhiFunction phi_from_rate(const RateFunction& g, double rho_max, int grid = 1024);

} // namespace gasket
