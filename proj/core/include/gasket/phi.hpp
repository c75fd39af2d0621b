#pragma once

#include <functional>
#include <string>
#include <vector>

namespace gasket {

// Macroscopic flux phi with its derivative and a working-range ellipticity
// constant eps0 satisfying eps0 <= phi' <= 1/eps0 on [0, range_max].
struct PhiFunction {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  double eps0 = 1.0;
  double range_max = 1.0;
  std::string id;

  // clamped evaluation: negative undershoot is pinned to 0 before phi
  double operator()(double u) const { return phi(u < 0.0 ? 0.0 : u); }
  double slope(double u) const { return dphi(u < 0.0 ? 0.0 : u); }
};

PhiFunction phi_linear(double range_max = 8.0);
PhiFunction phi_zr_geometric(double range_max = 8.0);  // u / (1 + u)

// Monotone value table with monotone piecewise-cubic interpolation
// (Fritsch-Carlson slopes); linear extrapolation beyond the table.
PhiFunction phi_from_table(const std::vector<double>& u, const std::vector<double>& phi_u);

// Validates that sampled phi' stays within [eps0, 1/eps0] on [0, range_max].
void check_ellipticity(const PhiFunction& f, int samples = 512);

} // namespace gasket
