#include "gasket/phi.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "gasket/errors.hpp"

namespace gasket {

PhiFunction phi_linear(double range_max) {
  PhiFunction f;
  f.phi = [](double u) { return u; };
  f.dphi = [](double) { return 1.0; };
  f.eps0 = 1.0;
  f.range_max = range_max;
  f.id = "linear";
  return f;
}

PhiFunction phi_zr_geometric(double range_max) {
  PhiFunction f;
  f.phi = [](double u) { return u / (1.0 + u); };
  f.dphi = [](double u) {
    const double d = 1.0 + u;
    return 1.0 / (d * d);
  };
  const double dmin = 1.0 / ((1.0 + range_max) * (1.0 + range_max));
  f.eps0 = std::min(dmin, 1.0);
  f.range_max = range_max;
  f.id = "zr-geometric";
  return f;
}

namespace {

struct CubicTable {
  std::vector<double> x, y, m;  // knots, values, slopes

  double eval(double u) const {
    if (u <= x.front()) return y.front() + m.front() * (u - x.front());
    if (u >= x.back()) return y.back() + m.back() * (u - x.back());
    const auto it = std::upper_bound(x.begin(), x.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
    const double h = x[k + 1] - x[k];
    const double t = (u - x[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return y[k] * (2 * t3 - 3 * t2 + 1) + h * m[k] * (t3 - 2 * t2 + t) +
           y[k + 1] * (-2 * t3 + 3 * t2) + h * m[k + 1] * (t3 - t2);
  }

  double deriv(double u) const {
    if (u <= x.front()) return m.front();
    if (u >= x.back()) return m.back();
    const auto it = std::upper_bound(x.begin(), x.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
    const double h = x[k + 1] - x[k];
    const double t = (u - x[k]) / h;
    const double t2 = t * t;
    return (y[k] * (6 * t2 - 6 * t) + h * m[k] * (3 * t2 - 4 * t + 1) +
            y[k + 1] * (-6 * t2 + 6 * t) + h * m[k + 1] * (3 * t2 - 2 * t)) /
           h;
  }
};

} // namespace

PhiFunction phi_from_table(const std::vector<double>& u, const std::vector<double>& phi_u) {
  const std::size_t n = u.size();
  if (n < 2 || phi_u.size() != n)
    throw validation_error("phi table needs at least two (u, phi) rows of equal length");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(u[k] > u[k - 1])) throw validation_error("phi table abscissae must increase strictly");
    if (!(phi_u[k] > phi_u[k - 1]))
      throw validation_error("phi table values must increase strictly (phi is monotone)");
  }

  auto table = std::make_shared<CubicTable>();
  table->x = u;
  table->y = phi_u;
  // Fritsch-Carlson monotone slopes
  std::vector<double> d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) d[k] = (phi_u[k + 1] - phi_u[k]) / (u[k + 1] - u[k]);
  table->m.assign(n, 0.0);
  table->m[0] = d[0];
  table->m[n - 1] = d[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) table->m[k] = 0.5 * (d[k - 1] + d[k]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = table->m[k] / d[k];
    const double b = table->m[k + 1] / d[k];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      table->m[k] = tau * a * d[k];
      table->m[k + 1] = tau * b * d[k];
    }
  }

  PhiFunction f;
  f.phi = [table](double x) { return table->eval(x); };
  f.dphi = [table](double x) { return table->deriv(x); };
  f.range_max = u.back();
  double dmin = 1e300, dmax = 0.0;
  for (int s = 0; s <= 512; ++s) {
    const double x = u.front() + (u.back() - u.front()) * s / 512.0;
    const double dv = table->deriv(x);
    dmin = std::min(dmin, dv);
    dmax = std::max(dmax, dv);
  }
  if (!(dmin > 0.0)) throw validation_error("phi table produces a non-increasing interpolant");
  f.eps0 = std::min(dmin, 1.0 / dmax);
  f.id = "custom-table";
  return f;
}

void check_ellipticity(const PhiFunction& f, int samples) {
  for (int s = 0; s <= samples; ++s) {
    const double u = f.range_max * s / samples;
    const double d = f.dphi(u);
    if (!(d >= f.eps0 * (1.0 - 1e-9)) || !(d <= (1.0 / f.eps0) * (1.0 + 1e-9)))
      throw validation_error("phi ellipticity constant inconsistent with sampled derivative at u=" +
                             std::to_string(u));
  }
}

} // namespace gasket
