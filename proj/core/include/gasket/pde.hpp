#pragma once

#include <array>
#include <vector>

#include "gasket/field.hpp"
#include "gasket/graph.hpp"
#include "gasket/phi.hpp"

namespace gasket {

enum class PdeScheme { Explicit, Implicit };

struct StepControl {
  double theta = 0.5;           // explicit step dt = theta * eps0 * 5^-n / 2
  double implicit_factor = 0.1; // implicit dt as a multiple of the explicit dt
  double dt_override = 0.0;     // > 0 forces the step size
  int uniform_samples = 64;     // recorded sample times: uniform part
  int geometric_samples = 24;   // and a geometric early-time refinement
  double geometric_start = 1e-4;  // first geometric sample at this fraction of T
  double newton_tol = 1e-12;
  int newton_max_iter = 30;
};

// du/dt = Laplacian phi(u) on the interior, u = alpha_i at the corners.
struct PdeProblem {
  int level = 0;
  Field u0;
  std::array<double, 3> alpha{0.0, 0.0, 0.0};
  PhiFunction phi;
  double horizon = 0.0;
  PdeScheme scheme = PdeScheme::Explicit;
  StepControl control;
};

struct PdeTrace {
  int level = 0;
  std::array<double, 3> alpha{};
  std::vector<double> times;
  std::vector<Field> fields;
  std::vector<double> l2_sq;      // ||u_t||_{0,n}^2
  std::vector<double> h1_sq;      // E_n(u_t, u_t)
  std::vector<double> h1_integral;  // trapezoid of E_n over [0, t], per step
  std::size_t steps_taken = 0;

  const Field& at(std::size_t k) const { return fields[k]; }
  const Field& final_field() const { return fields.back(); }
};

std::vector<double> make_time_grid(double horizon, const StepControl& c);

PdeTrace integrate(const GasketGraph& g, const PdeProblem& p);

// Both sides of the zero-boundary energy estimate
//   ||u_T||^2 + 2 eps0 int_0^T ||u_t||_1^2 dt <= ||u_0||^2.
struct EnergyReport {
  double lhs = 0.0;
  double rhs = 0.0;
};
EnergyReport energy_report(const PdeTrace& trace, double eps0);

// || u_t - v_t ||^2_{-1,n} along a shared sample grid for two initial fields
// with identical boundary values; non-increasing along the flow.
std::vector<double> contraction_check(const GasketGraph& g, const PdeProblem& base,
                                      const Field& u0, const Field& v0);

} // namespace gasket
