#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gasket/field.hpp"
#include "gasket/graph.hpp"
#include "gasket/green.hpp"
#include "gasket/pde.hpp"
#include "gasket/rate.hpp"
#include "gasket/zrp.hpp"

namespace gasket {

// One hydrodynamic-limit sweep: for each level, co-evolve the particle system
// and the flux-form heat equation from a shared macroscopic profile, then
// measure E || xi_t - u_t ||^2_{-1,n} and the drift terms of its expectation
// identity.
struct HydroExperiment {
  std::vector<int> levels;
  RateFunction rate;
  Field u0_coarse;                  // coarse profile, harmonically interpolated per level
  std::array<double, 3> alpha{};    // boundary densities; must match u0 at the corners
  double horizon = 0.0;             // macroscopic time
  int replicas = 100;
  int block_scale = 1;              // recorded with the run (the F/G terms do not use it)
  std::uint64_t seed = 1;
  int threads = 1;
  double rho_max = 8.0;             // range of the tabulated duality flux
  StepControl pde_control;
  std::string green_cache_dir;      // optional on-disk cache of the diagonal field
};

struct HydroRow {
  int level = 0;
  int replicas = 0;
  double t = 0.0;
  double h1m_err_mean = 0.0, h1m_err_se = 0.0;
  double h1m_init_mean = 0.0, h1m_init_se = 0.0;
  double f_mean = 0.0, f_se = 0.0;
  double g_mean = 0.0, g_se = 0.0;
  double wall_s = 0.0;
  // martingale defect (final - init + F - G), zero in expectation
  double defect_mean = 0.0, defect_se = 0.0;
};

struct HydroResult {
  std::vector<HydroRow> rows;
};

// Product sample whose site marginals track the density profile via duality.
Configuration local_equilibrium_init(const GasketGraph& g, const RateFunction& rate,
                                     const Field& density, std::uint64_t seed);

// || xi - u ||^2_{-1,n} with v = xi - u on the interior and 0 at the corners.
double hminus1_error(const HMinusOne& hm, const GasketGraph& g, const Configuration& c,
                     const Field& u);

// Laplacian of the Green diagonal, computed with one column solve per interior
// vertex (cached on disk when cache_dir is set; CSV keyed by (i, j)).
Field green_diagonal_laplacian(const GasketGraph& g, const std::string& cache_dir = "");

// Per-replica decomposition of the H_-1 martingale identity. The trajectory is
// regenerated from (seed, initial configuration); both time integrals use the
// exact holding times of the jump chain.
struct DecompositionTerms {
  double f_term = 0.0;   // int (2/3^n) sum_x (g(xi)-phi(u))(xi-u) - g(xi) ds
  double g_term = 0.0;   // int 3^{-2n} sum_x g(xi) * Laplacian G(x) ds
  double init_err = 0.0;
  double final_err = 0.0;
  std::uint64_t events = 0;
};
DecompositionTerms decomposition_terms(const GasketGraph& g, const RateFunction& rate,
                                       const std::array<double, 3>& alpha,
                                       const Configuration& initial, const PdeTrace& trace,
                                       const PhiFunction& phi, const Field& dgreen,
                                       const HMinusOne& hm, std::uint64_t dynamics_seed,
                                       int block_scale);

HydroResult run_hydro(const HydroExperiment& e);

// result CSV, columns exactly:
// level,replicas,t,h1m_err_mean,h1m_err_se,h1m_init_mean,h1m_init_se,
// F_mean,F_se,G_mean,G_se,wall_s
void write_hydro_csv(const std::string& path, const std::vector<HydroRow>& rows);
std::vector<HydroRow> read_hydro_csv(const std::string& path);

} // namespace gasket
