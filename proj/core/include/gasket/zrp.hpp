#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gasket/errors.hpp"
#include "gasket/field.hpp"
#include "gasket/graph.hpp"
#include "gasket/phi.hpp"
#include "gasket/rate.hpp"
#include "gasket/rng.hpp"

namespace gasket {

// Particle occupation numbers on V_n; corners stay at zero (the reservoirs
// live outside the configuration).
struct Configuration {
  int level = 0;
  std::vector<std::int32_t> occ;

  std::int64_t total() const {
    std::int64_t s = 0;
    for (auto k : occ) s += k;
    return s;
  }
};

// Product measure with per-site fugacity; site marginals P(k) ~ phi^k / g(k)!.
// CDF tables are built once and shared by all replica draws.
struct Ensemble {
  int level = 0;
  Field fugacity;
  std::vector<std::vector<double>> cdf;
};

Ensemble make_ensemble_from_fugacity(const GasketGraph& g, const RateFunction& rate,
                                     const Field& fugacity);
Ensemble make_ensemble_from_density(const GasketGraph& g, const RateFunction& rate,
                                    const Field& density);
Configuration sample_product(const Ensemble& e, std::uint64_t seed);

struct SimCounters {
  std::uint64_t events = 0;
  std::uint64_t injected = 0;
  std::uint64_t annihilated = 0;
  std::uint64_t audits = 0;
  double max_audit_rel_error = 0.0;
};

// Cumulative-rate index: flat segment tree over per-site total rates.
class RateTree {
public:
  void build(const std::vector<double>& leaves);
  void set(int leaf, double value);
  double leaf(int i) const { return t_[static_cast<std::size_t>(cap_) + i]; }
  double total() const { return cap_ ? t_[1] : 0.0; }
  int pick(double u_scaled) const;  // u_scaled in [0, total)
  int leaf_count() const { return n_; }

private:
  int n_ = 0, cap_ = 0;
  std::vector<double> t_;
};

enum EventKind { kEventJump = 0, kEventAnnihilate = 1, kEventInject = 2 };

struct NullHooks {
  void dwell(double /*dtau_ctmc*/) {}
  // invoked before the occupancy update
  void event(int /*kind*/, VertexId /*from*/, VertexId /*to*/) {}
  void sample(std::size_t /*index*/, double /*t_macro*/, const Configuration& /*c*/) {}
};

// Boundary-driven zero-range process, exact in law. Per-site exit rate is
// deg(x) g(xi(x)); sites next to corner a_i additionally gain particles at
// rate phi(alpha_i) per adjacent corner; jumps into corners annihilate.
// run() advances the rescaled process to macroscopic time t (CTMC horizon
// 5^n t); holding times between events are exact.
class ZrpSimulator {
public:
  ZrpSimulator(const GasketGraph& g, const RateFunction& rate,
               const std::array<double, 3>& alpha_density);

  void reset(Configuration c);
  const Configuration& config() const { return config_; }
  const SimCounters& counters() const { return counters_; }
  double injection_rate(int corner) const { return phi_alpha_[corner]; }
  double elapsed_ctmc() const { return tau_; }

  // Recompute every per-site rate from the configuration and compare with the
  // cached index; relative discrepancy is returned and the index refreshed.
  double audit_rates();

  template <class Hooks>
  void run(double t_macro, std::span<const double> sample_times_macro, Rng& rng, Hooks& hooks) {
    const double scale = time_scale_;
    const double tau_end = tau_ + t_macro * scale;
    std::size_t next_sample = 0;
    // skip sample times before current progress
    while (next_sample < sample_times_macro.size() &&
           sample_times_macro[next_sample] * scale <= tau_ * (1.0 + 1e-15))
      hooks.sample(next_sample, sample_times_macro[next_sample], config_), ++next_sample;

    for (;;) {
      double boundary = tau_end;
      bool boundary_is_sample = false;
      if (next_sample < sample_times_macro.size()) {
        const double ts = sample_times_macro[next_sample] * scale;
        // a sample time coinciding with the horizon must still fire its hook
        if (ts <= boundary) {
          boundary = ts;
          boundary_is_sample = true;
        }
      }

      const double total = tree_.total();
      double wait = total > 0.0 ? rng.exponential(total) : 2.0 * (tau_end - tau_) + 1.0;
      if (tau_ + wait >= boundary) {
        if (boundary > tau_) hooks.dwell(boundary - tau_);
        tau_ = boundary;
        if (boundary_is_sample) {
          hooks.sample(next_sample, sample_times_macro[next_sample], config_);
          ++next_sample;
          continue;
        }
        return;  // reached the horizon
      }

      hooks.dwell(wait);
      tau_ += wait;
      fire_event(rng, hooks);
    }
  }

private:
  template <class Hooks>
  void fire_event(Rng& rng, Hooks& hooks) {
    const double total = tree_.total();
    const int x = tree_.pick(rng.u01() * total);
    const double r = tree_.leaf(x);
    const double u2 = rng.u01() * r;
    if (u2 < inj_[x]) {
      hooks.event(kEventInject, -1, x);
      ++config_.occ[x];
      ++counters_.injected;
      refresh_site(x);
    } else {
      const int deg = g_->degree(x);
      int idx = static_cast<int>(rng.u01() * deg);
      if (idx >= deg) idx = deg - 1;
      const VertexId dest = g_->neighbors_begin(x)[idx];
      if (g_->is_boundary(dest)) {
        hooks.event(kEventAnnihilate, x, dest);
        --config_.occ[x];
        ++counters_.annihilated;
        refresh_site(x);
      } else {
        hooks.event(kEventJump, x, dest);
        --config_.occ[x];
        ++config_.occ[dest];
        refresh_site(x);
        refresh_site(dest);
      }
    }
    ++counters_.events;
    if (counters_.events % audit_interval_ == 0) {
      const double rel = audit_rates();
      if (rel > 1e-9)
        throw numerical_error("zrp: rate-index inconsistency (relative drift " +
                              std::to_string(rel) + ")");
    }
  }

  double site_rate(VertexId v) const {
    if (g_->is_boundary(v)) return 0.0;
    return g_->degree(v) * (*rate_)(config_.occ[v]) + inj_[v];
  }
  void refresh_site(VertexId v) {
    if (!g_->is_boundary(v)) tree_.set(v, site_rate(v));
  }

  const GasketGraph* g_;
  const RateFunction* rate_;
  std::array<double, 3> phi_alpha_{};
  std::vector<double> inj_;
  Configuration config_;
  RateTree tree_;
  SimCounters counters_;
  double tau_ = 0.0;
  double time_scale_ = 1.0;  // 5^n
  std::uint64_t audit_interval_ = 1'000'000;
};

// averaging convention at blocks touching the boundary: substitute the
// reservoir density or omit the corner
enum class CornerMode { Alpha, Omit };

double block_average(const GasketGraph& g, const Configuration& c, const TriangleBlock& b,
                     CornerMode mode, const std::array<double, 3>& alpha);

struct MonteCarloStat {
  double mean = 0.0;
  double se = 0.0;
  std::vector<double> values;
};

struct OneBlockSetup {
  const GasketGraph* graph = nullptr;
  const RateFunction* rate = nullptr;
  std::array<double, 3> alpha{};  // boundary densities
  Field initial_density;          // local-equilibrium profile
  Address location;               // macro location of the probed site
  int block_scale = 1;
  int variant = 8;                // 8: g(xi(x)) - phi(avg); 9: xi g(xi) - phi(avg)(1+avg)
  CornerMode corner_mode = CornerMode::Alpha;
  double horizon = 1.0;           // macroscopic
  int replicas = 100;
  std::uint64_t seed = 1;
  int threads = 1;
};

// E | int_0^t { g(xi_s(x)) - phi(xi_s^k(x)) } ds | and the weighted variant,
// accumulated with exact holding times.
MonteCarloStat one_block_diagnostic(const OneBlockSetup& setup);

// Same, for several block scales over one shared set of trajectories
// (supports paired scale-to-scale comparisons at no extra simulation cost).
std::vector<MonteCarloStat> one_block_diagnostic_multi(const OneBlockSetup& setup,
                                                       const std::vector<int>& scales);

// Shared-clock basic coupling of two ordered configurations (monotone rates).
// Returns true when xi <= xi' sitewise held at every sample time.
bool simulate_coupled_ordered(const GasketGraph& g, const RateFunction& rate,
                              const std::array<double, 3>& alpha, Configuration lower,
                              Configuration upper, double t_macro,
                              std::span<const double> sample_times_macro, std::uint64_t seed);

// Deterministic replica fan-out: results are merged in replica order whatever
// the thread count.
std::vector<double> run_replicas(int replicas, int threads,
                                 const std::function<double(int)>& body);

} // namespace gasket
