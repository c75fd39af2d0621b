#include "gasket/zrp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "gasket/operators.hpp"

namespace gasket {

// --- ensembles ---------------------------------------------------------------

namespace {

std::vector<double> site_cdf(const RateFunction& rate, double phi) {
  std::vector<double> cdf;
  if (phi < 0.0) throw validation_error("ensemble: fugacity must be non-negative");
  double term = 1.0, z = 1.0;
  std::vector<double> terms{1.0};
  std::int64_t k = 0;
  if (phi > 0.0) {
    for (;;) {
      ++k;
      const double gk = rate(k);
      if (gk <= 0.0) throw numerical_error("ensemble: rate vanishes at k>0");
      term *= phi / gk;
      terms.push_back(term);
      z += term;
      if (!std::isfinite(z))
        throw numerical_error("ensemble: fugacity at or above the series radius");
      if (k >= 4) {
        const double q = phi / rate(k + 1);
        if (q < 1.0 && term * q / (1.0 - q) <= 1e-15 * z) break;
      }
      if (k >= rate.k_max)
        throw numerical_error("ensemble: truncation cap reached with tail mass > 1e-9");
    }
  }
  cdf.resize(terms.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    acc += terms[i] / z;
    cdf[i] = acc;
  }
  cdf.back() = 1.0;
  return cdf;
}

} // namespace

Ensemble make_ensemble_from_fugacity(const GasketGraph& g, const RateFunction& rate,
                                     const Field& fugacity) {
  require_same_level(g, fugacity, "make_ensemble_from_fugacity");
  Ensemble e;
  e.level = g.level();
  e.fugacity = fugacity;
  e.cdf.resize(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.is_boundary(v)) continue;
    e.cdf[v] = site_cdf(rate, fugacity[v]);
  }
  return e;
}

Ensemble make_ensemble_from_density(const GasketGraph& g, const RateFunction& rate,
                                    const Field& density) {
  require_same_level(g, density, "make_ensemble_from_density");
  Field fug = make_field(g);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (density[v] < 0.0) throw validation_error("ensemble: densities must be non-negative");
    fug[v] = phi_of_rho(rate, density[v]);
  }
  return make_ensemble_from_fugacity(g, rate, fug);
}

Configuration sample_product(const Ensemble& e, std::uint64_t seed) {
  Rng rng(seed);
  Configuration c;
  c.level = e.level;
  c.occ.assign(e.cdf.size(), 0);
  for (std::size_t v = 0; v < e.cdf.size(); ++v) {
    const auto& cdf = e.cdf[v];
    if (cdf.empty()) continue;  // boundary corner
    const double u = rng.u01();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    c.occ[v] = static_cast<std::int32_t>(std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1));
  }
  return c;
}

// --- rate tree ---------------------------------------------------------------

void RateTree::build(const std::vector<double>& leaves) {
  n_ = static_cast<int>(leaves.size());
  cap_ = 1;
  while (cap_ < n_) cap_ *= 2;
  t_.assign(2 * cap_, 0.0);
  for (int i = 0; i < n_; ++i) t_[cap_ + i] = leaves[i];
  for (int i = cap_ - 1; i >= 1; --i) t_[i] = t_[2 * i] + t_[2 * i + 1];
}

void RateTree::set(int leaf, double value) {
  int node = cap_ + leaf;
  t_[node] = value;
  for (node /= 2; node >= 1; node /= 2) t_[node] = t_[2 * node] + t_[2 * node + 1];
}

int RateTree::pick(double u) const {
  int node = 1;
  while (node < cap_) {
    const double left = t_[2 * node];
    if (u < left) {
      node = 2 * node;
    } else {
      u -= left;
      node = 2 * node + 1;
    }
  }
  int leaf = node - cap_;
  // guard against landing on a zero-rate leaf through rounding
  while (leaf < n_ - 1 && t_[cap_ + leaf] <= 0.0) ++leaf;
  while (leaf > 0 && t_[cap_ + leaf] <= 0.0) --leaf;
  return leaf;
}

// --- simulator --------------------------------------------------------------

ZrpSimulator::ZrpSimulator(const GasketGraph& g, const RateFunction& rate,
                           const std::array<double, 3>& alpha_density)
    : g_(&g), rate_(&rate) {
  time_scale_ = pow5(g.level());
  for (int i = 0; i < 3; ++i) {
    if (alpha_density[i] < 0.0)
      throw validation_error("zrp: boundary densities must be non-negative");
    phi_alpha_[i] = phi_of_rho(rate, alpha_density[i]);
  }
  inj_.assign(g.vertex_count(), 0.0);
  for (int i = 0; i < 3; ++i) {
    const VertexId a = g.boundary()[i];
    for (const VertexId* y = g.neighbors_begin(a); y != g.neighbors_end(a); ++y)
      inj_[*y] += phi_alpha_[i];
  }
  config_.level = g.level();
  config_.occ.assign(g.vertex_count(), 0);
  std::vector<double> leaves(g.vertex_count(), 0.0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) leaves[v] = site_rate(v);
  tree_.build(leaves);
}

void ZrpSimulator::reset(Configuration c) {
  if (c.level != g_->level() || c.occ.size() != static_cast<std::size_t>(g_->vertex_count()))
    throw validation_error("zrp: configuration does not match the graph");
  for (VertexId b : g_->boundary())
    if (c.occ[b] != 0) throw validation_error("zrp: corner occupations must be zero");
  for (auto k : c.occ)
    if (k < 0) throw validation_error("zrp: occupations must be non-negative");
  config_ = std::move(c);
  counters_ = SimCounters{};
  tau_ = 0.0;
  std::vector<double> leaves(g_->vertex_count(), 0.0);
  for (VertexId v = 0; v < g_->vertex_count(); ++v) leaves[v] = site_rate(v);
  tree_.build(leaves);
}

double ZrpSimulator::audit_rates() {
  double cached = tree_.total();
  std::vector<double> leaves(g_->vertex_count(), 0.0);
  for (VertexId v = 0; v < g_->vertex_count(); ++v) leaves[v] = site_rate(v);
  double fresh = 0.0;
  for (double r : leaves) fresh += r;
  const double rel = std::abs(fresh - cached) / std::max(1.0, std::abs(fresh));
  tree_.build(leaves);
  ++counters_.audits;
  counters_.max_audit_rel_error = std::max(counters_.max_audit_rel_error, rel);
  return rel;
}

// --- block averages ----------------------------------------------------------

double block_average(const GasketGraph& g, const Configuration& c, const TriangleBlock& b,
                     CornerMode mode, const std::array<double, 3>& alpha) {
  if (c.level != g.level() || b.level != g.level())
    throw validation_error("block_average: level mismatch");
  double sum = 0.0;
  std::int64_t count = 0;
  for (VertexId m : b.members) {
    if (g.is_boundary(m)) {
      if (mode == CornerMode::Omit) continue;
      for (int i = 0; i < 3; ++i)
        if (g.boundary()[i] == m) sum += alpha[i];
      ++count;
    } else {
      sum += c.occ[m];
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

// --- one-block diagnostic ------------------------------------------------------

namespace {

// one probed site, several block scales, one trajectory; the integrand is
// piecewise constant between events, so everything that feeds the dwell
// accumulation is cached and refreshed only by events that touch it
struct OneBlockAccum {
  const GasketGraph* g;
  const RateFunction* rate;
  const PhiFunction* phi;
  const Configuration* cfg;
  VertexId site;
  int variant;
  double inv_scale;  // 5^-n

  struct Scale {
    std::vector<char> member;
    double corner_contrib = 0;
    double inv_count = 0;
    double block_sum = 0;
    double avg = 0;       // cached (block_sum + corner)/count
    double phi_avg = 0;   // cached phi(avg)
    double integral = 0;
  };
  std::vector<Scale> scales;
  double g_site = 0;   // cached g(occupation at the probed site)
  double xi_site = 0;  // cached occupation there

  void refresh_site() {
    xi_site = static_cast<double>(cfg->occ[site]);
    g_site = (*rate)(cfg->occ[site]);
  }
  void refresh_scale(Scale& s) {
    s.avg = (s.block_sum + s.corner_contrib) * s.inv_count;
    s.phi_avg = (*phi)(s.avg);
  }

  void dwell(double dtau) {
    const double w = dtau * inv_scale;
    for (Scale& s : scales) {
      const double val =
          variant == 8 ? g_site - s.phi_avg : xi_site * g_site - s.phi_avg * (1.0 + s.avg);
      s.integral += val * w;
    }
  }
  void event(int kind, VertexId from, VertexId to) {
    // invoked before the occupancy update; apply the deltas per scale
    for (Scale& s : scales) {
      bool touched = false;
      if (kind != kEventInject && s.member[from]) {
        s.block_sum -= 1.0;
        touched = true;
      }
      if (kind != kEventAnnihilate && s.member[to]) {
        s.block_sum += 1.0;
        touched = true;
      }
      if (touched) refresh_scale(s);
    }
    if ((kind != kEventInject && from == site) || (kind != kEventAnnihilate && to == site)) {
      const int delta = (to == site ? 1 : 0) - (from == site ? 1 : 0);
      xi_site = static_cast<double>(cfg->occ[site] + delta);
      g_site = (*rate)(cfg->occ[site] + delta);
    }
  }
  void sample(std::size_t, double, const Configuration&) {}
};

MonteCarloStat stat_from_values(std::vector<double> values) {
  MonteCarloStat stat;
  stat.values = std::move(values);
  double mean = 0.0;
  for (double v : stat.values) mean += v;
  mean /= static_cast<double>(stat.values.size());
  double var = 0.0;
  for (double v : stat.values) var += (v - mean) * (v - mean);
  var /= std::max<std::size_t>(1, stat.values.size() - 1);
  stat.mean = mean;
  stat.se = std::sqrt(var / static_cast<double>(stat.values.size()));
  return stat;
}

} // namespace

std::vector<MonteCarloStat> one_block_diagnostic_multi(const OneBlockSetup& setup,
                                                       const std::vector<int>& scales) {
  const GasketGraph& g = *setup.graph;
  const RateFunction& rate = *setup.rate;
  const VertexId site = g.index_of(setup.location);
  if (g.is_boundary(site))
    throw validation_error("one_block_diagnostic: location must be interior");
  if (scales.empty()) throw validation_error("one_block_diagnostic: no block scales");
  std::vector<TriangleBlock> blocks;
  for (int k : scales) blocks.push_back(g.block_of(site, k));
  // block averages beyond the table range use the monotone linear extension
  const PhiFunction phi = phi_from_rate(rate, 8.0);
  const Ensemble ens = make_ensemble_from_density(g, rate, setup.initial_density);

  std::vector<std::vector<double>> values(scales.size(),
                                          std::vector<double>(setup.replicas, 0.0));
  run_replicas(setup.replicas, setup.threads, [&](int r) {
    ZrpSimulator sim(g, rate, setup.alpha);
    sim.reset(sample_product(ens, setup.seed + static_cast<std::uint64_t>(r)));

    OneBlockAccum acc;
    acc.g = &g;
    acc.rate = &rate;
    acc.phi = &phi;
    acc.cfg = &sim.config();
    acc.site = site;
    acc.variant = setup.variant;
    acc.inv_scale = 1.0 / pow5(g.level());
    acc.scales.resize(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      auto& s = acc.scales[b];
      s.member.assign(g.vertex_count(), 0);
      double corner = 0.0;
      std::int64_t count = 0;
      for (VertexId m : blocks[b].members) {
        if (g.is_boundary(m)) {
          if (setup.corner_mode == CornerMode::Omit) continue;
          for (int i = 0; i < 3; ++i)
            if (g.boundary()[i] == m) corner += setup.alpha[i];
          ++count;
        } else {
          s.member[m] = 1;
          s.block_sum += sim.config().occ[m];
          ++count;
        }
      }
      s.corner_contrib = corner;
      s.inv_count = count > 0 ? 1.0 / static_cast<double>(count) : 0.0;
      acc.refresh_scale(s);
    }
    acc.refresh_site();

    Rng rng(mix_seed(setup.seed + static_cast<std::uint64_t>(r), 1));
    sim.run(setup.horizon, {}, rng, acc);
    for (std::size_t b = 0; b < blocks.size(); ++b)
      values[b][r] = std::abs(acc.scales[b].integral);
    return 0.0;
  });

  std::vector<MonteCarloStat> out;
  out.reserve(scales.size());
  for (auto& v : values) out.push_back(stat_from_values(std::move(v)));
  return out;
}

MonteCarloStat one_block_diagnostic(const OneBlockSetup& setup) {
  return one_block_diagnostic_multi(setup, {setup.block_scale}).front();
}

// --- ordered coupling ----------------------------------------------------------

bool simulate_coupled_ordered(const GasketGraph& g, const RateFunction& rate,
                              const std::array<double, 3>& alpha, Configuration lower,
                              Configuration upper, double t_macro,
                              std::span<const double> sample_times_macro, std::uint64_t seed) {
  if (!rate.monotone)
    throw validation_error("coupled run requires a monotone rate (condition C)");
  const double scale = pow5(g.level());
  std::array<double, 3> phi_alpha{};
  for (int i = 0; i < 3; ++i) phi_alpha[i] = phi_of_rho(rate, alpha[i]);
  std::vector<double> inj(g.vertex_count(), 0.0);
  for (int i = 0; i < 3; ++i) {
    const VertexId a = g.boundary()[i];
    for (const VertexId* y = g.neighbors_begin(a); y != g.neighbors_end(a); ++y)
      inj[*y] += phi_alpha[i];
  }

  auto site_rate = [&](VertexId v) {
    if (g.is_boundary(v)) return 0.0;
    return g.degree(v) * std::max(rate(lower.occ[v]), rate(upper.occ[v])) + inj[v];
  };
  std::vector<double> leaves(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) leaves[v] = site_rate(v);
  RateTree tree;
  tree.build(leaves);

  Rng rng(seed);
  double tau = 0.0;
  const double tau_end = t_macro * scale;
  std::size_t next_sample = 0;
  auto ordered = [&]() {
    for (std::size_t v = 0; v < lower.occ.size(); ++v)
      if (lower.occ[v] > upper.occ[v]) return false;
    return true;
  };

  for (;;) {
    double boundary = tau_end;
    bool is_sample = false;
    if (next_sample < sample_times_macro.size() &&
        sample_times_macro[next_sample] * scale < boundary) {
      boundary = sample_times_macro[next_sample] * scale;
      is_sample = true;
    }
    const double total = tree.total();
    const double wait = total > 0.0 ? rng.exponential(total) : 2.0 * (tau_end - tau) + 1.0;
    if (tau + wait >= boundary) {
      tau = boundary;
      if (is_sample) {
        if (!ordered()) return false;
        ++next_sample;
        continue;
      }
      return ordered();
    }
    tau += wait;
    const int x = tree.pick(rng.u01() * total);
    const double r = tree.leaf(x);
    const double u2 = rng.u01() * r;
    if (u2 < inj[x]) {
      ++lower.occ[x];
      ++upper.occ[x];
      tree.set(x, site_rate(x));
      continue;
    }
    const int deg = g.degree(x);
    int idx = static_cast<int>(rng.u01() * deg);
    if (idx >= deg) idx = deg - 1;
    const VertexId dest = g.neighbors_begin(x)[idx];
    const double gl = rate(lower.occ[x]);
    const double gu = rate(upper.occ[x]);
    const double gmax = std::max(gl, gu);
    const double u3 = rng.u01() * gmax;
    // joint move with probability min/max; otherwise only the larger-rate copy
    const bool move_lower = u3 < gl || gl >= gu;
    const bool move_upper = u3 < gu || gu >= gl;
    const bool dest_interior = !g.is_boundary(dest);
    if (move_lower) {
      --lower.occ[x];
      if (dest_interior) ++lower.occ[dest];
    }
    if (move_upper) {
      --upper.occ[x];
      if (dest_interior) ++upper.occ[dest];
    }
    tree.set(x, site_rate(x));
    if (dest_interior) tree.set(dest, site_rate(dest));
  }
}

// --- replica fan-out -----------------------------------------------------------

std::vector<double> run_replicas(int replicas, int threads,
                                 const std::function<double(int)>& body) {
  std::vector<double> out(replicas, 0.0);
  const int use = std::max(1, std::min(threads, replicas));
  if (use == 1) {
    for (int r = 0; r < replicas; ++r) out[r] = body(r);
    return out;
  }
  std::atomic<int> cursor{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mx;
  for (int t = 0; t < use; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        const int r = cursor.fetch_add(1);
        if (r >= replicas) return;
        try {
          out[r] = body(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mx);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

} // namespace gasket
