#include "gasket/hydro.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <thread>

#include "gasket/io.hpp"
#include "gasket/operators.hpp"

namespace gasket {

Configuration local_equilibrium_init(const GasketGraph& g, const RateFunction& rate,
                                     const Field& density, std::uint64_t seed) {
  const Ensemble e = make_ensemble_from_density(g, rate, density);
  return sample_product(e, seed);
}

double hminus1_error(const HMinusOne& hm, const GasketGraph& g, const Configuration& c,
                     const Field& u) {
  if (c.level != g.level() || u.level != g.level())
    throw validation_error("hminus1_error: level mismatch");
  Field v = make_field(g);
  for (VertexId x = 0; x < g.vertex_count(); ++x) v[x] = c.occ[x] - u[x];
  for (VertexId b : g.boundary()) v[b] = 0.0;
  return hm.norm_sq(v);
}

Field green_diagonal_laplacian(const GasketGraph& g, const std::string& cache_dir) {
  const int n = g.level();
  Field diag = make_field(g);
  bool loaded = false;
  std::string path;
  if (!cache_dir.empty()) {
    path = cache_dir + "/green_diag_n" + std::to_string(n) + ".csv";
    if (std::filesystem::exists(path)) {
      diag = io::read_field_csv(path, g);
      loaded = true;
    }
  }
  if (!loaded) {
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (g.is_boundary(v)) continue;
      diag[v] = green_column_direct(g, v).values[v];
    }
    if (!path.empty()) {
      std::filesystem::create_directories(cache_dir);
      io::write_field_csv(path, g, diag);
    }
  }
  Field dg = make_field(g);
  const double scale = pow5(n);
  for (VertexId x = 0; x < g.vertex_count(); ++x) {
    if (g.is_boundary(x)) continue;
    double s = -g.degree(x) * diag[x];
    for (const VertexId* y = g.neighbors_begin(x); y != g.neighbors_end(x); ++y)
      if (!g.is_boundary(*y)) s += diag[*y];
    dg[x] = scale * s;
  }
  return dg;
}

namespace {

// Running sums for the drift integrals. The xi-only pieces update in O(1) per
// event; the u-dependent pieces are kept for both endpoints of the current
// trace interval so each holding interval contributes a trapezoid in u.
struct DecompAccum {
  const GasketGraph* g = nullptr;
  const RateFunction* rate = nullptr;
  const PhiFunction* phi = nullptr;
  const PdeTrace* trace = nullptr;
  const Field* dgreen = nullptr;
  const Configuration* cfg = nullptr;

  double a1 = 0.0;  // sum g(xi) xi
  double a2 = 0.0;  // sum g(xi)
  double w = 0.0;   // sum g(xi) dG
  double bl = 0.0, br = 0.0;  // sum g(xi) u(x), left/right endpoint
  double cl = 0.0, cr = 0.0;  // sum phi(u) xi
  double dl = 0.0, dr = 0.0;  // sum phi(u) u
  std::size_t interval = 0;   // index of the left endpoint in the trace
  std::vector<double> phil, phir;  // phi(u) per vertex at the endpoints

  double inv5n = 1.0;
  double two_over_3n = 1.0;
  double inv32n = 1.0;
  double f_int = 0.0;
  double g_int = 0.0;

  void init(std::size_t iv) {
    interval = iv;
    const Field& ul = trace->fields[interval];
    const Field& ur = trace->fields[std::min(interval + 1, trace->fields.size() - 1)];
    const auto& occ = cfg->occ;
    a1 = a2 = w = bl = br = cl = cr = dl = dr = 0.0;
    phil.resize(occ.size());
    phir.resize(occ.size());
    for (VertexId x = 0; x < g->vertex_count(); ++x) {
      if (g->is_boundary(x)) {
        phil[x] = phir[x] = 0.0;
        continue;
      }
      const double gx = (*rate)(occ[x]);
      const double k = occ[x];
      phil[x] = (*phi)(ul[x]);
      phir[x] = (*phi)(ur[x]);
      a1 += gx * k;
      a2 += gx;
      w += gx * (*dgreen)[x];
      bl += gx * ul[x];
      br += gx * ur[x];
      cl += phil[x] * k;
      cr += phir[x] * k;
      dl += phil[x] * ul[x];
      dr += phir[x] * ur[x];
    }
  }

  void dwell(double dtau) {
    const double ds = dtau * inv5n;
    const double sum_left = a1 - a2 - bl - cl + dl;
    const double sum_right = a1 - a2 - br - cr + dr;
    f_int += ds * 0.5 * (sum_left + sum_right) * two_over_3n;
    g_int += ds * w * inv32n;
  }

  void touch(VertexId x, int delta) {
    const auto& occ = cfg->occ;
    const std::int64_t k_old = occ[x];
    const std::int64_t k_new = k_old + delta;
    const double g_old = (*rate)(k_old);
    const double g_new = (*rate)(k_new);
    const double dgv = g_new - g_old;
    a1 += g_new * k_new - g_old * k_old;
    a2 += dgv;
    w += dgv * (*dgreen)[x];
    const Field& ul = trace->fields[interval];
    const Field& ur = trace->fields[std::min(interval + 1, trace->fields.size() - 1)];
    bl += dgv * ul[x];
    br += dgv * ur[x];
    cl += phil[x] * delta;
    cr += phir[x] * delta;
  }

  void event(int kind, VertexId from, VertexId to) {
    if (kind != kEventInject) touch(from, -1);
    if (kind != kEventAnnihilate && !g->is_boundary(to)) touch(to, +1);
  }

  void sample(std::size_t index, double, const Configuration&) {
    if (index + 1 < trace->fields.size()) init(index);
  }
};

struct ReplicaOut {
  double init_err = 0.0, final_err = 0.0, f = 0.0, g = 0.0;
  std::uint64_t events = 0;
};

template <class Body>
std::vector<ReplicaOut> fan_out(int replicas, int threads, const Body& body) {
  std::vector<ReplicaOut> out(replicas);
  const int use = std::max(1, std::min(threads, replicas));
  if (use == 1) {
    for (int r = 0; r < replicas; ++r) out[r] = body(r);
    return out;
  }
  std::atomic<int> cursor{0};
  std::exception_ptr err;
  std::mutex err_mx;
  std::vector<std::thread> pool;
  for (int t = 0; t < use; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        const int r = cursor.fetch_add(1);
        if (r >= replicas) return;
        try {
          out[r] = body(r);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mx);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

struct Stat {
  double mean = 0.0, se = 0.0;
};

Stat stat_of(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  if (xs.size() > 1) var /= static_cast<double>(xs.size() - 1);
  s.se = std::sqrt(var / static_cast<double>(xs.size()));
  return s;
}

} // namespace

DecompositionTerms decomposition_terms(const GasketGraph& g, const RateFunction& rate,
                                       const std::array<double, 3>& alpha,
                                       const Configuration& initial, const PdeTrace& trace,
                                       const PhiFunction& phi, const Field& dgreen,
                                       const HMinusOne& hm, std::uint64_t dynamics_seed,
                                       int block_scale) {
  (void)block_scale;  // recorded by callers; the F/G integrals are block-free
  DecompositionTerms out;
  out.init_err = hminus1_error(hm, g, initial, trace.fields.front());

  ZrpSimulator sim(g, rate, alpha);
  sim.reset(initial);

  DecompAccum acc;
  acc.g = &g;
  acc.rate = &rate;
  acc.phi = &phi;
  acc.trace = &trace;
  acc.dgreen = &dgreen;
  acc.cfg = &sim.config();
  acc.inv5n = 1.0 / pow5(g.level());
  acc.two_over_3n = 2.0 * pow3inv(g.level());
  acc.inv32n = pow3inv(g.level()) * pow3inv(g.level());
  acc.init(0);

  Rng rng(dynamics_seed);
  sim.run(trace.times.back(), trace.times, rng, acc);

  out.final_err = hminus1_error(hm, g, sim.config(), trace.fields.back());
  out.f_term = acc.f_int;
  out.g_term = acc.g_int;
  out.events = sim.counters().events;
  return out;
}

HydroResult run_hydro(const HydroExperiment& e) {
  if (e.levels.empty()) throw validation_error("run_hydro: no levels requested");
  if (e.replicas < 1) throw validation_error("run_hydro: need at least one replica");
  if (e.horizon < 0.0) throw validation_error("run_hydro: negative horizon");

  HydroResult result;
  const PhiFunction phi = phi_from_rate(e.rate, e.rho_max);

  for (int level : e.levels) {
    const auto wall0 = std::chrono::steady_clock::now();
    const GasketGraph g = GasketGraph::build(level);
    Field u0 = harmonic_extension(g, e.u0_coarse);
    for (int i = 0; i < 3; ++i)
      if (std::abs(u0[g.boundary()[i]] - e.alpha[i]) > 1e-12)
        throw validation_error("run_hydro: profile does not match alpha at corner " +
                               std::to_string(i));

    PdeProblem prob;
    prob.level = level;
    prob.u0 = u0;
    for (int i = 0; i < 3; ++i) prob.alpha[i] = u0[g.boundary()[i]];
    prob.phi = phi;
    prob.horizon = e.horizon;
    prob.scheme = PdeScheme::Explicit;
    prob.control = e.pde_control;
    const PdeTrace trace = integrate(g, prob);

    const Field dgreen = e.horizon > 0.0 ? green_diagonal_laplacian(g, e.green_cache_dir)
                                         : make_field(g);
    const HMinusOne hm(g);
    const Ensemble ens = make_ensemble_from_density(g, e.rate, u0);

    const auto replica = [&](int r) {
      ReplicaOut ro;
      const Configuration c0 = sample_product(ens, e.seed + static_cast<std::uint64_t>(r));
      if (e.horizon == 0.0) {
        ro.init_err = hminus1_error(hm, g, c0, u0);
        ro.final_err = ro.init_err;
        return ro;
      }
      const DecompositionTerms d =
          decomposition_terms(g, e.rate, e.alpha, c0, trace, phi, dgreen, hm,
                              mix_seed(e.seed + static_cast<std::uint64_t>(r), 2), e.block_scale);
      ro.init_err = d.init_err;
      ro.final_err = d.final_err;
      ro.f = d.f_term;
      ro.g = d.g_term;
      ro.events = d.events;
      return ro;
    };
    const std::vector<ReplicaOut> outs = fan_out(e.replicas, e.threads, replica);

    std::vector<double> finals, inits, fs, gs, defects;
    for (const auto& ro : outs) {
      finals.push_back(ro.final_err);
      inits.push_back(ro.init_err);
      fs.push_back(ro.f);
      gs.push_back(ro.g);
      defects.push_back(ro.final_err - ro.init_err + ro.f - ro.g);
    }
    const Stat sf = stat_of(finals), si = stat_of(inits), sF = stat_of(fs), sG = stat_of(gs),
               sD = stat_of(defects);

    HydroRow row;
    row.level = level;
    row.replicas = e.replicas;
    row.t = e.horizon;
    row.h1m_err_mean = sf.mean;
    row.h1m_err_se = sf.se;
    row.h1m_init_mean = si.mean;
    row.h1m_init_se = si.se;
    row.f_mean = sF.mean;
    row.f_se = sF.se;
    row.g_mean = sG.mean;
    row.g_se = sG.se;
    row.defect_mean = sD.mean;
    row.defect_se = sD.se;
    row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    result.rows.push_back(row);
  }
  return result;
}

} // namespace gasket
