// gasket: command-line front end over the gasket_core library.
//
// Subcommands: graph, harmonic, solve, green, appendix, simulate, hydro,
// verify. Tabular numerics go to CSV (LF endings, '.' decimal point),rich
// output to JSON; every output embeds or is accompanied by a run manifest.
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "gasket/dense.hpp"
#include "gasket/errors.hpp"
#include "gasket/field.hpp"
#include "gasket/graph.hpp"
#include "gasket/green.hpp"
#include "gasket/hydro.hpp"
#include "gasket/io.hpp"
#include "gasket/operators.hpp"
#include "gasket/pde.hpp"
#include "gasket/rate.hpp"
#include "gasket/rng.hpp"
#include "gasket/solver.hpp"
#include "gasket/verify.hpp"
#include "gasket/version.hpp"
#include "gasket/zrp.hpp"

using json = nlohmann::ordered_json;
using namespace gasket;

namespace {

struct ManifestBuilder {
  json params = json::object();
  std::vector<std::pair<std::string, std::string>> inputs;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string subcommand;
  std::string started = io::iso8601_utc_now();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void input(const std::string& path) { inputs.emplace_back(path, io::fnv1a64_file(path)); }

  json finish() const {
    json m;
    m["tool"] = kToolName;
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["parameters"] = params;
    if (has_seed) {
      m["seed"] = seed;
      m["rng"] = Rng::kAlgorithmId;
    }
    m["started_utc"] = started;
    m["finished_utc"] = io::iso8601_utc_now();
    m["wall_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json ins = json::array();
    for (const auto& [p, d] : inputs) ins.push_back(json{{"path", p}, {"digest", d}});
    m["inputs"] = ins;
    return m;
  }
};

void write_json_output(const std::string& path, const ManifestBuilder& mb, json data) {
  json out;
  out["manifest"] = mb.finish();
  out["data"] = std::move(data);
  io::write_text_file(path, out.dump(2) + "\n");
}

void write_sidecar_manifest(const std::string& out_path, const ManifestBuilder& mb) {
  io::write_text_file(out_path + ".manifest.json", mb.finish().dump(2) + "\n");
}

std::array<double, 3> parse_triple(const std::string& s, const char* what) {
  const auto parts = io::split_csv_line(s);
  if (parts.size() != 3)
    throw validation_error(std::string(what) + ": expected three comma-separated values");
  return {io::parse_double(parts[0]), io::parse_double(parts[1]), io::parse_double(parts[2])};
}

RateFunction parse_rate(const std::string& kind, ManifestBuilder& mb) {
  if (kind == "linear") return rate_linear();
  if (kind == "indicator") return rate_indicator();
  if (kind.rfind("table:", 0) == 0) {
    const std::string path = kind.substr(6);
    mb.input(path);
    const std::string text = io::read_text_file(path);
    std::vector<double> values;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      const std::string line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (line.empty() || line == "\r") continue;
      if (first) {  // header "k,g"
        first = false;
        continue;
      }
      const auto parts = io::split_csv_line(line);
      if (parts.size() != 2) throw validation_error("rate table: expected 'k,g' rows");
      const std::int64_t k = io::parse_int(parts[0]);
      if (k != static_cast<std::int64_t>(values.size()))
        throw validation_error("rate table: rows must list k = 0, 1, 2, ... in order");
      values.push_back(io::parse_double(parts[1]));
    }
    return rate_from_table(values);
  }
  throw validation_error("unknown rate '" + kind + "' (use linear, indicator or table:FILE)");
}

PhiFunction parse_phi(const std::string& kind, const std::string& table_path, double range,
                      ManifestBuilder& mb) {
  if (kind == "linear") return phi_linear(range);
  if (kind == "zr-geometric") return phi_zr_geometric(range);
  if (kind == "custom-table") {
    if (table_path.empty())
      throw validation_error("--phi custom-table requires --phi-table FILE");
    mb.input(table_path);
    const std::string text = io::read_text_file(table_path);
    std::vector<double> u, p;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      const std::string line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (line.empty() || line == "\r") continue;
      if (first) {
        first = false;
        continue;
      }
      const auto parts = io::split_csv_line(line);
      if (parts.size() != 2) throw validation_error("phi table: expected 'u,phi' rows");
      u.push_back(io::parse_double(parts[0]));
      p.push_back(io::parse_double(parts[1]));
    }
    return phi_from_table(u, p);
  }
  throw validation_error("unknown phi '" + kind + "'");
}

// --- graph ---------------------------------------------------------------

int cmd_graph(int level, const std::string& out) {
  ManifestBuilder mb;
  mb.subcommand = "graph";
  mb.params["level"] = level;
  mb.params["out"] = out;

  const GasketGraph g = GasketGraph::build(level);
  json data;
  data["level"] = g.level();
  data["vertex_count"] = g.vertex_count();
  data["edge_count"] = g.edge_count();
  data["measure_weight"] = g.measure_weight();
  json verts = json::array();
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const Address& a = g.address(v);
    const ExactPoint p = g.coordinates(v);
    verts.push_back(json{{"index", v},
                         {"i", a.i},
                         {"j", a.j},
                         {"x_num", p.x_num},
                         {"y_sqrt3_num", p.y_sqrt3_num},
                         {"denom_log2", p.denom_log2}});
  }
  data["vertices"] = std::move(verts);
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back(json::array({e[0], e[1]}));
  data["edges"] = std::move(edges);
  data["boundary"] = json::array({g.boundary()[0], g.boundary()[1], g.boundary()[2]});
  json cells = json::array();
  for (const auto& c : g.cells()) cells.push_back(json::array({c[0], c[1], c[2]}));
  data["cells"] = std::move(cells);

  write_json_output(out, mb, std::move(data));
  std::printf("graph: level %d, %d vertices, %zu edges -> %s\n", g.level(), g.vertex_count(),
              g.edge_count(), out.c_str());
  return 0;
}

// --- harmonic --------------------------------------------------------------

int cmd_harmonic(int level, const std::string& boundary, const std::string& out) {
  ManifestBuilder mb;
  mb.subcommand = "harmonic";
  mb.params["level"] = level;
  mb.params["boundary"] = boundary;
  mb.params["out"] = out;

  const auto b = parse_triple(boundary, "--boundary");
  const GasketGraph g = GasketGraph::build(level);
  const Field h = harmonic_function(g, b[0], b[1], b[2]);
  io::write_field_csv(out, g, h);
  write_sidecar_manifest(out, mb);
  std::printf("harmonic: level %d, boundary (%s) -> %s\n", level, boundary.c_str(), out.c_str());
  return 0;
}

// --- solve -----------------------------------------------------------------

int cmd_solve(int level, const std::string& phi_spec, const std::string& phi_table,
              const std::string& alpha_s, const std::string& u0_path, double u0_const,
              bool have_u0_const, double horizon, const std::string& scheme, double theta,
              double dt, const std::string& out) {
  ManifestBuilder mb;
  mb.subcommand = "solve";
  mb.params["level"] = level;
  mb.params["phi"] = phi_spec;
  if (!phi_table.empty()) mb.params["phi_table"] = phi_table;
  mb.params["alpha"] = alpha_s;
  if (!u0_path.empty()) mb.params["u0"] = u0_path;
  if (have_u0_const) mb.params["u0_const"] = u0_const;
  mb.params["T"] = horizon;
  mb.params["scheme"] = scheme;
  mb.params["theta"] = theta;
  if (dt > 0) mb.params["dt"] = dt;
  mb.params["out"] = out;

  const GasketGraph g = GasketGraph::build(level);
  const auto alpha = parse_triple(alpha_s, "--alpha");

  PdeProblem p;
  p.level = level;
  p.alpha = alpha;
  if (!u0_path.empty()) {
    mb.input(u0_path);
    const Field coarse = io::read_coarse_field_csv(u0_path, GasketGraph::max_level());
    p.u0 = coarse.level == level ? coarse : harmonic_extension(g, coarse);
  } else if (have_u0_const) {
    p.u0 = make_field(g, u0_const);
    for (int i = 0; i < 3; ++i) p.u0[g.boundary()[i]] = alpha[i];
  } else {
    throw validation_error("solve: provide --u0 FILE or --u0-const VALUE");
  }
  double umax = 0.0;
  for (double v : p.u0.v) umax = std::max(umax, v);
  p.phi = parse_phi(phi_spec, phi_table, std::max(1.0, umax) * 2.0, mb);
  p.horizon = horizon;
  p.scheme = scheme == "implicit" ? PdeScheme::Implicit : PdeScheme::Explicit;
  p.control.theta = theta;
  p.control.dt_override = dt;

  const PdeTrace tr = integrate(g, p);

  // long-format trace plus a norms sidecar
  std::string csv = "t,index,i,j,value\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      const Address& a = g.address(v);
      csv += io::fmt_double(tr.times[k]);
      csv += ',';
      csv += std::to_string(v);
      csv += ',';
      csv += std::to_string(a.i);
      csv += ',';
      csv += std::to_string(a.j);
      csv += ',';
      csv += io::fmt_double(tr.fields[k][v]);
      csv += '\n';
    }
  io::write_text_file(out, csv);

  std::string norms = "t,l2_sq,h1_sq,h1_integral\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    norms += io::fmt_double(tr.times[k]);
    norms += ',';
    norms += io::fmt_double(tr.l2_sq[k]);
    norms += ',';
    norms += io::fmt_double(tr.h1_sq[k]);
    norms += ',';
    norms += io::fmt_double(tr.h1_integral[k]);
    norms += '\n';
  }
  io::write_text_file(out + ".norms.csv", norms);
  write_sidecar_manifest(out, mb);
  std::printf("solve: level %d, %zu sample times, %zu steps -> %s (+ .norms.csv)\n", level,
              tr.times.size(), tr.steps_taken, out.c_str());
  return 0;
}

// --- green -------------------------------------------------------------------

int cmd_green(int level, const std::string& source, const std::string& out) {
  ManifestBuilder mb;
  mb.subcommand = "green";
  mb.params["level"] = level;
  mb.params["source"] = source;
  mb.params["out"] = out;

  const auto parts = io::split_csv_line(source);
  if (parts.size() != 2) throw validation_error("--source: expected i,j");
  const GasketGraph g = GasketGraph::build(level);
  const VertexId y =
      g.index_of(Address{io::parse_int(parts[0]), io::parse_int(parts[1]), level});
  const GreenColumn col = green_column_direct(g, y);
  io::write_field_csv(out, g, col.values);
  write_sidecar_manifest(out, mb);
  std::printf("green: level %d, source (%s), G(source,source) = %s -> %s\n", level,
              source.c_str(), io::fmt_double(col.values[y]).c_str(), out.c_str());
  return 0;
}

// --- appendix ------------------------------------------------------------------

int cmd_appendix(const std::string& mode, int steps, double gamma, double a0, double b0,
                 const std::string& out) {
  ManifestBuilder mb;
  mb.subcommand = "appendix";
  mb.params["mode"] = mode;
  mb.params["steps"] = steps;
  mb.params["out"] = out;

  std::vector<std::int64_t> ks;
  std::vector<double> as, bs;
  if (mode == "diagonal") {
    mb.params["a0"] = a0;
    mb.params["b0"] = b0;
    double a = a0, b = b0;
    for (int k = 0; k <= steps; ++k) {
      ks.push_back(k);
      as.push_back(a);
      bs.push_back(b);
      std::tie(a, b) = diagonal_recursion_step(a, b);
    }
  } else if (mode == "corner") {
    mb.params["gamma"] = gamma;
    mb.params["a0"] = a0;
    mb.params["b0"] = b0;
    double al = a0, be = b0;
    for (int k = 0; k <= steps; ++k) {
      ks.push_back(k);
      as.push_back(al);
      bs.push_back(be);
      const auto next = corner_recursion_step(al, be, gamma);
      al = next[0];
      be = next[1];
    }
  } else {
    throw validation_error("appendix: --mode must be diagonal or corner");
  }
  io::write_sequence_csv(out, ks, as, bs);
  write_sidecar_manifest(out, mb);
  std::printf("appendix %s: %d steps, final (a, b) = (%s, %s) -> %s\n", mode.c_str(), steps,
              io::fmt_double(as.back()).c_str(), io::fmt_double(bs.back()).c_str(), out.c_str());
  return 0;
}

// --- simulate --------------------------------------------------------------------

struct DensityObserver {
  const GasketGraph* g = nullptr;
  const Configuration* cfg = nullptr;
  std::vector<double> time_avg, last;
  std::vector<std::vector<double>> snapshots;  // per sample time, per vertex
  double tau = 0.0;

  void settle(VertexId v) {
    if (v < 0 || g->is_boundary(v)) return;
    time_avg[v] += cfg->occ[v] * (tau - last[v]);
    last[v] = tau;
  }
  void dwell(double d) { tau += d; }
  void event(int, VertexId from, VertexId to) {
    if (from >= 0) settle(from);
    if (to >= 0) settle(to);
  }
  void sample(std::size_t index, double, const Configuration& c) {
    for (std::size_t v = 0; v < c.occ.size(); ++v) snapshots[index][v] = c.occ[v];
  }
  void finalize() {
    for (VertexId v = 0; v < g->vertex_count(); ++v) settle(v);
    if (tau > 0)
      for (auto& x : time_avg) x /= tau;
  }
};

int cmd_simulate(int level, const std::string& rate_spec, const std::string& alpha_s,
                 const std::string& init, double horizon, int replicas, std::uint64_t seed,
                 const std::string& observe, const std::string& corner_mode_s, int threads,
                 const std::string& out) {
  ManifestBuilder mb;
  mb.subcommand = "simulate";
  mb.params["level"] = level;
  mb.params["rate"] = rate_spec;
  mb.params["alpha"] = alpha_s;
  mb.params["init"] = init;
  mb.params["T"] = horizon;
  mb.params["replicas"] = replicas;
  mb.params["observe"] = observe;
  mb.params["corner_mode"] = corner_mode_s;
  mb.params["threads"] = threads;
  mb.seed = seed;
  mb.has_seed = true;

  const GasketGraph g = GasketGraph::build(level);
  const RateFunction rate = parse_rate(rate_spec, mb);
  const auto alpha = parse_triple(alpha_s, "--alpha");
  const CornerMode corner_mode =
      corner_mode_s == "omit" ? CornerMode::Omit : CornerMode::Alpha;

  // initial law
  bool from_equilibrium = false;
  Field density0 = make_field(g);
  if (init.rfind("equilibrium:", 0) == 0) {
    from_equilibrium = true;
    const std::string path = init.substr(12);
    mb.input(path);
    const Field coarse = io::read_coarse_field_csv(path, GasketGraph::max_level());
    density0 = coarse.level == level ? coarse : harmonic_extension(g, coarse);
  } else if (init != "empty") {
    throw validation_error("simulate: --init must be empty or equilibrium:FILE");
  }

  bool want_density = false;
  int oneblock_k = -1;
  for (const auto& o : io::split_csv_line(observe)) {
    if (o == "density")
      want_density = true;
    else if (o.rfind("oneblock:", 0) == 0)
      oneblock_k = static_cast<int>(io::parse_int(o.substr(9)));
    else if (!o.empty())
      throw validation_error("simulate: unknown observer '" + o + "'");
  }

  std::vector<double> sample_times;
  const int n_samples = 10;
  for (int k = 0; k <= n_samples; ++k) sample_times.push_back(horizon * k / n_samples);

  const Ensemble ens = from_equilibrium ? make_ensemble_from_density(g, rate, density0)
                                        : Ensemble{};

  std::vector<std::vector<double>> avg_acc(replicas);
  std::vector<std::vector<std::vector<double>>> snap_acc(replicas);
  std::vector<std::uint64_t> events(replicas, 0), injected(replicas, 0), annihilated(replicas, 0);

  run_replicas(replicas, threads, [&](int r) {
    ZrpSimulator sim(g, rate, alpha);
    if (from_equilibrium)
      sim.reset(sample_product(ens, seed + static_cast<std::uint64_t>(r)));
    else {
      Configuration c0;
      c0.level = level;
      c0.occ.assign(g.vertex_count(), 0);
      sim.reset(std::move(c0));
    }
    DensityObserver obs;
    obs.g = &g;
    obs.cfg = &sim.config();
    obs.time_avg.assign(g.vertex_count(), 0.0);
    obs.last.assign(g.vertex_count(), 0.0);
    obs.snapshots.assign(sample_times.size(), std::vector<double>(g.vertex_count(), 0.0));
    Rng rng(mix_seed(seed + static_cast<std::uint64_t>(r), 5));
    sim.run(horizon, sample_times, rng, obs);
    obs.finalize();
    avg_acc[r] = std::move(obs.time_avg);
    snap_acc[r] = std::move(obs.snapshots);
    events[r] = sim.counters().events;
    injected[r] = sim.counters().injected;
    annihilated[r] = sim.counters().annihilated;
    return 0.0;
  });

  json data;
  data["level"] = level;
  data["rate"] = rate.id;
  data["alpha"] = json::array({alpha[0], alpha[1], alpha[2]});
  data["t"] = horizon;
  data["replicas"] = replicas;
  std::uint64_t ev = 0, inj = 0, ann = 0;
  for (int r = 0; r < replicas; ++r) {
    ev += events[r];
    inj += injected[r];
    ann += annihilated[r];
  }
  data["events_total"] = ev;
  data["injected_total"] = inj;
  data["annihilated_total"] = ann;

  json observers = json::object();
  if (want_density) {
    json dens;
    dens["times"] = sample_times;
    json avg = json::array();
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      double s = 0.0;
      for (int r = 0; r < replicas; ++r) s += avg_acc[r][v];
      avg.push_back(s / replicas);
    }
    dens["time_average"] = std::move(avg);
    json snaps = json::array();
    for (std::size_t k = 0; k < sample_times.size(); ++k) {
      json row = json::array();
      for (VertexId v = 0; v < g.vertex_count(); ++v) {
        double s = 0.0;
        for (int r = 0; r < replicas; ++r) s += snap_acc[r][k][v];
        row.push_back(s / replicas);
      }
      snaps.push_back(std::move(row));
    }
    dens["mean_occupation"] = std::move(snaps);
    observers["density"] = std::move(dens);
  }
  if (oneblock_k >= 0) {
    OneBlockSetup s;
    s.graph = &g;
    s.rate = &rate;
    s.alpha = alpha;
    s.initial_density = density0;
    s.location = Address{1, 1, 1};
    s.block_scale = oneblock_k;
    s.variant = 8;
    s.corner_mode = corner_mode;
    s.horizon = horizon;
    s.replicas = replicas;
    s.seed = seed;
    s.threads = threads;
    const MonteCarloStat st = one_block_diagnostic(s);
    observers["oneblock"] = json{{"k", oneblock_k},
                                 {"location_level1", json::array({1, 1})},
                                 {"mean", st.mean},
                                 {"se", st.se}};
  }
  data["observers"] = std::move(observers);

  write_json_output(out, mb, std::move(data));
  std::printf("simulate: level %d, %d replicas, %llu events -> %s\n", level, replicas,
              static_cast<unsigned long long>(ev), out.c_str());
  return 0;
}

// --- hydro ----------------------------------------------------------------------

int cmd_hydro(const std::string& levels_s, const std::string& rate_spec,
              const std::string& u0_path, const std::string& alpha_s, double horizon,
              int replicas, int blocks, std::uint64_t seed, int threads,
              const std::string& green_cache, const std::string& out) {
  ManifestBuilder mb;
  mb.subcommand = "hydro";
  mb.params["levels"] = levels_s;
  mb.params["rate"] = rate_spec;
  mb.params["u0"] = u0_path;
  mb.params["alpha"] = alpha_s;
  mb.params["T"] = horizon;
  mb.params["replicas"] = replicas;
  mb.params["blocks"] = blocks;
  mb.params["threads"] = threads;
  if (!green_cache.empty()) mb.params["green_cache"] = green_cache;
  mb.seed = seed;
  mb.has_seed = true;
  mb.params["out"] = out;

  HydroExperiment e;
  for (const auto& tok : io::split_csv_line(levels_s))
    e.levels.push_back(static_cast<int>(io::parse_int(tok)));
  e.rate = parse_rate(rate_spec, mb);
  mb.input(u0_path);
  e.u0_coarse = io::read_coarse_field_csv(u0_path, GasketGraph::max_level());
  e.alpha = parse_triple(alpha_s, "--alpha");
  e.horizon = horizon;
  e.replicas = replicas;
  e.block_scale = blocks;
  e.seed = seed;
  e.threads = threads;
  e.green_cache_dir = green_cache;

  const HydroResult res = run_hydro(e);
  write_hydro_csv(out, res.rows);
  write_sidecar_manifest(out, mb);
  for (const auto& r : res.rows)
    std::printf(
        "hydro level %d: err %.6g +/- %.6g (init %.6g), F %.6g, G %.6g, E[M_t] %.3g +/- %.3g, "
        "%.1f s\n",
        r.level, r.h1m_err_mean, r.h1m_err_se, r.h1m_init_mean, r.f_mean, r.g_mean, r.defect_mean,
        r.defect_se, r.wall_s);
  std::printf("hydro: %zu levels -> %s\n", res.rows.size(), out.c_str());
  return 0;
}

// --- verify ----------------------------------------------------------------------

int cmd_verify(const std::string& suite, std::vector<int> criteria, int threads) {
  verify::Options opt;
  opt.threads = threads;
  std::vector<verify::CheckResult> results;
  if (!criteria.empty()) {
    for (int id : criteria) results.push_back(verify::run_criterion(id, opt));
  } else if (suite == "exact") {
    results = verify::run_exact_suite(opt);
  } else if (suite == "all" || suite == "full") {
    results = verify::run_all(opt);
  } else {
    throw validation_error("verify: --suite must be exact or all");
  }
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s\n", verify::format_result_line(r).c_str());
    for (const auto& d : r.detail) std::printf("%s\n", d.c_str());
    all = all && r.pass;
  }
  std::printf("%s\n", all ? "verify: all checks passed" : "verify: FAILURES present");
  return all ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for diffusion and zero-range dynamics on the Sierpinski "
               "gasket"};
  app.require_subcommand(1);

  // graph
  int g_level = 0;
  std::string g_out = "graph.json";
  auto* graph_cmd = app.add_subcommand("graph", "dump the level-n graph as JSON");
  graph_cmd->add_option("--level", g_level, "graph level n")->required();
  graph_cmd->add_option("--out", g_out, "output JSON path");

  // harmonic
  int h_level = 0;
  std::string h_boundary = "1,0,0", h_out = "field.csv";
  auto* harm_cmd = app.add_subcommand("harmonic", "harmonic function from corner values");
  harm_cmd->add_option("--level", h_level)->required();
  harm_cmd->add_option("--boundary", h_boundary, "b0,b1,b2")->required();
  harm_cmd->add_option("--out", h_out);

  // solve
  int s_level = 2;
  std::string s_phi = "linear", s_phi_table, s_alpha = "0,0,0", s_u0, s_scheme = "explicit";
  double s_u0c = 0.0, s_T = 0.1, s_theta = 0.5, s_dt = 0.0;
  bool s_have_u0c = false;
  auto* solve_cmd = app.add_subcommand("solve", "integrate du/dt = Laplacian phi(u)");
  solve_cmd->add_option("--level", s_level)->required();
  solve_cmd->add_option("--phi", s_phi, "linear|zr-geometric|custom-table");
  solve_cmd->add_option("--phi-table", s_phi_table, "CSV of (u, phi) rows");
  solve_cmd->add_option("--alpha", s_alpha, "a0,a1,a2")->required();
  solve_cmd->add_option("--u0", s_u0, "initial field CSV (coarse fields are extended)");
  solve_cmd->add_option("--u0-const", s_u0c)->each([&](const std::string&) { s_have_u0c = true; });
  solve_cmd->add_option("--T", s_T, "horizon")->required();
  solve_cmd->add_option("--scheme", s_scheme, "explicit|implicit");
  solve_cmd->add_option("--theta", s_theta, "explicit step safety factor");
  solve_cmd->add_option("--dt", s_dt, "step override");
  std::string s_out = "trace.csv";
  solve_cmd->add_option("--out", s_out);

  // green
  int gr_level = 2;
  std::string gr_source = "1,1", gr_out = "col.csv";
  auto* green_cmd = app.add_subcommand("green", "Green column by direct solve");
  green_cmd->add_option("--level", gr_level)->required();
  green_cmd->add_option("--source", gr_source, "lattice pair i,j")->required();
  green_cmd->add_option("--out", gr_out);

  // appendix
  std::string a_mode = "diagonal", a_out = "seq.csv";
  int a_steps = 60;
  double a_gamma = -0.5, a_a0 = 0.0, a_b0 = 0.0;
  auto* app_cmd = app.add_subcommand("appendix", "diagonal/corner Green recursions");
  app_cmd->add_option("--mode", a_mode, "diagonal|corner")->required();
  app_cmd->add_option("--steps", a_steps);
  app_cmd->add_option("--gamma", a_gamma, "frozen cross term (corner mode)");
  app_cmd->add_option("--a0", a_a0);
  app_cmd->add_option("--b0", a_b0);
  app_cmd->add_option("--out", a_out);

  // simulate
  int z_level = 3, z_replicas = 1, z_threads = 4;
  std::string z_rate = "indicator", z_alpha = "0,0,0", z_init = "empty";
  std::string z_observe = "density", z_corner = "alpha", z_out = "run.json";
  double z_T = 1.0;
  std::uint64_t z_seed = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "event-driven zero-range process");
  sim_cmd->add_option("--level", z_level)->required();
  sim_cmd->add_option("--rate", z_rate, "linear|indicator|table:FILE");
  sim_cmd->add_option("--alpha", z_alpha, "boundary densities a0,a1,a2")->required();
  sim_cmd->add_option("--init", z_init, "empty|equilibrium:FILE");
  sim_cmd->add_option("--T", z_T, "macroscopic horizon")->required();
  sim_cmd->add_option("--replicas", z_replicas);
  sim_cmd->add_option("--seed", z_seed);
  sim_cmd->add_option("--observe", z_observe, "density,oneblock:k");
  sim_cmd->add_option("--corner-mode", z_corner, "alpha|omit");
  sim_cmd->add_option("--threads", z_threads);
  sim_cmd->add_option("--out", z_out);

  // hydro
  std::string y_levels = "3,4,5", y_rate = "indicator", y_u0, y_alpha = "0,0,0";
  std::string y_cache, y_out = "result.csv";
  double y_T = 0.05;
  int y_replicas = 100, y_blocks = 1, y_threads = 4;
  std::uint64_t y_seed = 1;
  auto* hyd_cmd = app.add_subcommand("hydro", "hydrodynamic-limit experiment sweep");
  hyd_cmd->add_option("--levels", y_levels, "comma list, e.g. 3,4,5")->required();
  hyd_cmd->add_option("--rate", y_rate);
  hyd_cmd->add_option("--u0", y_u0, "coarse profile CSV")->required();
  hyd_cmd->add_option("--alpha", y_alpha)->required();
  hyd_cmd->add_option("--T", y_T)->required();
  hyd_cmd->add_option("--replicas", y_replicas);
  hyd_cmd->add_option("--blocks", y_blocks, "block scale recorded with the run");
  hyd_cmd->add_option("--seed", y_seed);
  hyd_cmd->add_option("--threads", y_threads);
  hyd_cmd->add_option("--green-cache", y_cache, "directory for the Green diagonal cache");
  hyd_cmd->add_option("--out", y_out);

  // verify
  std::string v_suite = "all";
  std::vector<int> v_criteria;
  int v_threads = 4;
  auto* ver_cmd = app.add_subcommand("verify", "acceptance and exact-identity suites");
  ver_cmd->add_option("--suite", v_suite, "exact|all");
  ver_cmd->add_option("--criterion", v_criteria, "run specific criteria (repeatable)");
  ver_cmd->add_option("--threads", v_threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (graph_cmd->parsed()) return cmd_graph(g_level, g_out);
    if (harm_cmd->parsed()) return cmd_harmonic(h_level, h_boundary, h_out);
    if (solve_cmd->parsed())
      return cmd_solve(s_level, s_phi, s_phi_table, s_alpha, s_u0, s_u0c, s_have_u0c, s_T,
                       s_scheme, s_theta, s_dt, s_out);
    if (green_cmd->parsed()) return cmd_green(gr_level, gr_source, gr_out);
    if (app_cmd->parsed()) return cmd_appendix(a_mode, a_steps, a_gamma, a_a0, a_b0, a_out);
    if (sim_cmd->parsed())
      return cmd_simulate(z_level, z_rate, z_alpha, z_init, z_T, z_replicas, z_seed, z_observe,
                          z_corner, z_threads, z_out);
    if (hyd_cmd->parsed())
      return cmd_hydro(y_levels, y_rate, y_u0, y_alpha, y_T, y_replicas, y_blocks, y_seed,
                       y_threads, y_cache, y_out);
    if (ver_cmd->parsed()) return cmd_verify(v_suite, v_criteria, v_threads);
  } catch (const validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
