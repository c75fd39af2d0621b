// End-to-end checks of the gasket binary: flags, exit codes, file formats,
// manifests and reproducibility. Invoked as: gasket_cli_tests <path-to-gasket>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "json.hpp"

#include "gasket/graph.hpp"
#include "gasket/io.hpp"
#include "gasket/operators.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;
using namespace gasket;

namespace {

int g_failures = 0;

void expect(bool ok, const std::string& what) {
  std::printf("%s %s\n", ok ? "  ok  " : "  FAIL", what.c_str());
  if (!ok) ++g_failures;
}

int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

} // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: gasket_cli_tests <gasket binary>\n");
    return 2;
  }
  const std::string bin = argv[1];
  const fs::path dir = fs::temp_directory_path() / "gasket_cli_tests";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string();

  // --- graph ------------------------------------------------------------
  expect(run(bin + " graph --level 2 --out " + d + "/graph.json > /dev/null") == 0,
         "graph --level 2 exits 0");
  {
    const json j = json::parse(io::read_text_file(d + "/graph.json"));
    expect(j.contains("manifest") && j["manifest"]["subcommand"] == "graph",
           "graph.json embeds a manifest");
    expect(j["data"]["vertex_count"] == 15 && j["data"]["edge_count"] == 27,
           "level-2 graph reports 15 vertices and 27 edges");
    expect(j["data"]["cells"].size() == 9, "level-2 graph lists 9 cells");
    expect(j["data"]["boundary"].size() == 3, "boundary has three corners");
    // exact coordinates of corner a2 = (1, 0): x_num / 2^denom == 1
    bool a2ok = false;
    for (const auto& v : j["data"]["vertices"]) {
      if (v["i"] == 4 && v["j"] == 0)
        a2ok = (v["x_num"].get<std::int64_t>() ==
                (std::int64_t{1} << v["denom_log2"].get<int>())) &&
               v["y_sqrt3_num"] == 0;
    }
    expect(a2ok, "corner a2 carries exact coordinates (1, 0)");
  }

  // --- harmonic ----------------------------------------------------------
  expect(run(bin + " harmonic --level 1 --boundary 1,0,0 --out " + d + "/h.csv > /dev/null") == 0,
         "harmonic exits 0");
  {
    const GasketGraph g1 = GasketGraph::build(1);
    const Field h = io::read_field_csv(d + "/h.csv", g1);
    expect(h[g1.index_of(Address{1, 1, 1})] == 0.2 &&
               h[g1.index_of(Address{1, 0, 1})] == 0.4 &&
               h[g1.index_of(Address{0, 1, 1})] == 0.4,
           "harmonic CSV carries the (1/5, 2/5, 2/5) midpoint values");
    expect(fs::exists(d + "/h.csv.manifest.json"), "harmonic writes a sidecar manifest");
    // write -> read -> write is byte-identical
    const std::string once = io::read_text_file(d + "/h.csv");
    io::write_field_csv(d + "/h2.csv", g1, h);
    expect(io::read_text_file(d + "/h2.csv") == once, "field CSV round-trips byte-identically");
  }

  // --- appendix ----------------------------------------------------------
  expect(run(bin + " appendix --mode diagonal --steps 60 --out " + d + "/seq.csv > /dev/null") ==
             0,
         "appendix --mode diagonal exits 0");
  {
    const std::string text = io::read_text_file(d + "/seq.csv");
    const auto last_line = text.substr(text.rfind('\n', text.size() - 2) + 1);
    const auto cols = io::split_csv_line(last_line.substr(0, last_line.size() - 1));
    const double a = io::parse_double(cols[1]);
    const double b = io::parse_double(cols[2]);
    expect(std::abs(a - 3.0 / 7.0) < 1e-12 && std::abs(b + 3.0 / 14.0) < 1e-12,
           "60 diagonal iterates converge to (3/7, -3/14)");
  }
  expect(run(bin + " appendix --mode corner --steps 80 --gamma -0.5 --out " + d +
             "/cseq.csv > /dev/null") == 0,
         "appendix --mode corner exits 0");
  {
    const std::string text = io::read_text_file(d + "/cseq.csv");
    const auto last_line = text.substr(text.rfind('\n', text.size() - 2) + 1);
    const auto cols = io::split_csv_line(last_line.substr(0, last_line.size() - 1));
    const double a = io::parse_double(cols[1]);
    expect(std::abs(a - (17.0 / 14.0 - 1.0)) < 1e-12,
           "corner iterates converge to 17/14 + 2 gamma");
  }

  // --- green --------------------------------------------------------------
  expect(run(bin + " green --level 2 --source 1,1 --out " + d + "/col.csv > /dev/null") == 0,
         "green exits 0");
  {
    const GasketGraph g2 = GasketGraph::build(2);
    const Field col = io::read_field_csv(d + "/col.csv", g2);
    expect(std::abs(col[g2.index_of(Address{1, 1, 2})] - 231.0 / 1250.0) < 1e-9,
           "Green column diagonal matches the exact rational value 231/1250");
  }

  // --- solve ----------------------------------------------------------------
  expect(run(bin + " solve --level 2 --phi zr-geometric --alpha 0,0,0 --u0-const 0.5 --T 0.05 "
                   "--out " + d + "/trace.csv > /dev/null") == 0,
         "solve exits 0");
  expect(fs::exists(d + "/trace.csv.norms.csv"), "solve writes the norms sidecar");

  // --- simulate: determinism ----------------------------------------------
  const std::string simcmd = bin + " simulate --level 3 --rate indicator --alpha 0.4,0.2,0.6 "
                                   "--init empty --T 0.5 --replicas 4 --seed 99 "
                                   "--observe density --threads 2 --out ";
  expect(run(simcmd + d + "/run1.json > /dev/null") == 0, "simulate exits 0");
  expect(run(simcmd + d + "/run2.json > /dev/null") == 0, "simulate re-run exits 0");
  {
    const json r1 = json::parse(io::read_text_file(d + "/run1.json"));
    const json r2 = json::parse(io::read_text_file(d + "/run2.json"));
    expect(r1["data"].dump() == r2["data"].dump(),
           "identical seeds give byte-identical data sections");
    expect(r1["manifest"]["rng"] == "mt19937_64", "manifest records the RNG algorithm id");
    expect(r1["data"]["events_total"].get<std::uint64_t>() > 0, "events were simulated");
  }
  // the data section must not depend on the worker count
  const std::string simcmd1 = bin + " simulate --level 3 --rate indicator --alpha 0.4,0.2,0.6 "
                                    "--init empty --T 0.5 --replicas 4 --seed 99 "
                                    "--observe density --threads 1 --out ";
  expect(run(simcmd1 + d + "/run3.json > /dev/null") == 0, "simulate with one thread exits 0");
  {
    const json r1 = json::parse(io::read_text_file(d + "/run1.json"));
    const json r3 = json::parse(io::read_text_file(d + "/run3.json"));
    expect(r1["data"].dump() == r3["data"].dump(),
           "thread count does not change the data section");
  }

  // --- hydro (tiny run) -----------------------------------------------------
  {
    const GasketGraph g1 = GasketGraph::build(1);
    Field prof = make_field(g1);
    for (VertexId v = 0; v < g1.vertex_count(); ++v)
      if (!g1.is_boundary(v)) prof[v] = 1.0;
    io::write_field_csv(d + "/prof.csv", g1, prof);
  }
  expect(run(bin + " hydro --levels 2,3 --rate indicator --u0 " + d +
             "/prof.csv --alpha 0,0,0 --T 0.01 --replicas 8 --seed 7 --threads 2 --out " + d +
             "/result.csv > /dev/null") == 0,
         "hydro exits 0");
  {
    const std::string text = io::read_text_file(d + "/result.csv");
    expect(text.rfind("level,replicas,t,h1m_err_mean,h1m_err_se,h1m_init_mean,h1m_init_se,"
                      "F_mean,F_se,G_mean,G_se,wall_s\n",
                      0) == 0,
           "hydro CSV carries exactly the documented columns");
    expect(fs::exists(d + "/result.csv.manifest.json"), "hydro writes a sidecar manifest");
  }

  // --- verify (exact suite) ---------------------------------------------------
  expect(run(bin + " verify --suite exact > " + d + "/verify.txt") == 0,
         "verify --suite exact passes");

  // --- validation failures map to exit 1 --------------------------------------
  expect(run(bin + " graph --level 99 --out " + d + "/no.json 2> /dev/null") == 1,
         "level above the cap exits 1");
  expect(run(bin + " graph --bogus 2> /dev/null") == 1, "unknown flag exits 1");
  expect(run(bin + " simulate --level 3 --rate nope --alpha 0,0,0 --T 1 --out " + d +
             "/no.json 2> /dev/null") == 1,
         "unknown rate exits 1");
  expect(run(bin + " 2> /dev/null") == 1, "missing subcommand exits 1");

  std::printf("%s\n", g_failures == 0 ? "cli tests: all passed" : "cli tests: FAILURES");
  return g_failures == 0 ? 0 : 1;
}
