#include <benchmark/benchmark.h>

#include "gasket/graph.hpp"
#include "gasket/green.hpp"
#include "gasket/operators.hpp"
#include "gasket/rate.hpp"
#include "gasket/rng.hpp"
#include "gasket/solver.hpp"
#include "gasket/zrp.hpp"

using namespace gasket;

static void BM_BuildGraph(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const GasketGraph g = GasketGraph::build(n);
    benchmark::DoNotOptimize(g.vertex_count());
  }
  state.SetLabel(std::to_string(expected_vertex_count(n)) + " vertices");
}
BENCHMARK(BM_BuildGraph)->Arg(5)->Arg(7)->Arg(9);

static void BM_DirichletSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GasketGraph g = GasketGraph::build(n);
  Rng rng(1);
  Field f = make_field(g);
  for (auto& v : f.v) v = rng.normal();
  int iters = 0;
  for (auto _ : state) {
    const DirichletSolveReport rep = solve_dirichlet(g, f, {0.0, 0.0, 0.0});
    iters = rep.iterations;
    benchmark::DoNotOptimize(rep.solution.v.data());
  }
  state.SetLabel("cg iterations: " + std::to_string(iters));
}
BENCHMARK(BM_DirichletSolve)->Arg(4)->Arg(5)->Arg(6)->Arg(7);

static void BM_GreenDiagonalField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GasketGraph g = GasketGraph::build(n);
  for (auto _ : state) {
    const Field d = green_diagonal_field(g);
    benchmark::DoNotOptimize(d.v.data());
  }
}
BENCHMARK(BM_GreenDiagonalField)->Arg(6)->Arg(8)->Arg(10);

static void BM_HMinusOne(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GasketGraph g = GasketGraph::build(n);
  const HMinusOne hm(g);
  Rng rng(2);
  Field v = make_field(g);
  for (VertexId x = 0; x < g.vertex_count(); ++x) v[x] = rng.normal();
  for (VertexId b : g.boundary()) v[b] = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(hm.norm_sq(v));
}
BENCHMARK(BM_HMinusOne)->Arg(4)->Arg(5)->Arg(6);

static void BM_ZrpEvents(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GasketGraph g = GasketGraph::build(n);
  const RateFunction rate = rate_indicator();
  const std::array<double, 3> alpha{1.0, 1.0, 1.0};
  const Ensemble ens = make_ensemble_from_density(g, rate, [&] {
    Field d = make_field(g, 1.0);
    for (VertexId b : g.boundary()) d[b] = 0.0;
    return d;
  }());
  std::uint64_t events = 0;
  double tau = 0.0;
  for (auto _ : state) {
    ZrpSimulator sim(g, rate, alpha);
    sim.reset(sample_product(ens, 3));
    Rng rng(4);
    NullHooks hooks;
    sim.run(0.05, {}, rng, hooks);
    events += sim.counters().events;
    tau += sim.elapsed_ctmc();
  }
  state.counters["events/s"] =
      benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_ZrpEvents)->Arg(4)->Arg(5)->Arg(6);

BENCHMARK_MAIN();
