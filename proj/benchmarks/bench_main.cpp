#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "ibkit/simulation.hpp"

using namespace ibkit;

namespace {

EdgeVectorField random_edges(const GridSpec& g) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  EdgeVectorField w(g);
  for (double& v : w.u.data()) v = d(rng);
  for (double& v : w.v.data()) v = d(rng);
  return w;
}

const char* kKernels[] = {"bs2bs1", "bs3bs2", "bs4bs3", "bs5bs4", "bs6bs5", "ib4", "ib6"};

void BM_KernelStencil(benchmark::State& state) {
  const CompositeDelta d = parse_kernel(kKernels[state.range(0)], 1.0);
  double s = 0.137;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d.normal.stencil(s));
    s += 1e-3;
  }
  state.SetLabel(kKernels[state.range(0)]);
}
BENCHMARK(BM_KernelStencil)->DenseRange(0, 6);

void BM_Interpolate(benchmark::State& state) {
  const GridSpec g(64, 1.0);
  const CouplingScheme s = CouplingScheme::standard(parse_kernel(kKernels[state.range(0)], g.h()), g);
  const EdgeVectorField w = random_edges(g);
  const Curve c = init_circle({0.5, 0.5}, 0.25, 402);
  for (auto _ : state) benchmark::DoNotOptimize(s.interpolate(w, c.X));
  state.SetLabel(kKernels[state.range(0)]);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.X.size()));
}
BENCHMARK(BM_Interpolate)->DenseRange(0, 6);

void BM_Spread(benchmark::State& state) {
  const GridSpec g(64, 1.0);
  const CouplingScheme s = CouplingScheme::standard(parse_kernel(kKernels[state.range(0)], g.h()), g);
  const Curve c = init_circle({0.5, 0.5}, 0.25, 402);
  const double ds = 2 * std::acos(-1.0) / c.X.size();
  for (auto _ : state) benchmark::DoNotOptimize(s.spread(c.X, c.X, ds));
  state.SetLabel(kKernels[state.range(0)]);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.X.size()));
}
BENCHMARK(BM_Spread)->DenseRange(0, 6);

void BM_DfibSpread(benchmark::State& state) {
  const GridSpec g(state.range(0), 1.0);
  auto solver = std::make_shared<const SpectralSolver>(g);
  const CouplingScheme s = CouplingScheme::dfib(Kernel1D::ib6(), solver);
  const Curve c = init_circle({0.5, 0.5}, 0.25, 402);
  const double ds = 2 * std::acos(-1.0) / c.X.size();
  for (auto _ : state) benchmark::DoNotOptimize(s.spread(c.X, c.X, ds));
}
BENCHMARK(BM_DfibSpread)->RangeMultiplier(2)->Range(32, 256);

void BM_PoissonSolve(benchmark::State& state) {
  const GridSpec g(state.range(0), 1.0);
  const SpectralSolver solver(g);
  const EdgeVectorField w = random_edges(g);
  const CellField rhs = div(w);
  for (auto _ : state) benchmark::DoNotOptimize(solver.poisson_solve(rhs));
}
BENCHMARK(BM_PoissonSolve)->RangeMultiplier(2)->Range(32, 512);

void BM_StokesStep(benchmark::State& state) {
  const GridSpec g(state.range(0), 1.0);
  const SpectralSolver solver(g);
  const EdgeVectorField u0 = random_edges(g), f = random_edges(g);
  const EdgeVectorField adv(g);
  for (auto _ : state) benchmark::DoNotOptimize(solver.stokes_step(u0, f, adv, 1.0, 0.1, 1e-3));
}
BENCHMARK(BM_StokesStep)->RangeMultiplier(2)->Range(32, 512);

void BM_FsiStep(benchmark::State& state) {
  ExperimentConfig c = default_config("membrane-eq");
  c.n = static_cast<int>(state.range(0));
  c.method = state.range(1) == 0 ? "ib" : "dfib";
  c.kernel = state.range(1) == 0 ? "bs5bs4" : "ib6";
  const GridSpec g = c.grid();
  auto solver = std::make_shared<const SpectralSolver>(g);
  const CouplingScheme scheme = make_scheme(c, solver);
  SimState st(g, init_circle({0.5, 0.5}, 0.25, 402), {}, c.rho, c.mu, c.dt());
  for (auto _ : state) fsi_step(st, scheme, *solver, c.spring());
  state.SetLabel(c.method + " " + c.kernel);
}
BENCHMARK(BM_FsiStep)->ArgsProduct({{32, 64, 128}, {0, 1}});

void BM_AreaGreen(benchmark::State& state) {
  const Curve c = init_circle({0.5, 0.5}, 0.25, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(area_green(c.X));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AreaGreen)->RangeMultiplier(4)->Range(256, 16384);

}  // namespace
BENCHMARK_MAIN();
