#include <cmath>

#include <benchmark/benchmark.h>

#include "qkdv/counterexamples.hpp"
#include "qkdv/gauge.hpp"
#include "qkdv/linear.hpp"
#include "qkdv/problems.hpp"
#include "qkdv/quasilinear.hpp"
#include "qkdv/spectral.hpp"

using namespace qkdv;

namespace {

Field bench_field(std::size_t n, std::size_t comps = 1) {
  return gaussian(GridSpec{40.0, n, comps}, 1.0, std::sqrt(2.0));
}

void BM_Derivative3(benchmark::State& state) {
  const Field f = bench_field(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(derivative(f, 3));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Derivative3)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNLogN);

void BM_SobolevNorm(benchmark::State& state) {
  const Field f = bench_field(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sobolev_norm(f, 14));
}
BENCHMARK(BM_SobolevNorm)->Arg(512)->Arg(4096);

void BM_WeightedNormH82(benchmark::State& state) {
  const Field f = bench_field(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(h_s2_norm(f, 8));
}
BENCHMARK(BM_WeightedNormH82)->Arg(512)->Arg(2048);

void BM_FreezeVarcoef(benchmark::State& state) {
  const Problem p = make_problem("system2");
  for (auto _ : state) benchmark::DoNotOptimize(freeze_linear(p.coeffs, p.grid, 0.0));
}
BENCHMARK(BM_FreezeVarcoef);

void BM_ConjugationResidual(benchmark::State& state) {
  const Problem p = make_problem("system2");
  const GaugeData gd = build_gauge(p.grid, 4.0);
  const CoefficientFields cf = freeze_linear(p.coeffs, p.grid, 0.0);
  const Field v = gaussian(p.grid, 1.0, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(conjugation_residual(cf, gd, v));
}
BENCHMARK(BM_ConjugationResidual);

// A fixed number of Lawson RK4 steps on the variable coefficient problem.
void BM_LinearSolve(benchmark::State& state) {
  const Problem p = make_problem("varcoef");
  const Field u0 = p.initial(p.grid);
  SolveConfig c;
  c.eps = 0.01;
  c.dt = 1e-4;
  c.t_final = 100 * c.dt;
  c.samples = 2;
  c.check_residual = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_linear(p.coeffs, u0, nullptr, c));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_LinearSolve)->Unit(benchmark::kMillisecond);

void BM_QuasilinearSolve(benchmark::State& state) {
  const Problem p = make_problem("quasilinear");
  const Field u0 = p.initial(p.grid);
  SolveConfig c;
  c.eps = 0.01;
  c.dt = 1e-4;
  c.t_final = 100 * c.dt;
  c.samples = 2;
  c.check_residual = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_quasilinear(p.coeffs, u0, nullptr, c));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_QuasilinearSolve)->Unit(benchmark::kMillisecond);

void BM_PicardWindow(benchmark::State& state) {
  const Problem p = make_problem("quasilinear", {{"amp", 1e-6}});
  const Field u0 = p.initial(p.grid);
  PicardConfig pc;
  pc.eps = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(picard_solve(p.coeffs, u0, {}, pc));
}
BENCHMARK(BM_PicardWindow)->Unit(benchmark::kMillisecond);

void BM_JordanStudy(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(jordan_growth_study(GridSpec{40.0, 16384, 2}, 3, 1.0, 1.0, {32, 64, 128, 256}));
}
BENCHMARK(BM_JordanStudy)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
