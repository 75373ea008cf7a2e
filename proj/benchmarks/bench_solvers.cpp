#include <cmath>
#include <numbers>
#include <variant>

#include <benchmark/benchmark.h>

#include "aaoreg/solvers.hpp"

using namespace aaoreg;

namespace {

constexpr double pi = std::numbers::pi;

GridFunction source(const Grid1D& g) {
  return GridFunction::sample(g, [](double s) { return 15.0 * (std::sin(pi * s) + 0.1 * s); });
}

void BM_StateSolve(benchmark::State& state) {
  const Grid1D g(static_cast<std::size_t>(state.range(0)));
  const auto p = ProblemInstance::model(g, 10.0);
  const GridFunction b = source(g);
  for (auto _ : state) benchmark::DoNotOptimize(solve_state(p, b, GridFunction(g), 1e-10, 50));
}
BENCHMARK(BM_StateSolve)->Arg(99)->Arg(999)->Arg(9999);

void BM_IrgnmAaoStep(benchmark::State& state) {
  const Grid1D g(static_cast<std::size_t>(state.range(0)));
  const auto p = ProblemInstance::model(g, 10.0);
  const GridFunction y = std::get<StateSolution>(solve_state(p, source(g), GridFunction(g), 1e-10, 50)).u;
  const DataPair d = DataPair::observed(y, 0.01 * norm(y));
  const SolverConfig cfg;
  const AaoPoint z = AaoPoint::zeros(g);
  for (auto _ : state) benchmark::DoNotOptimize(irgnm_aao_step(p, z, d, 1.0, cfg));
}
BENCHMARK(BM_IrgnmAaoStep)->Arg(99)->Arg(999)->Arg(9999);

void BM_IrgnmReducedStep(benchmark::State& state) {
  const Grid1D g(static_cast<std::size_t>(state.range(0)));
  const auto p = ProblemInstance::model(g, 10.0);
  const ReducedEval e = std::get<ReducedEval>(reduced_eval(p, source(g)));
  const GridFunction y = e.u;
  const SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(irgnm_reduced_step(e, y, 1.0, cfg));
}
BENCHMARK(BM_IrgnmReducedStep)->Arg(99)->Arg(999);

void BM_LandweberAaoStep(benchmark::State& state) {
  const Grid1D g(static_cast<std::size_t>(state.range(0)));
  const auto p = ProblemInstance::model(g, 10.0);
  const GridFunction y = std::get<StateSolution>(solve_state(p, source(g), GridFunction(g), 1e-10, 50)).u;
  const DataPair d = DataPair::observed(y, 0.01 * norm(y));
  const StateRiesz riesz(g, SolverConfig{}.effective_state_norm());
  const AaoPoint z = AaoPoint::zeros(g);
  for (auto _ : state) benchmark::DoNotOptimize(landweber_aao_step(p, z, d, 1e-9, riesz));
}
BENCHMARK(BM_LandweberAaoStep)->Arg(99)->Arg(999);

void BM_TableCellIrgnmAao(benchmark::State& state) {
  const Grid1D g(99);
  const auto p = ProblemInstance::model(g, 0.0);
  const GridFunction y = std::get<StateSolution>(solve_state(p, source(g), GridFunction(g), 1e-10, 50)).u;
  const DataPair d = DataPair::observed(y, 0.01 * norm(y));
  const SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(irgnm_run(p, d, cfg));
}
BENCHMARK(BM_TableCellIrgnmAao)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
