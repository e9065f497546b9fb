#include <benchmark/benchmark.h>

#include "contain/commands.hpp"
#include "contain/scenario_io.hpp"
#include "contain/sim.hpp"

namespace {

using namespace contain;

Design default_design(ControllerKind kind) {
  Scenario scn = parse_scenario(default_scenario_text());
  scn.controller.kind = kind;
  return prepare_design(scn);
}

void BM_PrepareDesign(benchmark::State& state) {
  const Scenario scn = parse_scenario(default_scenario_text());
  for (auto _ : state) benchmark::DoNotOptimize(prepare_design(scn));
}
BENCHMARK(BM_PrepareDesign);

void BM_ClosedLoopRate(benchmark::State& state) {
  const Design d = default_design(static_cast<ControllerKind>(state.range(0)));
  const ClosedLoop loop = assemble_rhs(d.scenario, d.gains, d.partition);
  const Vector y = loop.initial_state();
  for (auto _ : state) benchmark::DoNotOptimize(loop.rate(0.5, y));
  state.SetLabel(std::string(to_string(d.scenario.controller.kind)));
}
BENCHMARK(BM_ClosedLoopRate)
    ->Arg(static_cast<int>(ControllerKind::DiscontinuousStatic))
    ->Arg(static_cast<int>(ControllerKind::ContinuousStatic))
    ->Arg(static_cast<int>(ControllerKind::Adaptive))
    ->Arg(static_cast<int>(ControllerKind::ObserverBased));

void BM_IntegrateOneSecond(benchmark::State& state) {
  Design d = default_design(ControllerKind::Adaptive);
  d.scenario.t_end = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(d.scenario, d.gains, d.partition));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.scenario.sample_count()));
}
BENCHMARK(BM_IntegrateOneSecond)->Unit(benchmark::kMillisecond);

void BM_ParseScenario(benchmark::State& state) {
  const std::string text = default_scenario_text();
  for (auto _ : state) benchmark::DoNotOptimize(parse_scenario(text));
}
BENCHMARK(BM_ParseScenario);

}  // namespace
