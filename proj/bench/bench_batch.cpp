// Serial reference kernel against the OpenMP batch kernel. On a single core
// the two should be within noise of each other; the thread sweep shows the
// scaling elsewhere.

#include <benchmark/benchmark.h>

#include "cabintherm/batch.hpp"
#include "cabintherm/scenario.hpp"
#include "cabintherm/setup.hpp"

using namespace cabintherm;

namespace {

struct Fixture {
  ModelSetup setup = setup_from_json_text("{}");
  ScenarioSet set = synthesize_dataset(400, 42);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

ThermalModel concept_model(int index) {
  const Fixture& f = fixture();
  return f.setup.model(f.setup.concepts.at(static_cast<std::size_t>(index)).config);
}

void BM_Serial(benchmark::State& state) {
  const ThermalModel m = concept_model(static_cast<int>(state.range(0)));
  const auto kind = state.range(1) == 0 ? SolverKind::optimization : SolverKind::rootfind;
  for (auto _ : state) {
    auto res = solve_batch_serial(fixture().set.scenarios, m, kind);
    benchmark::DoNotOptimize(res.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(fixture().set.size()));
}

void BM_Parallel(benchmark::State& state) {
  const ThermalModel m = concept_model(static_cast<int>(state.range(0)));
  const auto kind = state.range(1) == 0 ? SolverKind::optimization : SolverKind::rootfind;
  const int jobs = static_cast<int>(state.range(2));
  for (auto _ : state) {
    auto res = solve_batch_parallel(fixture().set.scenarios, m, kind, jobs);
    benchmark::DoNotOptimize(res.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(fixture().set.size()));
}

}  // namespace

// args: concept index (0 PTC-AC, 1 HP-AC, 2 PTC-AC+RH, 3 HP-AC+RH), solver (0 opt, 1 rootfind), jobs
BENCHMARK(BM_Serial)->ArgsProduct({{0, 2}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->ArgsProduct({{0, 2}, {0, 1}, {0, 2, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
