// Serial reference vs OpenMP replications on the case-study fleet, plus the
// per-hour dispatch kernels and SoR training.

#include "ngrid/case_study.hpp"
#include "ngrid/dispatch.hpp"
#include "ngrid/simulation.hpp"
#include "ngrid/sor.hpp"

#include <benchmark/benchmark.h>

using namespace ngrid;

namespace {

const sim::Scenario& case_study_scenario() {
    static const sim::Scenario s = [] {
        case_study::Options o;
        o.replications = 20;
        return case_study::make_scenario(o);
    }();
    return s;
}

void BM_SimulationSerial(benchmark::State& state) {
    const auto& s = case_study_scenario();
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_simulation(s, sim::Execution::serial));
    state.SetItemsProcessed(state.iterations() * s.replications);
}
BENCHMARK(BM_SimulationSerial)->Unit(benchmark::kMillisecond);

void BM_SimulationParallel(benchmark::State& state) {
    const auto& s = case_study_scenario();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_simulation(s, sim::Execution::parallel, threads));
    state.SetItemsProcessed(state.iterations() * s.replications);
}
BENCHMARK(BM_SimulationParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_IslandedStep(benchmark::State& state) {
    const auto& g = case_study_scenario().fleet.ngrids[0];
    const auto s0 = dispatch::NGridState::initial(g);
    int h = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dispatch::islanded_step(g, s0, h));
        h = (h + 1) % 24;
    }
}
BENCHMARK(BM_IslandedStep);

void BM_SorTrain(benchmark::State& state) {
    sim::Rng rng(1);
    std::vector<sor::FeatureRow> rows;
    for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
        sor::FeatureRow r;
        for (int f = 0; f < 8; ++f) r.numeric["x" + std::to_string(f)] = rng.uniform();
        r.label = r.numeric["x0"] + 0.3 * rng.uniform() > 0.6 ? 1 : 0;
        rows.push_back(std::move(r));
    }
    for (auto _ : state) benchmark::DoNotOptimize(sor::train(rows, {100, 0.1, 5}));
}
BENCHMARK(BM_SorTrain)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
