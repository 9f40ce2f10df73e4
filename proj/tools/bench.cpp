// Serial vs OpenMP replication fan-out on the two heaviest kernels.
#include <benchmark/benchmark.h>

#include "rmab/analysis.hpp"

using namespace rmab;

namespace {

const StreamKey kKey{1, 0, 0};

void bm_steady_reward(benchmark::State& state) {
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const PolicyProfile prof = estimate_steady_reward(
            {0.2, 0.8}, PolicyKind::Pi1, 2, 20000, 1000, 32, kKey, jobs);
        benchmark::DoNotOptimize(prof.u_estimate);
    }
}

void bm_regret_curve(benchmark::State& state) {
    const int jobs = static_cast<int>(state.range(0));
    const BlockSchedule sched{BlockSchedule::Rule::CeilLog, 1};
    const std::vector<long> cps = {nearest_block_boundary(sched, 20000, 20000)};
    for (auto _ : state) {
        const RegretSeries s = regret_curve({0.1, 0.9}, 2, sched, 20000, cps, 32,
                                            {0.5, 0.5}, kKey, jobs);
        benchmark::DoNotOptimize(s.checkpoints.back().regret);
    }
}

void bm_chernoff(benchmark::State& state) {
    const int jobs = static_cast<int>(state.range(0));
    const LemmaOneConfig cfg{0.5, 0.1, 1.0, 100, 10.0,
                             LemmaOneGenerator::AdversarialDrift};
    for (auto _ : state) {
        const ChernoffReport rep = verify_chernoff_variant(cfg, 50000, kKey, jobs);
        benchmark::DoNotOptimize(rep.empirical_upper);
    }
}

} // namespace

BENCHMARK(bm_steady_reward)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_regret_curve)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_chernoff)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
