#include <benchmark/benchmark.h>

#include "mqrank/competition_log.hpp"
#include "mqrank/grid_oracle.hpp"
#include "mqrank/prediction.hpp"

using namespace mqrank;

namespace {

GridSpec grid(int g, int jobs) {
    GridSpec s;
    s.resolution = g;
    s.jobs = jobs;
    return s;
}

const RankingGame kGame(3, 3, Rational(1, 2));

void BM_GridSerial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid_nash_search_serial(kGame, grid(static_cast<int>(state.range(0)), 1),
                                                         DeviationMode::exact));
    }
}
BENCHMARK(BM_GridSerial)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_GridKernel(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid_nash_search(kGame, grid(static_cast<int>(state.range(0)), 0), DeviationMode::exact));
    }
}
BENCHMARK(BM_GridKernel)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

const CompetitionLog& bench_log() {
    static const CompetitionLog log = synthesize(SynthConfig{}, 1);
    return log;
}

void BM_InstancesSerial(benchmark::State& state) {
    const auto& log = bench_log();
    const auto triples = filter_for_prediction(log);
    for (auto _ : state) benchmark::DoNotOptimize(build_instances_serial(log, triples));
}
BENCHMARK(BM_InstancesSerial)->Unit(benchmark::kMillisecond);

void BM_InstancesParallel(benchmark::State& state) {
    const auto& log = bench_log();
    const auto triples = filter_for_prediction(log);
    for (auto _ : state) benchmark::DoNotOptimize(build_instances(log, triples, default_stopwords(), 0));
}
BENCHMARK(BM_InstancesParallel)->Unit(benchmark::kMillisecond);

void BM_CrossValidate(benchmark::State& state) {
    const auto& log = bench_log();
    const auto inst = build_instances(log, filter_for_prediction(log));
    CvOptions opt;
    opt.jobs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cross_validate(inst, opt));
}
BENCHMARK(BM_CrossValidate)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
