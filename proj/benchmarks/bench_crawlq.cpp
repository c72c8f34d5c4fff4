#include <benchmark/benchmark.h>

#include <string>

#include "crawlq/model_file.hpp"
#include "crawlq/optimizer.hpp"
#include "crawlq/simulator.hpp"
#include "crawlq/stationary.hpp"

using namespace crawlq;

namespace {

const LoadedModel& model(const char* name) {
    static const LoadedModel ex1 = load_model_file(std::string(CRAWLQ_MODEL_DIR) + "/example1.json");
    static const LoadedModel t5 = load_model_file(std::string(CRAWLQ_MODEL_DIR) + "/table5.json");
    return std::string(name) == "table5" ? t5 : ex1;
}

void BM_BuildGenerator(benchmark::State& state) {
    const auto& m = model("table5");
    const auto pol = ThresholdPolicy::create(m.model.capacity, {4, 1}, {2});
    for (auto _ : state) benchmark::DoNotOptimize(build_generator(m.model, pol));
}
BENCHMARK(BM_BuildGenerator);

void BM_SolveGeneral(benchmark::State& state) {
    const auto& m = model("table5");
    const auto bg = build_generator(m.model, ThresholdPolicy::create(m.model.capacity, {4, 1}, {2}));
    for (auto _ : state) benchmark::DoNotOptimize(solve_general(bg));
}
BENCHMARK(BM_SolveGeneral)->Unit(benchmark::kMillisecond);

void BM_EvaluateExample1(benchmark::State& state) {
    const auto& m = model("example1");
    const auto pol = ThresholdPolicy::create(m.model.capacity, {3, 1}, {2});
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy(m.model, pol, *m.costs));
}
BENCHMARK(BM_EvaluateExample1)->Unit(benchmark::kMillisecond);

void BM_OptimizeTable5(benchmark::State& state) {
    const auto& m = model("table5");
    OptimizeOptions opt;
    opt.subsets = {{4, 1}, {3, 1}, {4, 3, 1}};
    for (auto _ : state) benchmark::DoNotOptimize(optimize(m.model, *m.costs, opt));
}
BENCHMARK(BM_OptimizeTable5)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_Simulate(benchmark::State& state) {
    const auto& m = model("example1");
    const auto pol = ThresholdPolicy::create(m.model.capacity, {3, 1}, {2});
    SimConfig cfg;
    cfg.n_arrivals = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(simulate(m.model, pol, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
