#include <benchmark/benchmark.h>

#include <random>

#include "sybilblind/aggregator.hpp"
#include "sybilblind/analysis.hpp"
#include "sybilblind/detector.hpp"
#include "sybilblind/pipeline.hpp"
#include "sybilblind/sampler.hpp"
#include "sybilblind/synth.hpp"

using namespace sybilblind;

namespace {

Scenario make_scenario(std::size_t benign_nodes) {
    ScenarioSpec spec;
    spec.benign_source = PaSource{benign_nodes, 4};
    spec.num_attack_edges = benign_nodes / 20;
    spec.seed = 1;
    return build_scenario(spec);
}

void BM_PropagateSweep(benchmark::State& state) {
    const auto s = make_scenario(static_cast<std::size_t>(state.range(0)));
    DetectorParams params;
    params.w = 0.51;
    params.max_iterations = 1;
    params.fixed_iterations = true;
    const auto priors = assign_priors(s.graph.num_nodes(), sample_uniform(s.graph.num_nodes(), 100, 7), params.theta);
    for (auto _ : state) benchmark::DoNotOptimize(propagate(s.graph, priors, params));
    state.counters["edges"] = static_cast<double>(s.graph.num_edges());
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.graph.num_edges()));
}
BENCHMARK(BM_PropagateSweep)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_Auc(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> scores(n);
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = unit(rng);
        labels[i] = unit(rng) < 0.2 ? Label::sybil : Label::benign;
    }
    const GroundTruth truth(std::move(labels));
    for (auto _ : state) benchmark::DoNotOptimize(auc(scores, truth));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Auc)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMicrosecond);

void BM_HeaSelect(benchmark::State& state) {
    const auto s = make_scenario(10'000);
    SybilBlindConfig cfg;
    cfg.k = static_cast<std::size_t>(state.range(0));
    cfg.kappa = 10;
    const auto trials = run_all_trials(s.graph, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(hea_select(trials, cfg.kappa));
}
BENCHMARK(BM_HeaSelect)->Arg(20)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_RunSybilBlind(benchmark::State& state) {
    const auto s = make_scenario(10'000);
    SybilBlindConfig cfg;
    cfg.k = 20;
    cfg.kappa = 10;
    for (auto _ : state) benchmark::DoNotOptimize(run_sybilblind(s.graph, cfg));
}
BENCHMARK(BM_RunSybilBlind)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
