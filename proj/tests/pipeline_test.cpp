#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>

#include "sybilblind/analysis.hpp"
#include "sybilblind/error.hpp"
#include "sybilblind/pipeline.hpp"
#include "sybilblind/synth.hpp"

using namespace sybilblind;

namespace {

const Scenario& small_scenario() {
    static const Scenario s = [] {
        ScenarioSpec spec;
        spec.benign_source = PaSource{2000, 4};
        spec.num_attack_edges = 100;
        spec.seed = 1;
        return build_scenario(spec);
    }();
    return s;
}

SybilBlindConfig small_config(std::uint64_t seed) {
    SybilBlindConfig cfg;
    cfg.k = 30;
    cfg.kappa = 5;
    cfg.master_seed = seed;
    return cfg;
}

// Records how detect() is called; otherwise behaves like SybilSCAR.
class CountingDetector final : public Detector {
public:
    explicit CountingDetector(SybilScarDetector inner) : inner_(std::move(inner)) {}
    Propagation detect(const Graph& g, const TrainingSample& sample, std::size_t threads) const override {
        calls_.fetch_add(1);
        return inner_.detect(g, sample, threads);
    }
    std::size_t calls() const { return calls_.load(); }

private:
    SybilScarDetector inner_;
    mutable std::atomic<std::size_t> calls_{0};
};

}  // namespace

TEST(RunSybilBlind, SingleTrialIsThatTrial) {
    const auto& s = small_scenario();
    SybilBlindConfig cfg = small_config(3);
    cfg.k = 1;
    cfg.kappa = 1;
    auto result = run_sybilblind(s.graph, cfg);
    EXPECT_EQ(result.selected_trial_index, 0u);
    auto sample = draw_sample(cfg.sampler, s.graph.num_nodes(), cfg.n, trial_seed(cfg.master_seed, 0));
    auto det = SybilScarDetector::for_graph(s.graph, cfg.detector);
    EXPECT_EQ(result.aggregated, det.detect(s.graph, sample, 1).posteriors);
    EXPECT_EQ(result.w, *det.params().w);
}

TEST(RunSybilBlind, WorkerCountDoesNotChangeOutput) {
    const auto& s = small_scenario();
    auto cfg = small_config(4);
    auto base = run_sybilblind(s.graph, cfg);
    for (std::size_t workers : {2, 3, 8}) {
        cfg.worker_count = workers;
        cfg.threads_per_trial = workers == 3 ? 2 : 1;
        auto other = run_sybilblind(s.graph, cfg);
        EXPECT_EQ(other.aggregated, base.aggregated);
        EXPECT_EQ(other.selected_trial_index, base.selected_trial_index);
        EXPECT_EQ(other.ranking, base.ranking);
        for (std::size_t i = 0; i < cfg.k; ++i) {
            EXPECT_EQ(other.trials[i].h, base.trials[i].h);
            EXPECT_EQ(other.trials[i].sample_digest, base.trials[i].sample_digest);
        }
    }
}

TEST(RunSybilBlind, PeakRetentionBound) {
    const auto& s = small_scenario();
    auto cfg = small_config(5);
    for (std::size_t workers : {1, 2, 4}) {
        cfg.worker_count = workers;
        auto result = run_sybilblind(s.graph, cfg);
        EXPECT_LE(result.peak_retained_vectors, cfg.kappa + workers);
        EXPECT_GE(result.peak_retained_vectors, cfg.kappa);
    }
}

TEST(RunSybilBlind, AgreesWithFullRetention) {
    const auto& s = small_scenario();
    auto cfg = small_config(6);
    for (auto order : {SelectionOrder::homophily_first, SelectionOrder::entropy_first}) {
        cfg.selection = order;
        auto streamed = run_sybilblind(s.graph, cfg);
        auto all = run_all_trials(s.graph, cfg);
        auto chosen = hea_select(all, cfg.kappa, order);
        EXPECT_EQ(streamed.selected_trial_index, chosen.trial_index);
        EXPECT_EQ(streamed.aggregated, chosen.aggregated);
        for (std::size_t i = 0; i < cfg.k; ++i) {
            EXPECT_EQ(streamed.trials[i].e, all[i].diagnostics.e);
            EXPECT_EQ(streamed.trials[i].iterations, all[i].diagnostics.iterations);
        }
    }
}

TEST(RunSybilBlind, TrialsArePureFunctionsOfTheirIndex) {
    const auto& s = small_scenario();
    auto cfg = small_config(7);
    auto all = run_all_trials(s.graph, cfg);
    cfg.k = 10;
    cfg.kappa = 1;
    auto prefix = run_all_trials(s.graph, cfg);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(prefix[i].posteriors, all[i].posteriors);
}

TEST(RunSybilBlind, CustomDetector) {
    const auto& s = small_scenario();
    auto cfg = small_config(8);
    cfg.worker_count = 3;
    CountingDetector det(SybilScarDetector::for_graph(s.graph, cfg.detector));
    auto custom = run_sybilblind(s.graph, cfg, &det);
    EXPECT_EQ(det.calls(), cfg.k);
    EXPECT_EQ(custom.aggregated, run_sybilblind(s.graph, cfg).aggregated);
}

TEST(RunSybilBlind, FeatureRefinedSampler) {
    const auto& s = small_scenario();
    auto cfg = small_config(9);
    FeatureRefinedSampling fbr;
    fbr.pool = 200;
    // A perfect feature: Sybils score low.
    fbr.scores.resize(s.graph.num_nodes());
    for (std::size_t u = 0; u < fbr.scores.size(); ++u) fbr.scores[u] = s.truth.is_sybil(u) ? 0.1 : 0.9;
    cfg.sampler = fbr;
    auto result = run_sybilblind(s.graph, cfg);
    EXPECT_GT(auc(result.aggregated, s.truth), 0.95);
}

TEST(RunSybilBlind, RecoversSybilsOnSmallScenario) {
    const auto& s = small_scenario();
    auto cfg = small_config(10);
    cfg.k = 100;
    cfg.kappa = 10;
    EXPECT_GT(auc(run_sybilblind(s.graph, cfg).aggregated, s.truth), 0.8);
}

TEST(SybilBlindConfig, Validation) {
    SybilBlindConfig cfg;
    EXPECT_NO_THROW(cfg.validate(100));
    EXPECT_THROW(cfg.validate(19), DataError);
    cfg.kappa = 101;
    EXPECT_THROW(cfg.validate(100), InvalidArgument);
    cfg.kappa = 0;
    EXPECT_THROW(cfg.validate(100), InvalidArgument);
    cfg.kappa = 10;
    cfg.n = 0;
    EXPECT_THROW(cfg.validate(100), InvalidArgument);
    cfg.n = 10;
    cfg.worker_count = 0;
    EXPECT_THROW(cfg.validate(100), InvalidArgument);
    cfg.worker_count = 1;
    FeatureRefinedSampling fbr;
    fbr.pool = 40;
    fbr.scores.assign(99, 0.0);
    cfg.sampler = fbr;
    EXPECT_THROW(cfg.validate(100), DataError);
    std::get<FeatureRefinedSampling>(cfg.sampler).scores.assign(100, 0.0);
    EXPECT_NO_THROW(cfg.validate(100));
    std::get<FeatureRefinedSampling>(cfg.sampler).pool = 60;
    EXPECT_THROW(cfg.validate(100), DataError);
    std::get<FeatureRefinedSampling>(cfg.sampler).pool = 5;
    EXPECT_THROW(cfg.validate(100), InvalidArgument);
}

TEST(RankNodes, DescendingWithIdTies) {
    std::vector<double> p{0.2, 0.9, 0.2, 0.5, 0.9};
    EXPECT_EQ(rank_nodes(p), (std::vector<NodeId>{1, 4, 3, 0, 2}));
}

TEST(RunSybilBlind, WallClockLinearInTrials) {
    ScenarioSpec spec;
    spec.benign_source = PaSource{10'000, 4};
    spec.seed = 2;
    auto s = build_scenario(spec);
    SybilBlindConfig cfg;
    cfg.kappa = 5;
    cfg.detector.fixed_iterations = true;
    cfg.detector.w = 0.51;
    cfg.detector.max_iterations = 10;

    std::vector<double> ks{5, 10, 20};
    std::vector<double> secs;
    for (double k : ks) {
        cfg.k = static_cast<std::size_t>(k);
        double best = 1e30;
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            run_sybilblind(s.graph, cfg);
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        secs.push_back(best);
    }
    // Least-squares line through the three points.
    const double mk = (ks[0] + ks[1] + ks[2]) / 3.0;
    const double mt = (secs[0] + secs[1] + secs[2]) / 3.0;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 3; ++i) {
        sxy += (ks[i] - mk) * (secs[i] - mt);
        sxx += (ks[i] - mk) * (ks[i] - mk);
    }
    const double slope = sxy / sxx;
    const double intercept = mt - slope * mk;
    for (int i = 0; i < 3; ++i) {
        const double fit = intercept + slope * ks[i];
        EXPECT_NEAR(secs[i], fit, 0.3 * fit) << "k = " << ks[i];
    }
}
