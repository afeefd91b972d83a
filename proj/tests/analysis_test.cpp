#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sybilblind/analysis.hpp"
#include "sybilblind/error.hpp"
#include "sybilblind/synth.hpp"

using namespace sybilblind;

namespace {

GroundTruth truth_of(const std::vector<int>& sybil) {
    std::vector<Label> labels;
    for (int s : sybil) labels.push_back(s ? Label::sybil : Label::benign);
    return GroundTruth(std::move(labels));
}

}  // namespace

TEST(Auc, Examples) {
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.9, 0.8, 0.7, 0.1}, truth_of({1, 1, 0, 0})), 1.0);
    EXPECT_DOUBLE_EQ(auc(std::vector<double>(6, 0.3), truth_of({1, 0, 1, 0, 0, 1})), 0.5);
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.8, 0.5, 0.5, 0.2}, truth_of({1, 1, 0, 0})), 0.875);
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.1, 0.9}, truth_of({1, 0})), 0.0);
}

TEST(Auc, Errors) {
    EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, truth_of({0, 0})), DataError);
    EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, truth_of({1, 1})), DataError);
    EXPECT_THROW(auc(std::vector<double>{0.1}, truth_of({1, 0})), DataError);
}

TEST(Auc, MatchesPairwiseOracle) {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 300; ++round) {
        const std::size_t n = 2 + rng() % 199;
        std::vector<double> scores(n);
        std::vector<int> sybil(n);
        const std::size_t levels = 1 + rng() % 20;  // few levels inject ties
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng() % levels) / static_cast<double>(levels);
            sybil[i] = static_cast<int>(rng() % 2);
        }
        sybil[0] = 1;
        sybil[1] = 0;
        EXPECT_NEAR(auc(scores, truth_of(sybil)), oracle::pairwise_auc(scores, sybil), 1e-12);
    }
}

TEST(Fnr, Examples) {
    EXPECT_EQ(fnr(std::vector<double>{0.9, 0.9, 0.1}, truth_of({1, 1, 0})), 0.0);
    EXPECT_EQ(fnr(std::vector<double>{0.5, 0.5, 0.1}, truth_of({1, 1, 0})), 1.0);
    EXPECT_DOUBLE_EQ(fnr(std::vector<double>{0.2, 0.9, 0.4, 0.8, 0.7, 0.1}, truth_of({1, 1, 1, 1, 1, 0})), 0.4);
    EXPECT_THROW(fnr(std::vector<double>{0.2}, truth_of({0})), DataError);
}

TEST(NoiseBounds, Examples) {
    auto b = noise_bounds(10, 0.2, 0.1);
    EXPECT_NEAR(b.lower, 1.0995116277760e-8, 1e-20);
    EXPECT_NEAR(b.upper, std::exp(-8.192 / 0.82), 1e-18);
    EXPECT_NEAR(b.upper, 4.58450e-5, 1e-9);
    EXPECT_FALSE(b.lower_exceeds_upper);

    auto loose = noise_bounds(10, 0.2, 0.4);
    EXPECT_NEAR(loose.k_min, std::exp(0.512 / 0.52), 1e-12);
    EXPECT_NEAR(loose.k_min, 2.68, 0.005);
    EXPECT_NEAR(loose.k_max, 9.1e7, 0.01e7);

    auto vacuous = noise_bounds(10, 0.2, 0.5);
    EXPECT_EQ(vacuous.upper, 1.0);
    EXPECT_EQ(vacuous.k_min, 1.0);
}

TEST(NoiseBounds, Errors) {
    EXPECT_THROW(noise_bounds(10, 0.2, 0.0), InvalidArgument);
    EXPECT_THROW(noise_bounds(10, 0.2, 0.6), InvalidArgument);
    EXPECT_THROW(noise_bounds(10, 0.0, 0.1), InvalidArgument);
    EXPECT_THROW(noise_bounds(10, 1.0, 0.1), InvalidArgument);
}

TEST(NoiseBounds, BudgetsAreReciprocals) {
    for (std::size_t n = 1; n <= 30; ++n) {
        for (double r : {0.05, 0.2, 0.45, 0.7}) {
            for (double tau : {0.01, 0.1, 0.25, 0.5}) {
                auto b = noise_bounds(n, r, tau);
                EXPECT_NEAR(b.k_min * b.upper, 1.0, 1e-12);
                EXPECT_NEAR(b.k_max * b.lower, 1.0, 1e-12);
                EXPECT_EQ(b.lower_exceeds_upper, b.lower > b.upper);
            }
        }
    }
}

TEST(NoiseProbExact, Examples) {
    EXPECT_NEAR(noise_prob_exact(3, 1, 1, 0.0, SamplingModel::disjoint), 0.25, 1e-15);
    EXPECT_NEAR(noise_prob_exact(3, 1, 1, 0.0, SamplingModel::independent), 0.1875, 1e-15);
    EXPECT_NEAR(noise_prob_exact(40, 10, 5, 1.0, SamplingModel::disjoint), 1.0, 1e-12);
    EXPECT_NEAR(noise_prob_exact(40, 10, 5, 1.0, SamplingModel::independent), 1.0, 1e-12);
    EXPECT_NEAR(noise_prob_independent(10, 0.2, 0.1), 1.57779918585856e-06, 1e-18);
    EXPECT_NEAR(noise_prob_independent(3, 1.0 / 3.0, 1.0 / 3.0), 140.0 / 729.0, 1e-15);
}

TEST(NoiseProbExact, Errors) {
    EXPECT_THROW(noise_prob_exact(3, 1, 3, 0.1, SamplingModel::disjoint), DataError);
    EXPECT_THROW(noise_prob_exact(0, 0, 1, 0.1, SamplingModel::disjoint), DataError);
    EXPECT_THROW(noise_prob_exact(3, 1, 1, -0.1, SamplingModel::disjoint), InvalidArgument);
    EXPECT_THROW(noise_prob_independent(kMaxExactSampleSize + 1, 0.2, 0.1), DataError);
}

TEST(NoiseProbExact, DisjointMatchesEnumeration) {
    struct Case {
        std::size_t nb, ns, n, num, den;
    };
    for (const Case c : {Case{3, 1, 1, 0, 1}, Case{4, 2, 2, 1, 2}, Case{5, 3, 2, 1, 3}, Case{6, 3, 3, 1, 4},
                         Case{5, 5, 2, 0, 1}, Case{7, 3, 3, 1, 3}, Case{4, 4, 4, 1, 2}, Case{8, 2, 3, 2, 5}}) {
        const double tau = static_cast<double>(c.num) / static_cast<double>(c.den);
        const double exact = noise_prob_exact(c.nb, c.ns, c.n, tau, SamplingModel::disjoint);
        EXPECT_NEAR(exact, oracle::disjoint_noise_prob(c.nb, c.ns, c.n, c.num, c.den), 1e-12)
            << c.nb << "," << c.ns << "," << c.n << "," << tau;
    }
    EXPECT_NEAR(noise_prob_exact(4, 2, 2, 0.5, SamplingModel::disjoint), 2.0 / 3.0, 1e-14);
    EXPECT_NEAR(noise_prob_exact(5, 3, 2, 1.0 / 3.0, SamplingModel::disjoint), 9.0 / 28.0, 1e-14);
    EXPECT_NEAR(noise_prob_exact(6, 3, 3, 0.25, SamplingModel::disjoint), 5.0 / 42.0, 1e-14);
}

TEST(NoiseProbExact, IndependentMatchesEnumeration) {
    for (std::size_t n = 1; n <= 6; ++n) {
        for (double r : {0.1, 0.25, 0.4, 0.7}) {
            for (auto [num, den] : {std::pair<std::size_t, std::size_t>{0, 1}, {1, 5}, {1, 3}, {2, 5}, {1, 2}}) {
                const double tau = static_cast<double>(num) / static_cast<double>(den);
                EXPECT_NEAR(noise_prob_independent(n, r, tau), oracle::independent_noise_prob(n, r, num, den), 1e-13)
                    << n << "," << r << "," << tau;
            }
        }
    }
}

TEST(NoiseProbExact, SandwichOnGrid) {
    for (std::size_t n = 2; n <= 12; ++n) {
        for (double r : {0.1, 0.2, 0.3, 0.4}) {
            const double lower = std::pow(1.0 - r, static_cast<double>(n)) * std::pow(r, static_cast<double>(n));
            EXPECT_LE(lower, noise_prob_independent(n, r, 0.0));
            for (int t = 1; t <= 10; ++t) {
                const double tau = 0.05 * t;
                const auto b = noise_bounds(n, r, tau);
                const double exact = noise_prob_independent(n, r, tau);
                EXPECT_LE(b.lower, exact) << n << "," << r << "," << tau;
                EXPECT_LE(exact, b.upper) << n << "," << r << "," << tau;
                // The smallest nonzero noise is 1/(n+1); below it only the clean outcome counts.
                if (tau < 1.0 / static_cast<double>(n + 1)) EXPECT_EQ(exact, b.lower);
            }
        }
    }
}

TEST(NoiseProbMc, SingleTrialAndErrors) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto est = noise_prob_mc(3, 1, 1, 0.0, SamplingModel::disjoint, 1, seed);
        EXPECT_TRUE(est.estimate == 0.0 || est.estimate == 1.0);
        EXPECT_EQ(est.trials, 1u);
    }
    EXPECT_THROW(noise_prob_mc(3, 1, 1, 0.0, SamplingModel::disjoint, 0, 0), InvalidArgument);
    EXPECT_THROW(noise_prob_mc(3, 1, 3, 0.0, SamplingModel::disjoint, 10, 0), DataError);
}

TEST(NoiseProbMc, AgreesWithExact) {
    struct Case {
        std::size_t nb, ns, n;
        double tau;
    };
    for (const Case c : {Case{3, 1, 1, 0.0}, Case{5, 3, 2, 1.0 / 3.0}, Case{80, 20, 4, 0.25}, Case{60, 40, 6, 0.4}}) {
        for (auto model : {SamplingModel::disjoint, SamplingModel::independent}) {
            const double exact = noise_prob_exact(c.nb, c.ns, c.n, c.tau, model);
            auto est = noise_prob_mc(c.nb, c.ns, c.n, c.tau, model, 200'000, 99);
            const double se = std::sqrt(exact * (1.0 - exact) / 200'000.0);
            EXPECT_NEAR(est.estimate, exact, 4.0 * se) << c.nb << "," << c.ns << "," << c.n;
            EXPECT_NEAR(est.standard_error, se, 0.1 * se + 1e-12);
        }
    }
}

TEST(NoiseProbMc, TenMillionTrialsInsideBounds) {
    auto b = noise_bounds(10, 0.2, 0.1);
    auto est = noise_prob_mc_independent(10, 0.2, 0.1, 10'000'000, 2024);
    EXPECT_GE(est.estimate, b.lower);
    EXPECT_LE(est.estimate, b.upper);
}

TEST(NoiseProbMc, Deterministic) {
    auto a = noise_prob_mc(30, 10, 3, 0.34, SamplingModel::disjoint, 5000, 7);
    auto b = noise_prob_mc(30, 10, 3, 0.34, SamplingModel::disjoint, 5000, 7);
    EXPECT_EQ(a.estimate, b.estimate);
}

namespace {

ScenarioSpec sweep_spec() {
    ScenarioSpec spec;
    spec.benign_source = PaSource{2000, 4};
    spec.num_attack_edges = 100;
    spec.seed = 3;
    return spec;
}

SybilBlindConfig sweep_config() {
    SybilBlindConfig cfg;
    cfg.k = 40;
    cfg.master_seed = 1;
    return cfg;
}

}  // namespace

TEST(Sweep, NoAttackEdgesSeparatesRegions) {
    std::vector<double> values{0};
    auto spec = sweep_spec();
    auto cfg = sweep_config();
    // Uniform samples are noisy, so disconnected regions are not perfectly separated.
    auto uniform = sweep(SweepAxis::attack_edges, values, spec, cfg);
    ASSERT_EQ(uniform.size(), 1u);
    EXPECT_NEAR(uniform[0].auc, 0.917328, 1e-6);

    // Clean samples from a perfect feature separate them exactly.
    spec.num_attack_edges = 0;
    const auto s = build_scenario(spec);
    FeatureRefinedSampling fbr;
    fbr.pool = 200;
    fbr.scores.resize(s.graph.num_nodes());
    for (std::size_t u = 0; u < fbr.scores.size(); ++u) fbr.scores[u] = s.truth.is_sybil(u) ? 0.0 : 1.0;
    cfg.sampler = fbr;
    auto clean = sweep(SweepAxis::attack_edges, values, spec, cfg);
    EXPECT_EQ(clean[0].auc, 1.0);
}

TEST(Sweep, SamplingSizeAnchors) {
    std::vector<double> values{1, 5, 10, 20};
    auto points = sweep(SweepAxis::sampling_size, values, sweep_spec(), sweep_config());
    ASSERT_EQ(points.size(), 4u);
    // Regression anchors for this scenario; smaller uniform samples are clean more often.
    const std::vector<double> expected{0.997187, 0.951585, 0.915944, 0.900026};
    for (std::size_t i = 0; i < points.size(); ++i) {
        EXPECT_EQ(points[i].value, values[i]);
        EXPECT_NEAR(points[i].auc, expected[i], 1e-6) << "n = " << values[i];
    }
}

TEST(Sweep, TrialsAxisCapsKappa) {
    std::vector<double> values{1, 3};
    auto points = sweep(SweepAxis::trials, values, sweep_spec(), sweep_config());
    ASSERT_EQ(points.size(), 2u);
    EXPECT_LT(points[0].selected_trial, 1u);
    EXPECT_LT(points[1].selected_trial, 3u);
}

TEST(Sweep, CsvFormat) {
    std::vector<SweepPoint> points{{500, 0.875, 3}, {0.25, 1.0, 0}};
    std::ostringstream plain, headed;
    write_sweep_csv(plain, points);
    write_sweep_csv(headed, points, true);
    EXPECT_EQ(plain.str(), "500,0.875\n0.25,1\n");
    EXPECT_EQ(headed.str(), "value,auc\n500,0.875\n0.25,1\n");
}
