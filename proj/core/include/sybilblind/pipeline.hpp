#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "sybilblind/aggregator.hpp"
#include "sybilblind/detector.hpp"
#include "sybilblind/graph.hpp"
#include "sybilblind/sampler.hpp"

namespace sybilblind {

struct UniformSampling {};

struct FeatureRefinedSampling {
    std::size_t pool = 1000;     // K
    std::vector<double> scores;  // one per node; low = Sybil-suspect
};

using SamplerConfig = std::variant<UniformSampling, FeatureRefinedSampling>;

struct SybilBlindConfig {
    std::size_t n = 10;
    std::size_t k = 100;
    std::size_t kappa = 10;
    DetectorParams detector;
    SamplerConfig sampler = UniformSampling{};
    std::uint64_t master_seed = 0;
    std::size_t worker_count = 1;       // trials in flight
    std::size_t threads_per_trial = 1;  // sweep partitioning inside a trial
    SelectionOrder selection = SelectionOrder::homophily_first;

    /// Throws InvalidArgument for parameter errors and DataError when the
    /// graph is too small for the sampler.
    void validate(std::size_t num_nodes) const;
};

/// Counts live trial posterior vectors and remembers the peak.
class RetentionCounter {
public:
    void acquire();
    void release();
    std::size_t live() const { return live_.load(); }
    std::size_t peak() const { return peak_.load(); }

private:
    std::atomic<std::size_t> live_{0};
    std::atomic<std::size_t> peak_{0};
};

struct SybilBlindResult {
    std::vector<double> aggregated;
    std::vector<NodeId> ranking;          // probability descending, ties by node id
    std::vector<TrialDiagnostics> trials;  // all k, by trial index
    std::size_t selected_trial_index = 0;
    double w = 0.0;  // homophily strength actually used
    std::size_t peak_retained_vectors = 0;
};

/// Seed of trial i; a pure function of (master seed, i).
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial_index);

TrainingSample draw_sample(const SamplerConfig& sampler, std::size_t num_nodes, std::size_t n,
                           std::uint64_t seed);

/// Runs k sampling trials and aggregates them with the homophily-entropy
/// rule. Only the current top-kappa posterior vectors are retained while
/// trials stream in; diagnostics are kept for every trial. The output is
/// identical for every worker_count. `detector` defaults to SybilScarDetector
/// built from cfg.detector.
SybilBlindResult run_sybilblind(const Graph& g, const SybilBlindConfig& cfg, const Detector* detector = nullptr);

/// Runs all k trials and keeps every posterior vector (O(k |V|) memory).
/// Meant for baseline-aggregator comparisons.
std::vector<TrialResult> run_all_trials(const Graph& g, const SybilBlindConfig& cfg,
                                        const Detector* detector = nullptr);

/// Node ids by probability descending, ties broken by ascending id.
std::vector<NodeId> rank_nodes(std::span<const double> probabilities);

}  // namespace sybilblind
