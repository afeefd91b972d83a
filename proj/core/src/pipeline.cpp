#include "sybilblind/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include "sybilblind/error.hpp"
#include "sybilblind/random.hpp"

namespace sybilblind {
namespace {

// Runs trials [0, k) on up to cfg.worker_count threads and hands every
// finished trial to sink(diagnostics, posteriors). sink must be thread-safe.
template <typename Sink>
void for_each_trial(const Graph& g, const SybilBlindConfig& cfg, const Detector& detector,
                    RetentionCounter* counter, Sink&& sink) {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.k || failed.load()) return;
            try {
                auto sample = draw_sample(cfg.sampler, g.num_nodes(), cfg.n, trial_seed(cfg.master_seed, i));
                auto prop = detector.detect(g, sample, cfg.threads_per_trial);
                if (counter) counter->acquire();
                auto diag = diagnose(g, prop.posteriors, i);
                diag.iterations = prop.iterations;
                diag.sample_digest = sample_digest(sample);
                sink(std::move(diag), std::move(prop.posteriors));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(cfg.worker_count, 1, cfg.k);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
}

struct Retained {
    TrialDiagnostics diagnostics;
    std::vector<double> posteriors;
};

// Streaming top-kappa under ranks_before. Because ranks_before is a strict
// total order, the retained set after all offers does not depend on the
// order in which trials arrive.
class TopTrials {
public:
    TopTrials(std::size_t kappa, SelectionOrder order, RetentionCounter& counter)
        : kappa_(kappa), order_(order), counter_(counter) {}

    void offer(TrialDiagnostics diag, std::vector<double> posteriors) {
        std::lock_guard lock(mutex_);
        if (kept_.size() < kappa_) {
            kept_.push_back({std::move(diag), std::move(posteriors)});
            return;
        }
        auto worst = std::max_element(kept_.begin(), kept_.end(), [&](const Retained& a, const Retained& b) {
            return ranks_before(a.diagnostics, b.diagnostics, order_);
        });
        if (ranks_before(diag, worst->diagnostics, order_)) {
            *worst = {std::move(diag), std::move(posteriors)};
        } else {
            posteriors.clear();
            posteriors.shrink_to_fit();
        }
        counter_.release();
    }

    std::vector<Retained>& kept() { return kept_; }

private:
    std::size_t kappa_;
    SelectionOrder order_;
    RetentionCounter& counter_;
    std::mutex mutex_;
    std::vector<Retained> kept_;
};

}  // namespace

void SybilBlindConfig::validate(std::size_t num_nodes) const {
    if (n < 1) throw InvalidArgument("sampling size n must be >= 1");
    if (k < 1) throw InvalidArgument("number of trials k must be >= 1");
    if (kappa < 1 || kappa > k) throw InvalidArgument("kappa must lie in [1, k]");
    if (worker_count < 1) throw InvalidArgument("worker count must be >= 1");
    if (threads_per_trial < 1) throw InvalidArgument("threads per trial must be >= 1");
    detector.validate();
    if (const auto* refined = std::get_if<FeatureRefinedSampling>(&sampler)) {
        if (refined->scores.size() != num_nodes) {
            throw DataError("feature scores cover " + std::to_string(refined->scores.size()) + " nodes, graph has " +
                            std::to_string(num_nodes));
        }
        if (n > refined->pool) throw InvalidArgument("sampling size n exceeds pool size K");
        if (2 * refined->pool > num_nodes) {
            throw DataError("pool size K = " + std::to_string(refined->pool) + " needs 2K <= " +
                            std::to_string(num_nodes) + " nodes");
        }
    } else if (2 * n > num_nodes) {
        throw DataError("sampling size n = " + std::to_string(n) + " needs 2n <= " + std::to_string(num_nodes) +
                        " nodes");
    }
}

void RetentionCounter::acquire() {
    const std::size_t now = live_.fetch_add(1) + 1;
    std::size_t peak = peak_.load();
    while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
    }
}

void RetentionCounter::release() { live_.fetch_sub(1); }

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial_index) {
    return derive_seed(master_seed, "trial", trial_index);
}

TrainingSample draw_sample(const SamplerConfig& sampler, std::size_t num_nodes, std::size_t n, std::uint64_t seed) {
    if (const auto* refined = std::get_if<FeatureRefinedSampling>(&sampler)) {
        return sample_feature_refined(refined->scores, n, refined->pool, seed);
    }
    return sample_uniform(num_nodes, n, seed);
}

SybilBlindResult run_sybilblind(const Graph& g, const SybilBlindConfig& cfg, const Detector* detector) {
    cfg.validate(g.num_nodes());
    std::optional<SybilScarDetector> own;
    SybilBlindResult result;
    if (!detector) {
        own.emplace(SybilScarDetector::for_graph(g, cfg.detector));
        detector = &*own;
        result.w = *own->params().w;
    } else {
        result.w = cfg.detector.w.value_or(0.0);
    }

    RetentionCounter counter;
    TopTrials top(cfg.kappa, cfg.selection, counter);
    result.trials.resize(cfg.k);
    std::mutex diag_mutex;
    for_each_trial(g, cfg, *detector, &counter, [&](TrialDiagnostics diag, std::vector<double> posteriors) {
        {
            std::lock_guard lock(diag_mutex);
            result.trials[diag.trial_index] = diag;
        }
        top.offer(std::move(diag), std::move(posteriors));
    });

    auto& kept = top.kept();
    std::vector<TrialDiagnostics> kept_diags;
    kept_diags.reserve(kept.size());
    for (const auto& r : kept) kept_diags.push_back(r.diagnostics);
    const std::size_t pos = select_trial(kept_diags, kept.size(), cfg.selection);

    result.selected_trial_index = kept[pos].diagnostics.trial_index;
    result.aggregated = std::move(kept[pos].posteriors);
    for (std::size_t i = 0; i < kept.size(); ++i) counter.release();
    kept.clear();
    result.ranking = rank_nodes(result.aggregated);
    result.peak_retained_vectors = counter.peak();
    return result;
}

std::vector<TrialResult> run_all_trials(const Graph& g, const SybilBlindConfig& cfg, const Detector* detector) {
    cfg.validate(g.num_nodes());
    std::optional<SybilScarDetector> own;
    if (!detector) {
        own.emplace(SybilScarDetector::for_graph(g, cfg.detector));
        detector = &*own;
    }
    std::vector<TrialResult> trials(cfg.k);
    for_each_trial(g, cfg, *detector, nullptr, [&](TrialDiagnostics diag, std::vector<double> posteriors) {
        // Each index is written by exactly one worker.
        const std::size_t i = diag.trial_index;
        trials[i] = {std::move(diag), std::move(posteriors)};
    });
    return trials;
}

std::vector<NodeId> rank_nodes(std::span<const double> probabilities) {
    std::vector<NodeId> order(probabilities.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return probabilities[a] > probabilities[b]; });
    return order;
}

}  // namespace sybilblind
