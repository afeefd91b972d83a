#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sybilblind/graph.hpp"
#include "sybilblind/pipeline.hpp"
#include "sybilblind/synth.hpp"

namespace sybilblind {

/// Probability that a random Sybil scores above a random benign node, with
/// half credit for ties (average-rank Mann-Whitney form). Throws DataError
/// unless both classes are present.
double auc(std::span<const double> scores, const GroundTruth& truth);

/// Fraction of true Sybils with probability <= 0.5. Throws DataError when
/// the truth has no Sybils.
double fnr(std::span<const double> probabilities, const GroundTruth& truth);

/// Bounds on Pr(alpha_b <= tau, alpha_s <= tau) for sampling size n and
/// Sybil fraction r, and the trial budgets they imply.
struct BoundReport {
    std::size_t n = 0;
    double r = 0.0;
    double tau = 0.0;
    double lower = 0.0;  // (1 - r)^n r^n
    double upper = 0.0;  // exp(-2 (1 - 2 tau)^2 (1 - r)^2 n / (tau^2 + (1 - tau)^2))
    double k_min = 0.0;  // 1 / upper
    double k_max = 0.0;  // 1 / lower
    bool lower_exceeds_upper = false;
};

/// Throws InvalidArgument unless 0 < tau <= 0.5 and 0 < r < 1.
BoundReport noise_bounds(std::size_t n, double r, double tau);

enum class SamplingModel {
    independent,  // every sampled node is a Sybil with probability r, independently
    disjoint,     // B and S drawn without replacement from the actual population
};

/// True when noisy / total <= tau; 0/0 counts as noise-free.
bool noise_within(std::size_t noisy, std::size_t total, double tau);

/// Exact Pr(alpha_b <= tau, alpha_s <= tau) by summing over all
/// (n_bb, n_sb) outcomes. Instances need n <= kMaxExactSampleSize, and the
/// disjoint model needs 2n <= num_benign + num_sybil (DataError otherwise).
inline constexpr std::size_t kMaxExactSampleSize = 5000;
double noise_prob_exact(std::size_t num_benign, std::size_t num_sybil, std::size_t n, double tau,
                        SamplingModel model);
/// Independent model with the Sybil rate given directly.
double noise_prob_independent(std::size_t n, double r, double tau);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;  // sqrt(p_hat (1 - p_hat) / trials)
    std::size_t trials = 0;
};

/// Simulates the sampling model node by node. Throws InvalidArgument when
/// trials == 0.
MonteCarloEstimate noise_prob_mc(std::size_t num_benign, std::size_t num_sybil, std::size_t n, double tau,
                                 SamplingModel model, std::size_t trials, std::uint64_t seed);
MonteCarloEstimate noise_prob_mc_independent(std::size_t n, double r, double tau, std::size_t trials,
                                             std::uint64_t seed);

enum class SweepAxis { attack_edges, sybil_fraction, sampling_size, trials };

struct SweepPoint {
    double value = 0.0;
    double auc = 0.0;
    std::size_t selected_trial = 0;
};

/// One scenario build + pipeline run per value, all with the base seeds.
/// For the trials axis kappa is capped at k.
std::vector<SweepPoint> sweep(SweepAxis axis, std::span<const double> values, const ScenarioSpec& base_scenario,
                              const SybilBlindConfig& base_config);

/// `value,auc` rows.
void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points, bool header = false);

}  // namespace sybilblind
