#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sybilblind/graph.hpp"

namespace sybilblind {

struct Prediction {
    std::vector<std::uint8_t> sybil;  // 1 iff p_u > 0.5
    double sybil_fraction = 0.0;      // s
};

Prediction predict(std::span<const double> posteriors);

/// Fraction of edges whose endpoints share a predicted label.
/// Throws DataError on an edgeless graph.
double homophily(const Graph& g, std::span<const std::uint8_t> sybil);

/// Binary entropy (natural log) of s, forced to 0 for s > 0.5.
double one_side_entropy(double s);

struct TrialDiagnostics {
    std::size_t trial_index = 0;
    double h = 0.0;
    double e = 0.0;
    double s = 0.0;
    std::size_t iterations = 0;
    std::string sample_digest;
};

struct TrialResult {
    TrialDiagnostics diagnostics;
    std::vector<double> posteriors;
};

/// h, e and s of one trial's posteriors.
TrialDiagnostics diagnose(const Graph& g, std::span<const double> posteriors, std::size_t trial_index);

enum class SelectionOrder {
    homophily_first,  // top-kappa by h, then max e
    entropy_first,    // top-kappa by e, then max h
};

/// Strict total order used for the top-kappa cut: larger primary metric
/// first (h, or e for entropy_first), then lower trial index.
bool ranks_before(const TrialDiagnostics& a, const TrialDiagnostics& b, SelectionOrder order);

/// Position in `trials` of the homophily-entropy winner: among the top-kappa
/// trials under ranks_before, the one with the largest secondary metric
/// (e, or h for entropy_first); ties go to the larger primary metric, then
/// the lower trial index. Throws InvalidArgument on an empty list or
/// kappa outside [1, |trials|].
std::size_t select_trial(std::span<const TrialDiagnostics> trials, std::size_t kappa,
                         SelectionOrder order = SelectionOrder::homophily_first);

struct HeaSelection {
    std::size_t trial_index = 0;
    std::vector<double> aggregated;
};

HeaSelection hea_select(std::span<const TrialResult> trials, std::size_t kappa,
                        SelectionOrder order = SelectionOrder::homophily_first);

enum class Baseline { average, min, max };

/// Per-node mean, min or max across trials. Throws InvalidArgument on an
/// empty list or vectors of different lengths.
std::vector<double> baseline_aggregate(std::span<const std::vector<double>> posteriors, Baseline mode);

}  // namespace sybilblind
