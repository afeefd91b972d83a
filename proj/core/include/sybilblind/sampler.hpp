#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sybilblind/graph.hpp"

namespace sybilblind {

/// Two disjoint node sets of equal size n: `benign` receives the benign label
/// and `sybil` the Sybil label, regardless of what the nodes really are.
struct TrainingSample {
    std::vector<NodeId> benign;
    std::vector<NodeId> sybil;

    std::size_t size() const { return benign.size(); }
    TrainingSample swapped() const { return {sybil, benign}; }

    friend bool operator==(const TrainingSample&, const TrainingSample&) = default;
};

/// 2n distinct nodes drawn uniformly without replacement; the first n form
/// the benign set, the next n the Sybil set. Throws DataError if 2n > num_nodes.
TrainingSample sample_uniform(std::size_t num_nodes, std::size_t n, std::uint64_t seed);

/// Follow-back rate per node: |out(u) ∩ in(u)| / |out(u)|, 1 for nodes that
/// follow nobody.
std::vector<double> compute_fbr(const DirectedEdgeList& follows);

/// Ranks nodes ascending by score (ties by node id). The Sybil set is drawn
/// without replacement from the first `pool` nodes, the benign set from the
/// last `pool`. Requires n <= pool <= |scores| / 2.
TrainingSample sample_feature_refined(std::span<const double> scores, std::size_t n, std::size_t pool,
                                      std::uint64_t seed);

enum class Polarity { positive, negative, unpolarized, mixed };

const char* to_string(Polarity p);

/// Composition of a sample against the ground truth.
struct NoiseReport {
    std::size_t n_bb = 0;  // benign nodes in the benign set
    std::size_t n_bs = 0;  // Sybils in the benign set
    std::size_t n_sb = 0;  // benign nodes in the Sybil set
    std::size_t n_ss = 0;  // Sybils in the Sybil set
    double alpha_b = 0.0;  // n_sb / (n_sb + n_bb), 0 when undefined
    double alpha_s = 0.0;  // n_bs / (n_bs + n_ss), 0 when undefined
    Polarity polarity = Polarity::unpolarized;
};

NoiseReport noise_report(const TrainingSample& sample, const GroundTruth& truth);

/// Short hex digest identifying a sample (FNV-1a over both sets).
std::string sample_digest(const TrainingSample& sample);

}  // namespace sybilblind
