#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sybilblind/graph.hpp"
#include "sybilblind/sampler.hpp"

namespace sybilblind {

/// Parameters of the local-rule propagation
///
///     p_u(t) = q_u + 2 (w - 0.5) * sum_{v in N(u)} (p_v(t-1) - 0.5),
///
/// clamped to [0, 1] after every sweep.
struct DetectorParams {
    /// Prior offset for labeled nodes: 0.5 + theta (Sybil set), 0.5 - theta
    /// (benign set). Must lie in (0, 0.5).
    double theta = 0.4;
    /// Edge homophily strength in (0.5, 1]. When unset it is calibrated from
    /// the graph so that the linear gain 2 (w - 0.5) * lambda_max equals `gain`.
    std::optional<double> w;
    /// Target gain for calibration, in (0, 2].
    double gain = 0.5;
    std::size_t max_iterations = 30;
    /// Halt once the largest per-node change of a sweep drops below epsilon.
    double epsilon = 1e-6;
    /// Run exactly max_iterations sweeps, ignoring epsilon.
    bool fixed_iterations = false;

    /// Throws InvalidArgument on out-of-range values.
    void validate() const;
};

/// q_u = 0.5 + theta for the Sybil set, 0.5 - theta for the benign set,
/// 0.5 for everyone else. Throws DataError on ids >= num_nodes.
std::vector<double> assign_priors(std::size_t num_nodes, const TrainingSample& sample, double theta);

/// Largest adjacency eigenvalue, by power iteration on A + I from the
/// all-ones vector. Deterministic; 0 for edgeless graphs.
double spectral_radius(const Graph& g, std::size_t max_iterations = 1000, double tolerance = 1e-10);

/// w giving linear propagation gain `gain` on g, capped at 1.
double calibrated_weight(const Graph& g, double gain);

/// params.w if set, otherwise calibrated_weight(g, params.gain).
double resolve_weight(const Graph& g, const DetectorParams& params);

struct Propagation {
    std::vector<double> posteriors;
    std::size_t iterations = 0;
};

/// Synchronous (Jacobi) propagation starting from p(0) = priors. Every sweep
/// reads only the previous vector, so the result does not depend on
/// `threads`. Sweeps are split across `threads` workers with a barrier
/// between sweeps.
Propagation propagate(const Graph& g, std::span<const double> priors, const DetectorParams& params,
                      std::size_t threads = 1);

/// A structure-based detector turning a (noisy) training sample into
/// per-node Sybil probabilities.
class Detector {
public:
    virtual ~Detector() = default;
    virtual Propagation detect(const Graph& g, const TrainingSample& sample, std::size_t threads) const = 0;
};

/// Prior assignment followed by local-rule propagation.
class SybilScarDetector final : public Detector {
public:
    explicit SybilScarDetector(DetectorParams params);

    /// Fixes w for g up front so repeated detect() calls skip calibration.
    static SybilScarDetector for_graph(const Graph& g, DetectorParams params);

    const DetectorParams& params() const { return params_; }
    Propagation detect(const Graph& g, const TrainingSample& sample, std::size_t threads) const override;

private:
    DetectorParams params_;
};

}  // namespace sybilblind
