#include "sybilblind/detector.hpp"

#include <algorithm>
#include <barrier>
#include <cmath>
#include <string>
#include <thread>

#include "sybilblind/error.hpp"

namespace sybilblind {
namespace {

// One Jacobi sweep over [begin, end); returns the largest change.
double sweep(const Graph& g, std::span<const double> priors, const double* prev, double* next, double coupling,
             std::size_t begin, std::size_t end) {
    double largest = 0.0;
    for (std::size_t u = begin; u < end; ++u) {
        double acc = 0.0;
        for (NodeId v : g.neighbors(static_cast<NodeId>(u))) acc += prev[v] - 0.5;
        double p = std::clamp(priors[u] + coupling * acc, 0.0, 1.0);
        largest = std::max(largest, std::abs(p - prev[u]));
        next[u] = p;
    }
    return largest;
}

}  // namespace

void DetectorParams::validate() const {
    if (!(theta > 0.0 && theta < 0.5)) throw InvalidArgument("theta must lie in (0, 0.5)");
    if (w && !(*w > 0.5 && *w <= 1.0)) throw InvalidArgument("w must lie in (0.5, 1]");
    if (!(gain > 0.0) || !std::isfinite(gain)) throw InvalidArgument("calibration gain must be positive");
    if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be >= 0");
}

std::vector<double> assign_priors(std::size_t num_nodes, const TrainingSample& sample, double theta) {
    std::vector<double> q(num_nodes, 0.5);
    auto set = [&](NodeId u, double value) {
        if (u >= num_nodes) {
            throw DataError("sampled node " + std::to_string(u) + " is outside the graph of " +
                            std::to_string(num_nodes) + " nodes");
        }
        q[u] = value;
    };
    for (NodeId u : sample.benign) set(u, 0.5 - theta);
    for (NodeId u : sample.sybil) set(u, 0.5 + theta);
    return q;
}

double spectral_radius(const Graph& g, std::size_t max_iterations, double tolerance) {
    const std::size_t n = g.num_nodes();
    if (g.num_edges() == 0) return 0.0;
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n);
    double estimate = 0.0;
    for (std::size_t it = 0; it < max_iterations; ++it) {
        // y = (A + I) x; the shift keeps bipartite graphs from oscillating.
        double dot = 0.0;
        double norm = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            double acc = x[u];
            for (NodeId v : g.neighbors(static_cast<NodeId>(u))) acc += x[v];
            y[u] = acc;
            dot += acc * x[u];
            norm += acc * acc;
        }
        const double next = dot - 1.0;  // Rayleigh quotient of A at x
        norm = std::sqrt(norm);
        for (std::size_t u = 0; u < n; ++u) x[u] = y[u] / norm;
        if (it > 0 && std::abs(next - estimate) <= tolerance * std::max(1.0, next)) return next;
        estimate = next;
    }
    return estimate;
}

double calibrated_weight(const Graph& g, double gain) {
    const double lambda = spectral_radius(g);
    if (lambda <= 0.0) return 1.0;
    return std::min(1.0, 0.5 + gain / (2.0 * lambda));
}

double resolve_weight(const Graph& g, const DetectorParams& params) {
    return params.w ? *params.w : calibrated_weight(g, params.gain);
}

Propagation propagate(const Graph& g, std::span<const double> priors, const DetectorParams& params,
                      std::size_t threads) {
    params.validate();
    const std::size_t n = g.num_nodes();
    if (priors.size() != n) {
        throw DataError("prior vector has " + std::to_string(priors.size()) + " entries for " + std::to_string(n) +
                        " nodes");
    }
    const double coupling = 2.0 * (resolve_weight(g, params) - 0.5);

    std::vector<double> prev(priors.begin(), priors.end());
    std::vector<double> next(n);
    Propagation out;
    if (params.max_iterations == 0 || n == 0) {
        out.posteriors = std::move(prev);
        return out;
    }
    auto converged = [&](double largest) { return !params.fixed_iterations && largest < params.epsilon; };

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, n);
    if (workers == 1) {
        while (out.iterations < params.max_iterations) {
            double largest = sweep(g, priors, prev.data(), next.data(), coupling, 0, n);
            prev.swap(next);
            ++out.iterations;
            if (converged(largest)) break;
        }
        out.posteriors = std::move(prev);
        return out;
    }

    std::vector<double> chunk_largest(workers, 0.0);
    double* cur = prev.data();
    double* nxt = next.data();
    bool stop = false;
    auto end_of_sweep = [&]() noexcept {
        std::swap(cur, nxt);
        ++out.iterations;
        double largest = *std::max_element(chunk_largest.begin(), chunk_largest.end());
        stop = out.iterations >= params.max_iterations || converged(largest);
    };
    std::barrier sync(static_cast<std::ptrdiff_t>(workers), end_of_sweep);
    auto work = [&](std::size_t w) {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        for (;;) {
            chunk_largest[w] = sweep(g, priors, cur, nxt, coupling, begin, end);
            sync.arrive_and_wait();
            if (stop) return;
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
        work(0);
    }
    out.posteriors.assign(cur, cur + n);
    return out;
}

SybilScarDetector::SybilScarDetector(DetectorParams params) : params_(std::move(params)) { params_.validate(); }

SybilScarDetector SybilScarDetector::for_graph(const Graph& g, DetectorParams params) {
    params.validate();
    params.w = resolve_weight(g, params);
    return SybilScarDetector(std::move(params));
}

Propagation SybilScarDetector::detect(const Graph& g, const TrainingSample& sample, std::size_t threads) const {
    auto priors = assign_priors(g.num_nodes(), sample, params_.theta);
    return propagate(g, priors, params_, threads);
}

}  // namespace sybilblind
