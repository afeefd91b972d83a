#include "sybilblind/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "sybilblind/error.hpp"
#include "sybilblind/random.hpp"

namespace sybilblind {
namespace {

// `count` distinct values from [0, population) in uniformly random order.
std::vector<NodeId> draw_distinct(std::size_t population, std::size_t count, Rng& rng) {
    std::vector<NodeId> out;
    out.reserve(count);
    if (count * 4 <= population) {
        std::unordered_set<NodeId> taken;
        taken.reserve(count * 2);
        while (out.size() < count) {
            auto v = static_cast<NodeId>(uniform_below(rng, population));
            if (taken.insert(v).second) out.push_back(v);
        }
        return out;
    }
    std::vector<NodeId> all(population);
    std::iota(all.begin(), all.end(), NodeId{0});
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(all[i], all[i + uniform_below(rng, population - i)]);
        out.push_back(all[i]);
    }
    return out;
}

double ratio_or_zero(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

TrainingSample sample_uniform(std::size_t num_nodes, std::size_t n, std::uint64_t seed) {
    if (2 * n > num_nodes) {
        throw DataError("sampling size n = " + std::to_string(n) + " needs 2n <= " + std::to_string(num_nodes) +
                        " nodes");
    }
    Rng rng(seed);
    auto drawn = draw_distinct(num_nodes, 2 * n, rng);
    TrainingSample s;
    s.benign.assign(drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(n));
    s.sybil.assign(drawn.begin() + static_cast<std::ptrdiff_t>(n), drawn.end());
    return s;
}

std::vector<double> compute_fbr(const DirectedEdgeList& follows) {
    DirectedEdgeList list = follows;
    list.normalize();
    std::vector<std::size_t> out_degree(list.num_nodes, 0);
    std::vector<std::size_t> followed_back(list.num_nodes, 0);
    for (const auto& e : list.edges) {
        ++out_degree[e.u];
        if (std::binary_search(list.edges.begin(), list.edges.end(), Edge{e.v, e.u})) ++followed_back[e.u];
    }
    std::vector<double> fbr(list.num_nodes, 1.0);
    for (std::size_t u = 0; u < list.num_nodes; ++u) {
        if (out_degree[u] > 0) fbr[u] = static_cast<double>(followed_back[u]) / static_cast<double>(out_degree[u]);
    }
    return fbr;
}

TrainingSample sample_feature_refined(std::span<const double> scores, std::size_t n, std::size_t pool,
                                      std::uint64_t seed) {
    if (n > pool) {
        throw InvalidArgument("sampling size n = " + std::to_string(n) + " exceeds pool size K = " +
                              std::to_string(pool));
    }
    if (2 * pool > scores.size()) {
        throw DataError("pool size K = " + std::to_string(pool) + " needs 2K <= " + std::to_string(scores.size()) +
                        " nodes");
    }
    std::vector<NodeId> order(scores.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return scores[a] < scores[b]; });

    Rng rng(seed);
    TrainingSample s;
    for (NodeId i : draw_distinct(pool, n, rng)) s.sybil.push_back(order[i]);
    const std::size_t top = scores.size() - pool;
    for (NodeId i : draw_distinct(pool, n, rng)) s.benign.push_back(order[top + i]);
    return s;
}

const char* to_string(Polarity p) {
    switch (p) {
        case Polarity::positive: return "positive";
        case Polarity::negative: return "negative";
        case Polarity::unpolarized: return "unpolarized";
        case Polarity::mixed: return "mixed";
    }
    return "unknown";
}

NoiseReport noise_report(const TrainingSample& sample, const GroundTruth& truth) {
    NoiseReport r;
    for (NodeId u : sample.benign) (truth.is_sybil(u) ? r.n_bs : r.n_bb)++;
    for (NodeId u : sample.sybil) (truth.is_sybil(u) ? r.n_ss : r.n_sb)++;
    r.alpha_b = ratio_or_zero(r.n_sb, r.n_sb + r.n_bb);
    r.alpha_s = ratio_or_zero(r.n_bs, r.n_bs + r.n_ss);
    if (r.n_bb > r.n_sb && r.n_bs < r.n_ss) {
        r.polarity = Polarity::positive;
    } else if (r.n_bb < r.n_sb && r.n_bs > r.n_ss) {
        r.polarity = Polarity::negative;
    } else if (r.n_bb == r.n_sb && r.n_bs == r.n_ss) {
        r.polarity = Polarity::unpolarized;
    } else {
        r.polarity = Polarity::mixed;
    }
    return r;
}

std::string sample_digest(const TrainingSample& sample) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    for (NodeId u : sample.benign) mix(u);
    mix(~0ULL);
    for (NodeId u : sample.sybil) mix(u);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    return out;
}

}  // namespace sybilblind
