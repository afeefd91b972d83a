#include "sybilblind/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "sybilblind/error.hpp"
#include "sybilblind/graph_io.hpp"
#include "sybilblind/random.hpp"

namespace sybilblind {

Graph generate_pa(std::size_t num_nodes, std::size_t m, std::uint64_t seed) {
    if (m < 1) throw InvalidArgument("PA attachment m must be >= 1");
    if (num_nodes <= m) {
        throw InvalidArgument("PA graph needs more than m = " + std::to_string(m) + " nodes, got " +
                              std::to_string(num_nodes));
    }
    Rng rng(seed);
    std::vector<Edge> edges;
    edges.reserve(m * (m + 1) / 2 + (num_nodes - m - 1) * m);
    // One entry per edge endpoint; a uniform pick is a degree-proportional pick.
    std::vector<NodeId> endpoints;
    endpoints.reserve(2 * edges.capacity());

    for (NodeId u = 0; u <= m; ++u) {
        for (NodeId v = u + 1; v <= m; ++v) {
            edges.push_back({u, v});
            endpoints.push_back(u);
            endpoints.push_back(v);
        }
    }

    std::vector<NodeId> targets;
    targets.reserve(m);
    for (std::size_t u = m + 1; u < num_nodes; ++u) {
        targets.clear();
        while (targets.size() < m) {
            NodeId t = endpoints[uniform_below(rng, endpoints.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (NodeId t : targets) {
            edges.push_back({static_cast<NodeId>(u), t});
            endpoints.push_back(static_cast<NodeId>(u));
            endpoints.push_back(t);
        }
    }
    return Graph::from_edges(num_nodes, edges);
}

Scenario inject_attack_edges(const Graph& benign, const Graph& sybil, std::size_t num_attack_edges,
                             std::uint64_t seed) {
    const std::size_t nb = benign.num_nodes();
    const std::size_t ns = sybil.num_nodes();
    const std::size_t capacity = nb * ns;
    if (num_attack_edges > capacity) {
        throw InvalidArgument(std::to_string(num_attack_edges) + " attack edges exceed the " +
                              std::to_string(capacity) + " possible benign-Sybil pairs");
    }

    std::vector<Edge> edges = benign.edges();
    edges.reserve(edges.size() + sybil.num_edges() + num_attack_edges);
    const auto offset = static_cast<NodeId>(nb);
    for (const auto& e : sybil.edges()) edges.push_back({e.u + offset, e.v + offset});

    Rng rng(seed);
    if (2 * num_attack_edges <= capacity) {
        std::unordered_set<std::uint64_t> chosen;
        chosen.reserve(num_attack_edges * 2);
        while (chosen.size() < num_attack_edges) {
            std::uint64_t pair = uniform_below(rng, capacity);
            if (chosen.insert(pair).second) {
                edges.push_back({static_cast<NodeId>(pair / ns), static_cast<NodeId>(offset + pair % ns)});
            }
        }
    } else {
        // Dense request: partial shuffle over all pairs instead of rejection.
        std::vector<std::uint64_t> pairs(capacity);
        for (std::uint64_t i = 0; i < capacity; ++i) pairs[i] = i;
        for (std::size_t i = 0; i < num_attack_edges; ++i) {
            std::swap(pairs[i], pairs[i + uniform_below(rng, capacity - i)]);
            edges.push_back({static_cast<NodeId>(pairs[i] / ns), static_cast<NodeId>(offset + pairs[i] % ns)});
        }
    }

    std::vector<Label> labels(nb + ns, Label::benign);
    std::fill(labels.begin() + static_cast<std::ptrdiff_t>(nb), labels.end(), Label::sybil);

    Scenario out;
    out.graph = Graph::from_edges(nb + ns, edges);
    out.truth = GroundTruth(std::move(labels));
    out.num_benign = nb;
    out.num_sybil = ns;
    out.num_attack_edges = num_attack_edges;
    return out;
}

std::size_t sybil_region_size(std::size_t num_benign, double sybil_fraction, SybilCount convention) {
    if (!(sybil_fraction > 0.0 && sybil_fraction < 1.0)) {
        throw InvalidArgument("Sybil fraction must lie in (0, 1)");
    }
    const double nb = static_cast<double>(num_benign);
    const double ns = convention == SybilCount::of_total ? sybil_fraction / (1.0 - sybil_fraction) * nb
                                                         : sybil_fraction * nb;
    return static_cast<std::size_t>(std::llround(ns));
}

std::size_t matched_attachment(const Graph& benign) {
    const double avg = degree_stats(benign).avg_degree;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(avg / 2.0)));
}

Scenario build_scenario(const ScenarioSpec& spec) {
    Graph benign;
    if (const auto* pa = std::get_if<PaSource>(&spec.benign_source)) {
        benign = generate_pa(pa->num_nodes, pa->m, derive_seed(spec.seed, "benign-region"));
    } else {
        benign = load_undirected(std::get<std::filesystem::path>(spec.benign_source)).graph;
    }
    const std::size_t ns = sybil_region_size(benign.num_nodes(), spec.sybil_fraction, spec.convention);
    const std::size_t m = spec.sybil_attachment != 0 ? spec.sybil_attachment : matched_attachment(benign);
    Graph sybil = generate_pa(ns, m, derive_seed(spec.seed, "sybil-region"));
    Scenario out = inject_attack_edges(benign, sybil, spec.num_attack_edges, derive_seed(spec.seed, "attack-edges"));
    out.sybil_attachment = m;
    return out;
}

}  // namespace sybilblind
