#include "sybilblind/graph.hpp"

#include <algorithm>
#include <string>

#include "sybilblind/error.hpp"

namespace sybilblind {

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges) {
    std::vector<std::uint64_t> degree(num_nodes + 1, 0);
    for (const auto& e : edges) {
        if (e.u >= num_nodes || e.v >= num_nodes) {
            throw DataError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") references a node outside [0, " + std::to_string(num_nodes) + ")");
        }
        if (e.u == e.v) continue;
        ++degree[e.u + 1];
        ++degree[e.v + 1];
    }
    for (std::size_t i = 1; i <= num_nodes; ++i) degree[i] += degree[i - 1];

    std::vector<NodeId> flat(degree[num_nodes]);
    std::vector<std::uint64_t> cursor(degree.begin(), degree.end() - 1);
    for (const auto& e : edges) {
        if (e.u == e.v) continue;
        flat[cursor[e.u]++] = e.v;
        flat[cursor[e.v]++] = e.u;
    }

    // Sort each list and squeeze out duplicates, compacting in place.
    Graph g;
    g.offsets_.assign(num_nodes + 1, 0);
    std::uint64_t out = 0;
    for (std::size_t u = 0; u < num_nodes; ++u) {
        auto first = flat.begin() + static_cast<std::ptrdiff_t>(degree[u]);
        auto last = flat.begin() + static_cast<std::ptrdiff_t>(degree[u + 1]);
        std::sort(first, last);
        last = std::unique(first, last);
        for (auto it = first; it != last; ++it) flat[out++] = *it;
        g.offsets_[u + 1] = out;
    }
    flat.resize(out);
    flat.shrink_to_fit();
    g.neighbors_ = std::move(flat);
    return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    if (u >= num_nodes() || v >= num_nodes()) return false;
    auto nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (NodeId u = 0; u < num_nodes(); ++u) {
        for (NodeId v : neighbors(u)) {
            if (u < v) out.push_back({u, v});
        }
    }
    return out;
}

void DirectedEdgeList::normalize() {
    for (const auto& e : edges) {
        if (e.u >= num_nodes || e.v >= num_nodes) {
            throw DataError("directed edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") references a node outside [0, " + std::to_string(num_nodes) + ")");
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

Graph from_directed(const DirectedEdgeList& list, Reciprocity mode) {
    DirectedEdgeList sorted = list;
    sorted.normalize();
    if (mode == Reciprocity::either) {
        return Graph::from_edges(sorted.num_nodes, sorted.edges);
    }
    std::vector<Edge> kept;
    for (const auto& e : sorted.edges) {
        if (e.u < e.v && std::binary_search(sorted.edges.begin(), sorted.edges.end(), Edge{e.v, e.u})) {
            kept.push_back(e);
        }
    }
    return Graph::from_edges(sorted.num_nodes, kept);
}

DegreeStats degree_stats(const Graph& g) {
    if (g.num_nodes() == 0) throw DataError("degree statistics of an empty graph");
    DegreeStats stats;
    stats.min_degree = g.degree(0);
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        stats.min_degree = std::min(stats.min_degree, g.degree(u));
        stats.max_degree = std::max(stats.max_degree, g.degree(u));
    }
    stats.avg_degree = 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_nodes());
    return stats;
}

std::size_t GroundTruth::num_sybils() const {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), Label::sybil));
}

double GroundTruth::sybil_fraction() const {
    if (labels_.empty()) return 0.0;
    return static_cast<double>(num_sybils()) / static_cast<double>(labels_.size());
}

}  // namespace sybilblind
