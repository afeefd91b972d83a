#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sybilblind {

using NodeId = std::uint32_t;

struct Edge {
    NodeId u;
    NodeId v;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable undirected simple graph in compressed adjacency form.
///
/// Neighbor lists are sorted, symmetric, and free of self-loops and
/// duplicates. The graph is never mutated after construction, so one instance
/// can be shared read-only by any number of threads.
class Graph {
public:
    Graph() = default;

    /// Builds a graph over nodes [0, num_nodes). Edges are symmetrized;
    /// self-loops and repeated pairs are dropped. Throws DataError when an
    /// endpoint is out of range.
    static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges);

    std::size_t num_nodes() const { return offsets_.size() - 1; }
    std::size_t num_edges() const { return neighbors_.size() / 2; }

    std::span<const NodeId> neighbors(NodeId u) const {
        return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
    }
    std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

    bool has_edge(NodeId u, NodeId v) const;

    /// Each undirected edge once, as (u, v) with u < v, in ascending order.
    std::vector<Edge> edges() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::uint64_t> offsets_{0};
    std::vector<NodeId> neighbors_;
};

struct DirectedEdgeList {
    std::size_t num_nodes = 0;
    std::vector<Edge> edges;  // (source, target)

    /// Sorts edges and removes duplicates. Throws DataError on ids >= num_nodes.
    void normalize();
};

/// How a follow graph becomes an undirected graph.
enum class Reciprocity {
    mutual,  // u-v iff both u->v and v->u
    either,  // u-v iff u->v or v->u
};

Graph from_directed(const DirectedEdgeList& list, Reciprocity mode);

struct DegreeStats {
    double avg_degree = 0.0;
    std::size_t min_degree = 0;
    std::size_t max_degree = 0;
};

/// Throws DataError on a graph without nodes.
DegreeStats degree_stats(const Graph& g);

enum class Label : std::uint8_t { benign = 0, sybil = 1 };

/// Per-node benign/Sybil labels. Used by scenario generation and evaluation
/// only; detection never reads it.
class GroundTruth {
public:
    GroundTruth() = default;
    explicit GroundTruth(std::vector<Label> labels) : labels_(std::move(labels)) {}

    std::size_t size() const { return labels_.size(); }
    Label operator[](std::size_t u) const { return labels_[u]; }
    bool is_sybil(std::size_t u) const { return labels_[u] == Label::sybil; }
    std::span<const Label> labels() const { return labels_; }

    std::size_t num_sybils() const;
    std::size_t num_benign() const { return size() - num_sybils(); }
    /// Fraction r of Sybils; 0 for an empty truth.
    double sybil_fraction() const;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;

private:
    std::vector<Label> labels_;
};

}  // namespace sybilblind
