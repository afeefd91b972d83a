#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sybilblind/graph.hpp"

namespace sybilblind {

/// Maps original (file) node ids to the dense range [0, size()).
class IdMap {
public:
    IdMap() = default;

    /// Dense ids are assigned in ascending order of the original ids.
    static IdMap from_ids(std::vector<std::int64_t> original_ids);
    static IdMap identity(std::size_t n);

    std::size_t size() const { return original_.size(); }
    std::int64_t original(NodeId dense) const { return original_[dense]; }
    std::optional<NodeId> find(std::int64_t original) const;
    std::span<const std::int64_t> originals() const { return original_; }

private:
    std::vector<std::int64_t> original_;
    std::unordered_map<std::int64_t, NodeId> dense_;
};

struct LoadedGraph {
    Graph graph;
    IdMap ids;
};

struct LoadedDirectedGraph {
    DirectedEdgeList list;
    IdMap ids;
};

/// Reads a whitespace-separated `u v` edge file; `#` starts a comment line.
/// Throws DataError on unreadable files and on malformed lines (the message
/// carries the path and line number).
LoadedGraph load_undirected(const std::filesystem::path& path);
LoadedDirectedGraph load_directed(const std::filesystem::path& path);

/// Writes `u v` lines (u < v in dense order), translated through ids.
void write_edge_list(const Graph& g, const IdMap& ids, const std::filesystem::path& path);

/// `node_id,label` with label 0 = benign, 1 = sybil. Every node of ids must
/// be labeled; rows for unknown ids are rejected unless ignore_unknown.
GroundTruth load_labels(const std::filesystem::path& path, const IdMap& ids, bool ignore_unknown = false);
void write_labels(const GroundTruth& truth, const IdMap& ids, const std::filesystem::path& path,
                  bool header = false);

/// `node_id,value` rows. Nodes of ids without a row receive missing_value;
/// with missing_value unset, a missing row is a DataError.
std::vector<double> load_node_values(const std::filesystem::path& path, const IdMap& ids,
                                     std::optional<double> missing_value = std::nullopt);

/// Ids of the first column of a `node_id,value` file.
IdMap ids_from_csv(const std::filesystem::path& path);

/// `node_id,value` rows in dense id order, values printed with round-trip
/// precision.
void write_node_values(std::span<const double> values, const IdMap& ids,
                       const std::filesystem::path& path, bool header = false,
                       std::string_view value_column = "value");

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

}  // namespace sybilblind
