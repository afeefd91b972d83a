#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <variant>

#include "sybilblind/graph.hpp"

namespace sybilblind {

/// Preferential-attachment graph. Starts from a complete graph on m+1 nodes;
/// every later node links to m distinct existing nodes picked with
/// probability proportional to their current degree.
/// Requires num_nodes > m >= 1 (InvalidArgument otherwise).
Graph generate_pa(std::size_t num_nodes, std::size_t m, std::uint64_t seed);

/// A combined benign + Sybil graph. Benign nodes occupy [0, num_benign),
/// Sybils [num_benign, num_benign + num_sybil).
struct Scenario {
    Graph graph;
    GroundTruth truth;
    std::size_t num_benign = 0;
    std::size_t num_sybil = 0;
    std::size_t num_attack_edges = 0;
    std::size_t sybil_attachment = 0;  // PA m of the Sybil region; 0 if not generated
};

/// Disjoint union of the two regions plus exactly num_attack_edges distinct
/// cross-region edges drawn uniformly. Throws InvalidArgument when the count
/// exceeds |benign| * |sybil|.
Scenario inject_attack_edges(const Graph& benign, const Graph& sybil, std::size_t num_attack_edges,
                             std::uint64_t seed);

/// What the Sybil fraction r is a fraction of.
enum class SybilCount {
    of_total,   // |sybil| = r / (1 - r) * |benign|, so r = |sybil| / |V|
    of_benign,  // |sybil| = r * |benign|
};

struct PaSource {
    std::size_t num_nodes = 0;
    std::size_t m = 0;
};

struct ScenarioSpec {
    std::variant<PaSource, std::filesystem::path> benign_source = PaSource{10'000, 4};
    double sybil_fraction = 0.2;
    SybilCount convention = SybilCount::of_total;
    std::size_t sybil_attachment = 0;  // 0 = match the benign average degree
    std::size_t num_attack_edges = 500;
    std::uint64_t seed = 0;
};

std::size_t sybil_region_size(std::size_t num_benign, double sybil_fraction, SybilCount convention);

/// PA attachment whose average degree (about 2m) matches the graph's.
std::size_t matched_attachment(const Graph& benign);

Scenario build_scenario(const ScenarioSpec& spec);

}  // namespace sybilblind
