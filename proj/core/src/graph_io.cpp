#include "sybilblind/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <string_view>

#include "sybilblind/error.hpp"

namespace sybilblind {
namespace {

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
    token = trim(token);
    if (token.empty()) return false;
    if (token.front() == '+') token.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size();
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line_no, std::string_view why) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + std::string(why));
}

// Calls fn(line_no, content) for every non-blank, non-comment line.
void for_each_data_line(const std::filesystem::path& path,
                        const std::function<void(std::size_t, std::string_view)>& fn) {
    auto in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto content = trim(line);
        if (content.empty() || content.front() == '#') continue;
        fn(line_no, content);
    }
    if (in.bad()) throw DataError("read error on " + path.string());
}

std::vector<std::pair<std::int64_t, std::int64_t>> read_pairs(const std::filesystem::path& path) {
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for_each_data_line(path, [&](std::size_t line_no, std::string_view content) {
        auto split = content.find_first_of(" \t");
        if (split == std::string_view::npos) malformed(path, line_no, "expected two node ids");
        auto rest = trim(content.substr(split));
        if (rest.find_first_of(" \t") != std::string_view::npos) {
            malformed(path, line_no, "expected exactly two node ids");
        }
        std::int64_t u = 0;
        std::int64_t v = 0;
        if (!parse_number(content.substr(0, split), u) || !parse_number(rest, v)) {
            malformed(path, line_no, "node ids must be integers");
        }
        pairs.emplace_back(u, v);
    });
    return pairs;
}

IdMap compact(const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs) {
    std::vector<std::int64_t> ids;
    ids.reserve(pairs.size() * 2);
    for (auto [u, v] : pairs) {
        ids.push_back(u);
        ids.push_back(v);
    }
    return IdMap::from_ids(std::move(ids));
}

std::vector<Edge> to_dense(const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs, const IdMap& ids) {
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [u, v] : pairs) edges.push_back({*ids.find(u), *ids.find(v)});
    return edges;
}

// Reads `id,value` rows; a leading non-numeric row is taken as a header.
template <typename Fn>
void read_csv_rows(const std::filesystem::path& path, Fn&& fn) {
    bool first = true;
    for_each_data_line(path, [&](std::size_t line_no, std::string_view content) {
        auto comma = content.find(',');
        if (comma == std::string_view::npos) malformed(path, line_no, "expected `node_id,value`");
        auto id_field = content.substr(0, comma);
        auto value_field = content.substr(comma + 1);
        if (value_field.find(',') != std::string_view::npos) {
            malformed(path, line_no, "expected exactly two columns");
        }
        std::int64_t id = 0;
        if (!parse_number(id_field, id)) {
            if (first) {
                first = false;
                return;
            }
            malformed(path, line_no, "node id must be an integer");
        }
        first = false;
        fn(line_no, id, value_field);
    });
}

}  // namespace

IdMap IdMap::from_ids(std::vector<std::int64_t> original_ids) {
    std::sort(original_ids.begin(), original_ids.end());
    original_ids.erase(std::unique(original_ids.begin(), original_ids.end()), original_ids.end());
    IdMap map;
    map.original_ = std::move(original_ids);
    map.dense_.reserve(map.original_.size());
    for (std::size_t i = 0; i < map.original_.size(); ++i) {
        map.dense_.emplace(map.original_[i], static_cast<NodeId>(i));
    }
    return map;
}

IdMap IdMap::identity(std::size_t n) {
    std::vector<std::int64_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::int64_t>(i);
    return from_ids(std::move(ids));
}

std::optional<NodeId> IdMap::find(std::int64_t original) const {
    auto it = dense_.find(original);
    if (it == dense_.end()) return std::nullopt;
    return it->second;
}

LoadedGraph load_undirected(const std::filesystem::path& path) {
    auto pairs = read_pairs(path);
    LoadedGraph out;
    out.ids = compact(pairs);
    out.graph = Graph::from_edges(out.ids.size(), to_dense(pairs, out.ids));
    return out;
}

LoadedDirectedGraph load_directed(const std::filesystem::path& path) {
    auto pairs = read_pairs(path);
    LoadedDirectedGraph out;
    out.ids = compact(pairs);
    out.list.num_nodes = out.ids.size();
    out.list.edges = to_dense(pairs, out.ids);
    out.list.normalize();
    return out;
}

void write_edge_list(const Graph& g, const IdMap& ids, const std::filesystem::path& path) {
    auto out = open_output(path);
    for (const auto& e : g.edges()) out << ids.original(e.u) << ' ' << ids.original(e.v) << '\n';
    if (!out) throw DataError("write error on " + path.string());
}

GroundTruth load_labels(const std::filesystem::path& path, const IdMap& ids, bool ignore_unknown) {
    std::vector<int> raw(ids.size(), -1);
    read_csv_rows(path, [&](std::size_t line_no, std::int64_t id, std::string_view value) {
        int label = 0;
        if (!parse_number(value, label) || (label != 0 && label != 1)) {
            malformed(path, line_no, "label must be 0 (benign) or 1 (sybil)");
        }
        auto dense = ids.find(id);
        if (!dense) {
            if (ignore_unknown) return;
            malformed(path, line_no, "node " + std::to_string(id) + " is not in the graph");
        }
        raw[*dense] = label;
    });
    std::vector<Label> labels(ids.size());
    for (std::size_t u = 0; u < ids.size(); ++u) {
        if (raw[u] < 0) {
            throw DataError(path.string() + ": no label for node " + std::to_string(ids.original(static_cast<NodeId>(u))));
        }
        labels[u] = raw[u] == 1 ? Label::sybil : Label::benign;
    }
    return GroundTruth(std::move(labels));
}

void write_labels(const GroundTruth& truth, const IdMap& ids, const std::filesystem::path& path, bool header) {
    auto out = open_output(path);
    if (header) out << "node_id,label\n";
    for (std::size_t u = 0; u < truth.size(); ++u) {
        out << ids.original(static_cast<NodeId>(u)) << ',' << (truth.is_sybil(u) ? 1 : 0) << '\n';
    }
    if (!out) throw DataError("write error on " + path.string());
}

IdMap ids_from_csv(const std::filesystem::path& path) {
    std::vector<std::int64_t> ids;
    read_csv_rows(path, [&](std::size_t, std::int64_t id, std::string_view) { ids.push_back(id); });
    return IdMap::from_ids(std::move(ids));
}

std::vector<double> load_node_values(const std::filesystem::path& path, const IdMap& ids,
                                     std::optional<double> missing_value) {
    std::vector<double> values(ids.size(), 0.0);
    std::vector<bool> seen(ids.size(), false);
    read_csv_rows(path, [&](std::size_t line_no, std::int64_t id, std::string_view field) {
        double v = 0.0;
        if (!parse_number(field, v)) malformed(path, line_no, "value must be a number");
        auto dense = ids.find(id);
        if (!dense) return;  // rows for nodes outside the graph are ignored
        values[*dense] = v;
        seen[*dense] = true;
    });
    for (std::size_t u = 0; u < ids.size(); ++u) {
        if (seen[u]) continue;
        if (!missing_value) {
            throw DataError(path.string() + ": no value for node " + std::to_string(ids.original(static_cast<NodeId>(u))));
        }
        values[u] = *missing_value;
    }
    return values;
}

void write_node_values(std::span<const double> values, const IdMap& ids, const std::filesystem::path& path,
                       bool header, std::string_view value_column) {
    auto out = open_output(path);
    if (header) out << "node_id," << value_column << '\n';
    for (std::size_t u = 0; u < values.size(); ++u) {
        out << ids.original(static_cast<NodeId>(u)) << ',' << format_double(values[u]) << '\n';
    }
    if (!out) throw DataError("write error on " + path.string());
}

std::string format_double(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

}  // namespace sybilblind
