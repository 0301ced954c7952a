#pragma once

#include <oga/error.hpp>

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace oga {

/// Attribute values keep the lexical form of the format they came from.
using AttrMap = std::map<std::string, std::string>;

struct NodeRecord {
    std::string id;
    std::optional<std::string> label;
    AttrMap attrs;

    bool operator==(const NodeRecord&) const = default;
};

struct EdgeRecord {
    std::string source;
    std::string target;
    std::optional<std::string> label;
    /// Lexical weight; see weight_value() for the numeric view.
    std::optional<std::string> weight;
    AttrMap attrs;

    bool operator==(const EdgeRecord&) const = default;

    std::optional<double> weight_value() const;
};

/// Parses a decimal real in the usual lexical forms ("1", "-2.5e3", ".5").
inline std::optional<double> parse_real(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

inline std::optional<double> EdgeRecord::weight_value() const {
    if (!weight) return std::nullopt;
    return parse_real(*weight);
}

/// Canonical labeled multigraph. Immutable once built; every parser produces
/// one and every algorithm consumes one.
class Graph {
public:
    struct Arc {
        std::size_t source;
        std::size_t target;
    };

    Graph() = default;

    bool directed() const noexcept { return directed_; }
    const std::vector<NodeRecord>& nodes() const noexcept { return nodes_; }
    const std::vector<EdgeRecord>& edges() const noexcept { return edges_; }
    const AttrMap& graph_attrs() const noexcept { return graph_attrs_; }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    /// Endpoints of every edge as node indices, parallel to edges().
    const std::vector<Arc>& arcs() const noexcept { return arcs_; }

    std::optional<std::size_t> index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Exact equality: same directedness, node list, edge list (in order) and graph attributes.
    bool operator==(const Graph& other) const {
        return directed_ == other.directed_ && nodes_ == other.nodes_ && edges_ == other.edges_ &&
               graph_attrs_ == other.graph_attrs_;
    }

    friend Graph build_graph(bool directed, std::vector<NodeRecord> nodes,
                             std::vector<EdgeRecord> edges, AttrMap graph_attrs);

private:
    bool directed_ = false;
    std::vector<NodeRecord> nodes_;
    std::vector<EdgeRecord> edges_;
    AttrMap graph_attrs_;
    std::vector<Arc> arcs_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Validates and assembles a Graph, keeping node and edge order as given.
/// Throws DuplicateNodeId, DanglingEdgeEndpoint, or InvalidGraph (empty id).
inline Graph build_graph(bool directed, std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges,
                         AttrMap graph_attrs = {}) {
    Graph g;
    g.directed_ = directed;
    g.index_.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id.empty()) throw InvalidGraph("node id must be non-empty");
        if (!g.index_.emplace(nodes[i].id, i).second) throw DuplicateNodeId(nodes[i].id);
    }
    g.arcs_.reserve(edges.size());
    for (const auto& e : edges) {
        auto s = g.index_.find(e.source);
        if (s == g.index_.end()) throw DanglingEdgeEndpoint(e.source);
        auto t = g.index_.find(e.target);
        if (t == g.index_.end()) throw DanglingEdgeEndpoint(e.target);
        g.arcs_.push_back({s->second, t->second});
    }
    g.nodes_ = std::move(nodes);
    g.edges_ = std::move(edges);
    g.graph_attrs_ = std::move(graph_attrs);
    return g;
}

/// Like operator== but undirected edges compare as unordered endpoint pairs.
inline bool structurally_equal(const Graph& a, const Graph& b) {
    if (a.directed() != b.directed() || a.nodes() != b.nodes() || a.graph_attrs() != b.graph_attrs() ||
        a.edge_count() != b.edge_count())
        return false;
    for (std::size_t i = 0; i < a.edge_count(); ++i) {
        const auto& x = a.edges()[i];
        const auto& y = b.edges()[i];
        if (x.label != y.label || x.weight != y.weight || x.attrs != y.attrs) return false;
        bool same = x.source == y.source && x.target == y.target;
        if (!same && !a.directed()) same = x.source == y.target && x.target == y.source;
        if (!same) return false;
    }
    return true;
}

namespace detail {

inline void append_field(std::string& out, std::string_view field) {
    out += std::to_string(field.size());
    out += ':';
    out += field;
}

} // namespace detail

/// Canonical byte string for labeled isomorphism: equal for two graphs iff they
/// agree on directedness, the label multiset and the multiset of labeled edge
/// pairs (unordered for undirected graphs). Unlabeled nodes use their id.
inline std::string labeled_signature(const Graph& g) {
    auto label_of = [&](std::size_t i) -> const std::string& {
        const auto& n = g.nodes()[i];
        return n.label ? *n.label : n.id;
    };

    std::vector<std::string_view> labels;
    labels.reserve(g.node_count());
    for (std::size_t i = 0; i < g.node_count(); ++i) labels.push_back(label_of(i));
    std::sort(labels.begin(), labels.end());

    std::vector<std::pair<std::string_view, std::string_view>> pairs;
    pairs.reserve(g.edge_count());
    for (const auto& arc : g.arcs()) {
        std::string_view s = label_of(arc.source);
        std::string_view t = label_of(arc.target);
        if (!g.directed() && t < s) std::swap(s, t);
        pairs.emplace_back(s, t);
    }
    std::sort(pairs.begin(), pairs.end());

    std::string out = g.directed() ? "D" : "U";
    out += std::to_string(labels.size());
    out += '|';
    for (auto l : labels) detail::append_field(out, l);
    out += '|';
    out += std::to_string(pairs.size());
    out += '|';
    for (const auto& [s, t] : pairs) {
        detail::append_field(out, s);
        detail::append_field(out, t);
    }
    return out;
}

/// Per-node degrees indexed like nodes(). A self-loop adds 2; for directed
/// graphs in- and out-degree are combined.
inline std::vector<std::size_t> degrees(const Graph& g) {
    std::vector<std::size_t> deg(g.node_count(), 0);
    for (const auto& arc : g.arcs()) {
        ++deg[arc.source];
        ++deg[arc.target];
    }
    return deg;
}

/// Degree sequence in non-increasing order.
inline std::vector<std::size_t> degree_sequence(const Graph& g) {
    auto deg = degrees(g);
    std::sort(deg.begin(), deg.end(), std::greater<>());
    return deg;
}

/// Simple undirected adjacency: loops dropped, parallel and antiparallel arcs
/// collapsed, neighbor lists sorted.
class SimpleView {
public:
    explicit SimpleView(const Graph& g) : adj_(g.node_count()) {
        for (const auto& arc : g.arcs()) {
            if (arc.source == arc.target) continue;
            adj_[arc.source].push_back(arc.target);
            adj_[arc.target].push_back(arc.source);
        }
        for (auto& list : adj_) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
            edge_count_ += list.size();
        }
        edge_count_ /= 2;
    }

    std::size_t node_count() const noexcept { return adj_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    const std::vector<std::size_t>& neighbors(std::size_t v) const { return adj_[v]; }
    std::size_t degree(std::size_t v) const { return adj_[v].size(); }

    bool adjacent(std::size_t u, std::size_t v) const {
        const auto& list = adj_[u];
        return std::binary_search(list.begin(), list.end(), v);
    }

private:
    std::vector<std::vector<std::size_t>> adj_;
    std::size_t edge_count_ = 0;
};

} // namespace oga
