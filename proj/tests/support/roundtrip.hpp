#pragma once

// Round-trip oracle: explains every difference between a graph and its
// re-parsed serialization in terms of LossReport kinds, independently of the
// serializers' own bookkeeping.

#include <oga/formats/common.hpp>
#include <oga/graph.hpp>

#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oga::testing {

struct RoundTripVerdict {
    bool ok = true;
    std::string why;
};

inline RoundTripVerdict explain_roundtrip(const Graph& g, const Graph& h, const formats::LossReport& report) {
    namespace loss = formats::loss;
    std::map<std::string, std::size_t> seen;
    auto fail = [](std::string why) { return RoundTripVerdict{false, std::move(why)}; };

    if (g.directed() != h.directed()) {
        if (!g.directed()) return fail("undirected graph came back directed");
        seen[std::string(loss::directedness)] = 1;
    }
    if (g.node_count() != h.node_count()) return fail("node count changed");
    if (g.edge_count() != h.edge_count()) return fail("edge count changed");

    std::map<std::string, std::string> id_map;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto& a = g.nodes()[i];
        const auto& b = h.nodes()[i];
        if (a.id != b.id) ++seen[std::string(loss::node_id)];
        id_map[a.id] = b.id;
        if (a.label != b.label) {
            if (a.label && !b.label) ++seen[std::string(loss::node_label)];
            else return fail("node " + a.id + " label changed");
        }
        for (const auto& [k, v] : a.attrs) {
            auto it = b.attrs.find(k);
            if (it == b.attrs.end()) ++seen[std::string(loss::node_attr)];
            else if (it->second != v) return fail("node " + a.id + " attr " + k + " changed: '" + v + "' -> '" + it->second + "'");
        }
        for (const auto& [k, v] : b.attrs)
            if (!a.attrs.count(k)) return fail("node " + a.id + " gained attr " + k);
    }
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> pair_counts;
    std::size_t duplicates = 0;
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        const auto& a = g.edges()[i];
        const auto& b = h.edges()[i];
        std::string s = id_map[a.source], t = id_map[a.target];
        bool same = s == b.source && t == b.target;
        if (!same && !h.directed()) same = s == b.target && t == b.source;
        if (!same) return fail("edge " + std::to_string(i) + " endpoints changed");
        if (a.label != b.label) {
            if (a.label && !b.label) ++seen[std::string(loss::edge_label)];
            else return fail("edge label changed");
        }
        if (a.weight != b.weight) {
            if (a.weight && !b.weight) ++seen[std::string(loss::edge_weight)];
            else return fail("edge weight changed");
        }
        for (const auto& [k, v] : a.attrs) {
            auto it = b.attrs.find(k);
            if (it == b.attrs.end()) ++seen[std::string(loss::edge_attr)];
            else if (it->second != v) return fail("edge attr " + k + " changed");
        }
        for (const auto& [k, v] : b.attrs)
            if (!a.attrs.count(k)) return fail("edge gained attr " + k);
        auto arc = g.arcs()[i];
        auto key = g.directed() ? std::make_pair(arc.source, arc.target) : std::pair<std::size_t, std::size_t>(std::minmax(arc.source, arc.target));
        if (pair_counts[key]++ > 0) ++duplicates;
    }
    for (const auto& [k, v] : g.graph_attrs()) {
        auto it = h.graph_attrs().find(k);
        if (it == h.graph_attrs().end()) ++seen[std::string(loss::graph_attr)];
        else if (it->second != v) return fail("graph attr " + k + " changed");
    }
    for (const auto& [k, v] : h.graph_attrs())
        if (!g.graph_attrs().count(k)) return fail("graph gained attr " + k);

    std::map<std::string, std::size_t> reported;
    for (const auto& item : report.dropped_items) {
        if (item.kind == loss::duplicate_entries) {
            if (item.count != duplicates) return fail("duplicate-entry note miscounted");
            continue;
        }
        reported[item.kind] = item.count;
    }
    if (seen != reported) {
        std::string why = "observed {";
        for (const auto& [k, c] : seen) why += k + ":" + std::to_string(c) + " ";
        why += "} reported {";
        for (const auto& [k, c] : reported) why += k + ":" + std::to_string(c) + " ";
        return fail(why + "}");
    }
    return {};
}

/// Random graph exercising labels, weights, attributes with awkward keys and
/// values, parallel edges, loops and graph attributes.
inline Graph random_rich_graph(std::mt19937_64& rng, std::size_t n) {
    static const std::vector<std::string> keys{
        "color", "x", "y", "graphics.x", "graphics.fill", "graphics", "score_2", "name",
        "my key", "a.b#1", "9start", "label", "id", "weight", "value", "graphml/shape", "point#1.x", "p.q.r"};
    static const std::vector<std::string> values{
        "red", "1", "-2.5e3", "0.10", "", "  spaced  ", "quote\"d", "amp&amp;", "<tag>", "line\nbreak",
        "caf\xC3\xA9", "tab\there", "[bracket]", "# hash", "+7"};
    static const std::vector<std::string> weights{"1", "2.5", "-3", "1e-3", "7", "heavy"};
    static const std::vector<std::string> graph_keys{
        "name", "comment", "^Creator", "graphml.root/xmlns:y", "directed", "node", "meta.source", "bad key"};

    auto pick = [&](const auto& v) -> const auto& { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
    std::bernoulli_distribution coin(0.5), rare(0.15);
    bool directed = coin(rng);
    bool numeric_ids = coin(rng);
    bool labeled = coin(rng);
    bool weighted = coin(rng);
    bool attributed = coin(rng);

    std::vector<NodeRecord> nodes;
    for (std::size_t i = 0; i < n; ++i) {
        NodeRecord r;
        r.id = numeric_ids ? std::to_string(i + 1) : "v" + std::to_string(i);
        if (labeled && !rare(rng)) r.label = pick(values);
        if (attributed)
            for (int k = 0; k < 2; ++k)
                if (coin(rng)) r.attrs[pick(keys)] = pick(values);
        nodes.push_back(std::move(r));
    }
    std::vector<EdgeRecord> edges;
    std::uniform_int_distribution<std::size_t> node_pick(0, n - 1);
    std::size_t m = std::uniform_int_distribution<std::size_t>(0, 3 * n)(rng);
    for (std::size_t k = 0; k < m; ++k) {
        EdgeRecord e;
        e.source = nodes[node_pick(rng)].id;
        e.target = rare(rng) ? e.source : nodes[node_pick(rng)].id;
        if (weighted && !rare(rng)) e.weight = pick(weights);
        if (labeled && rare(rng)) e.label = pick(values);
        if (attributed && coin(rng)) e.attrs[pick(keys)] = pick(values);
        edges.push_back(std::move(e));
        if (rare(rng)) edges.push_back(edges.back());
    }
    AttrMap graph_attrs;
    if (attributed)
        for (int k = 0; k < 3; ++k)
            if (coin(rng)) graph_attrs[pick(graph_keys)] = pick(values);
    return build_graph(directed, std::move(nodes), std::move(edges), std::move(graph_attrs));
}

} // namespace oga::testing
