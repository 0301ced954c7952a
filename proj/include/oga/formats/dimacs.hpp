#pragma once

// DIMACS edge format: `c` comments, one `p edge N M` problem line (`p col` is
// accepted too), `e u v` edges over 1-based vertices and optional `n v value`
// lines kept as the node attribute "value". The format is undirected.

#include <oga/formats/common.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace oga::formats {

namespace dimacs_detail {
inline constexpr std::string_view problem_attr = "dimacs/problem";

inline bool single_token(const std::string& v) {
    return !v.empty() && v.find_first_of(" \t\r\n\f\v") == std::string::npos;
}

inline bool parse_index(std::string_view tok, std::size_t n, std::size_t& out) {
    if (tok.empty() || tok.size() > 18 || !std::all_of(tok.begin(), tok.end(), detail::is_digit)) return false;
    out = std::stoull(std::string(tok));
    return out >= 1 && out <= n;
}
} // namespace dimacs_detail

inline ParseResult parse_dimacs(std::string_view text, const ParseOptions& = {}) {
    using namespace dimacs_detail;
    detail::LineIndex lines(text);
    bool have_problem = false;
    std::size_t n = 0;
    std::vector<NodeRecord> nodes;
    std::vector<EdgeRecord> edges;
    AttrMap graph_attrs;

    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        std::string_view line = text.substr(pos, end - pos);
        std::size_t line_start = pos;
        pos = end + 1;
        auto toks = detail::split_tokens(line);
        if (toks.empty()) continue;
        std::size_t col = static_cast<std::size_t>(toks[0].data() - text.data());
        if (toks[0] == "c") continue;
        if (toks[0] == "p") {
            if (have_problem) lines.fail(col, "second problem line");
            if (toks.size() != 4) lines.fail(col, "expected 'p edge <nodes> <edges>'");
            if (toks[1] != "edge" && toks[1] != "col") lines.fail(col, "unsupported problem type '" + std::string(toks[1]) + "'");
            if (toks[1] != "edge") graph_attrs[std::string(problem_attr)] = std::string(toks[1]);
            for (int i = 2; i < 4; ++i)
                if (toks[i].size() > 12 || !std::all_of(toks[i].begin(), toks[i].end(), detail::is_digit))
                    lines.fail(static_cast<std::size_t>(toks[i].data() - text.data()), "expected a count");
            n = std::stoull(std::string(toks[2]));
            if (n > 10'000'000) lines.fail(col, "node count too large");
            nodes.reserve(n);
            for (std::size_t i = 1; i <= n; ++i) nodes.push_back(NodeRecord{std::to_string(i), {}, {}});
            have_problem = true;
        } else if (toks[0] == "e") {
            if (!have_problem) lines.fail(col, "edge line before problem line");
            if (toks.size() != 3) lines.fail(col, "expected 'e <u> <v>'");
            std::size_t u = 0, v = 0;
            if (!parse_index(toks[1], n, u)) lines.fail(static_cast<std::size_t>(toks[1].data() - text.data()), "vertex out of range");
            if (!parse_index(toks[2], n, v)) lines.fail(static_cast<std::size_t>(toks[2].data() - text.data()), "vertex out of range");
            edges.push_back(EdgeRecord{nodes[u - 1].id, nodes[v - 1].id, {}, {}, {}});
        } else if (toks[0] == "n") {
            if (!have_problem) lines.fail(col, "node line before problem line");
            if (toks.size() != 3) lines.fail(col, "expected 'n <v> <value>'");
            std::size_t v = 0;
            if (!parse_index(toks[1], n, v)) lines.fail(static_cast<std::size_t>(toks[1].data() - text.data()), "vertex out of range");
            nodes[v - 1].attrs["value"] = std::string(toks[2]);
        } else {
            lines.fail(line_start + static_cast<std::size_t>(toks[0].data() - line.data()),
                       "unknown line type '" + std::string(toks[0]) + "'");
        }
    }
    if (!have_problem) lines.fail(0, "missing problem line 'p edge <nodes> <edges>'");
    return ParseResult{build_graph(false, std::move(nodes), std::move(edges), std::move(graph_attrs)), {}};
}

inline SerializeResult serialize_dimacs(const Graph& g) {
    SerializeResult out;
    auto& r = out.report;
    if (g.directed()) r.add(loss::directedness, 1, "DIMACS edge format is undirected");

    std::size_t relabeled = 0, labels = 0, node_attrs = 0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto& n = g.nodes()[i];
        if (n.id != std::to_string(i + 1)) ++relabeled;
        if (n.label) ++labels;
        for (const auto& [k, v] : n.attrs) {
            if (k != "value" || !dimacs_detail::single_token(v)) ++node_attrs;
        }
    }
    std::size_t edge_labels = 0, weights = 0, edge_attrs = 0;
    for (const auto& e : g.edges()) {
        if (e.label) ++edge_labels;
        if (e.weight) ++weights;
        edge_attrs += e.attrs.size();
    }
    std::size_t graph_attrs = 0;
    std::string problem = "edge";
    for (const auto& [k, v] : g.graph_attrs()) {
        if (k == dimacs_detail::problem_attr && v == "col") problem = v;
        else ++graph_attrs;
    }
    r.add(loss::node_id, relabeled, "node ids replaced by their 1-based position");
    r.add(loss::node_label, labels, "DIMACS carries no node labels");
    r.add(loss::node_attr, node_attrs, "DIMACS keeps only a single-token node 'value'");
    r.add(loss::edge_label, edge_labels, "DIMACS carries no edge labels");
    r.add(loss::edge_weight, weights, "DIMACS edge format carries no weights");
    r.add(loss::edge_attr, edge_attrs, "DIMACS carries no edge attributes");
    r.add(loss::graph_attr, graph_attrs, "DIMACS carries no graph attributes");

    std::string& s = out.bytes;
    s += "c Open Graph Archive\n";
    s += "p " + problem + " " + std::to_string(g.node_count()) + " " + std::to_string(g.edge_count()) + "\n";
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        auto it = g.nodes()[i].attrs.find("value");
        if (it != g.nodes()[i].attrs.end() && dimacs_detail::single_token(it->second))
            s += "n " + std::to_string(i + 1) + " " + it->second + "\n";
    }
    for (const auto& arc : g.arcs())
        s += "e " + std::to_string(arc.source + 1) + " " + std::to_string(arc.target + 1) + "\n";
    return out;
}

/// Sniff: the first line that is not blank or a `c` comment is a `p` line.
inline bool sniff_dimacs(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        auto toks = detail::split_tokens(line);
        if (toks.empty() || toks[0] == "c") continue;
        return toks[0] == "p" && toks.size() == 4;
    }
    return false;
}

} // namespace oga::formats
