#pragma once

// Matrix Market coordinate format, fields real|integer|pattern, symmetry
// general|symmetric.
//
//   square general     -> directed graph on nodes "1".."n"
//   square symmetric   -> undirected graph on nodes "1".."n"
//   rectangular R x C  -> directed bipartite graph, nodes "r1".."rR" then "c1".."cC"
//
// Entry values become edge weights (lexical form kept); diagonal entries are
// self-loops; repeated entries are parallel edges.

#include <oga/formats/common.hpp>

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oga::formats {

namespace mm_detail {

inline constexpr std::string_view banner = "%%MatrixMarket";

inline bool parse_count(std::string_view tok, std::size_t& out) {
    if (tok.empty() || tok.size() > 12 || !std::all_of(tok.begin(), tok.end(), detail::is_digit)) return false;
    out = std::stoull(std::string(tok));
    return true;
}

/// The node ids of a rectangular matrix layout, if `g` has exactly that shape.
inline std::optional<std::pair<std::size_t, std::size_t>> bipartite_shape(const Graph& g) {
    if (!g.directed()) return std::nullopt;
    std::size_t rows = 0;
    while (rows < g.node_count() && g.nodes()[rows].id == "r" + std::to_string(rows + 1)) ++rows;
    std::size_t cols = g.node_count() - rows;
    if (rows == 0 || cols == 0 || rows == cols) return std::nullopt;
    for (std::size_t j = 0; j < cols; ++j)
        if (g.nodes()[rows + j].id != "c" + std::to_string(j + 1)) return std::nullopt;
    for (const auto& arc : g.arcs())
        if (arc.source >= rows || arc.target < rows) return std::nullopt;
    return std::make_pair(rows, cols);
}

} // namespace mm_detail

inline ParseResult parse_matrix_market(std::string_view text, const ParseOptions& = {}) {
    using namespace mm_detail;
    detail::LineIndex lines(text);

    std::size_t pos = 0;
    auto next_line = [&](std::size_t& start) -> std::optional<std::string_view> {
        if (pos >= text.size()) return std::nullopt;
        auto nl = text.find('\n', pos);
        std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        start = pos;
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        return line;
    };

    std::size_t start = 0;
    auto header = next_line(start);
    if (!header || header->substr(0, banner.size()) != banner) lines.fail(0, "missing %%MatrixMarket banner");
    auto h = detail::split_tokens(*header);
    if (h.size() != 5) lines.fail(0, "banner must read '%%MatrixMarket matrix coordinate <field> <symmetry>'");
    if (!detail::iequals(h[1], "matrix")) throw UnsupportedConstruct("Matrix Market object '" + std::string(h[1]) + "'");
    if (!detail::iequals(h[2], "coordinate")) throw UnsupportedConstruct("Matrix Market format '" + std::string(h[2]) + "'");
    enum class Field { real, integer, pattern } field;
    if (detail::iequals(h[3], "real")) field = Field::real;
    else if (detail::iequals(h[3], "integer")) field = Field::integer;
    else if (detail::iequals(h[3], "pattern")) field = Field::pattern;
    else throw UnsupportedConstruct("Matrix Market field '" + std::string(h[3]) + "'");
    bool symmetric;
    if (detail::iequals(h[4], "general")) symmetric = false;
    else if (detail::iequals(h[4], "symmetric")) symmetric = true;
    else throw UnsupportedConstruct("Matrix Market symmetry '" + std::string(h[4]) + "'");

    std::size_t rows = 0, cols = 0, nnz = 0;
    bool have_size = false;
    std::vector<NodeRecord> nodes;
    std::vector<EdgeRecord> edges;
    bool rectangular = false;

    while (auto line = next_line(start)) {
        auto toks = detail::split_tokens(*line);
        if (toks.empty() || toks[0][0] == '%') continue;
        auto offset = [&](std::size_t i) { return static_cast<std::size_t>(toks[i].data() - text.data()); };
        if (!have_size) {
            if (toks.size() != 3) lines.fail(offset(0), "expected size line '<rows> <columns> <entries>'");
            for (std::size_t i = 0; i < 3; ++i)
                if (!parse_count(toks[i], i == 0 ? rows : i == 1 ? cols : nnz)) lines.fail(offset(i), "expected a count");
            if (symmetric && rows != cols) lines.fail(offset(0), "symmetric matrix must be square");
            if (rows + cols > 10'000'000) lines.fail(offset(0), "matrix dimensions too large");
            rectangular = rows != cols;
            if (rectangular) {
                for (std::size_t i = 1; i <= rows; ++i) nodes.push_back({"r" + std::to_string(i), {}, {}});
                for (std::size_t j = 1; j <= cols; ++j) nodes.push_back({"c" + std::to_string(j), {}, {}});
            } else {
                for (std::size_t i = 1; i <= rows; ++i) nodes.push_back({std::to_string(i), {}, {}});
            }
            edges.reserve(std::min<std::size_t>(nnz, 1'000'000));
            have_size = true;
            continue;
        }
        std::size_t want = field == Field::pattern ? 2 : 3;
        if (toks.size() != want)
            lines.fail(offset(0), field == Field::pattern ? "expected '<row> <column>'" : "expected '<row> <column> <value>'");
        if (edges.size() == nnz) lines.fail(offset(0), "more entries than declared");
        std::size_t i = 0, j = 0;
        if (!parse_count(toks[0], i) || i < 1 || i > rows) lines.fail(offset(0), "row index out of range");
        if (!parse_count(toks[1], j) || j < 1 || j > cols) lines.fail(offset(1), "column index out of range");
        EdgeRecord e;
        if (rectangular) {
            e.source = nodes[i - 1].id;
            e.target = nodes[rows + j - 1].id;
        } else {
            e.source = nodes[i - 1].id;
            e.target = nodes[j - 1].id;
        }
        if (field != Field::pattern) {
            bool ok = field == Field::integer ? detail::is_integer_lexical(toks[2]) : detail::is_numeric_lexical(toks[2]);
            if (!ok) lines.fail(offset(2), "malformed entry value");
            e.weight = std::string(toks[2]);
        }
        edges.push_back(std::move(e));
    }
    if (!have_size) lines.fail(text.size(), "missing size line");
    if (edges.size() != nnz) lines.fail(text.size(), "fewer entries than declared");
    return ParseResult{build_graph(!symmetric, std::move(nodes), std::move(edges)), {}};
}

inline SerializeResult serialize_matrix_market(const Graph& g) {
    using namespace mm_detail;
    SerializeResult out;
    auto& r = out.report;

    auto shape = bipartite_shape(g);
    std::size_t relabeled = 0, labels = 0, node_attrs = 0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto& n = g.nodes()[i];
        if (!shape && n.id != std::to_string(i + 1)) ++relabeled;
        if (n.label) ++labels;
        node_attrs += n.attrs.size();
    }

    std::size_t weighted = 0, numeric = 0, integral = 0, edge_labels = 0, edge_attrs = 0;
    for (const auto& e : g.edges()) {
        if (e.label) ++edge_labels;
        edge_attrs += e.attrs.size();
        if (!e.weight) continue;
        ++weighted;
        if (detail::is_numeric_lexical(*e.weight)) ++numeric;
        if (detail::is_integer_lexical(*e.weight)) ++integral;
    }
    const char* field = "pattern";
    if (weighted > 0 && numeric == g.edge_count()) field = integral == g.edge_count() ? "integer" : "real";
    bool write_values = std::string_view(field) != "pattern";
    if (!write_values) r.add(loss::edge_weight, weighted, "weights dropped: pattern matrix (missing or non-numeric weights)");

    // Parallel entries survive re-reading as parallel edges, but most readers sum them.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
    std::size_t duplicates = 0;
    for (const auto& arc : g.arcs()) {
        auto key = g.directed() ? std::make_pair(arc.source, arc.target)
                                : std::pair<std::size_t, std::size_t>(std::minmax(arc.source, arc.target));
        if (seen[key]++ > 0) ++duplicates;
    }

    r.add(loss::node_id, relabeled, "node ids replaced by their 1-based position");
    r.add(loss::node_label, labels, "Matrix Market carries no node labels");
    r.add(loss::node_attr, node_attrs, "Matrix Market carries no node attributes");
    r.add(loss::edge_label, edge_labels, "Matrix Market carries no edge labels");
    r.add(loss::edge_attr, edge_attrs, "Matrix Market carries no edge attributes");
    r.add(loss::graph_attr, g.graph_attrs().size(), "Matrix Market carries no graph attributes");
    r.add(loss::duplicate_entries, duplicates, "parallel edges written as repeated entries");

    std::string& s = out.bytes;
    s += "%%MatrixMarket matrix coordinate ";
    s += field;
    s += g.directed() ? " general\n" : " symmetric\n";
    std::size_t rows = shape ? shape->first : g.node_count();
    std::size_t cols = shape ? shape->second : g.node_count();
    s += std::to_string(rows) + " " + std::to_string(cols) + " " + std::to_string(g.edge_count()) + "\n";
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        auto [i, j] = std::pair{g.arcs()[k].source + 1, g.arcs()[k].target + 1};
        if (shape) j -= shape->first;
        if (!g.directed() && i < j) std::swap(i, j);
        s += std::to_string(i) + " " + std::to_string(j);
        if (write_values) {
            s += ' ';
            s += *g.edges()[k].weight;
        }
        s += '\n';
    }
    return out;
}

inline bool sniff_matrix_market(std::string_view text) {
    return text.substr(0, mm_detail::banner.size()) == mm_detail::banner;
}

} // namespace oga::formats
