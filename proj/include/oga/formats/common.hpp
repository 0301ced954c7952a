#pragma once

#include <oga/error.hpp>
#include <oga/graph.hpp>

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace oga::formats {

/// Name of a registered file format ("gml", "graphml", "dimacs", "matrix-market").
struct FormatId {
    std::string name;

    auto operator<=>(const FormatId&) const = default;
};

inline const FormatId gml{"gml"};
inline const FormatId graphml{"graphml"};
inline const FormatId dimacs{"dimacs"};
inline const FormatId matrix_market{"matrix-market"};

/// Kinds of dropped information a LossReport may name.
namespace loss {
inline constexpr std::string_view node_label = "node-label";
inline constexpr std::string_view edge_label = "edge-label";
inline constexpr std::string_view edge_weight = "edge-weight";
inline constexpr std::string_view node_attr = "node-attr";
inline constexpr std::string_view edge_attr = "edge-attr";
inline constexpr std::string_view graph_attr = "graph-attr";
inline constexpr std::string_view directedness = "directedness";
/// Node ids replaced by their 1-based position.
inline constexpr std::string_view node_id = "node-id";
/// Parallel edges written as repeated matrix entries; nothing is dropped on re-read.
inline constexpr std::string_view duplicate_entries = "multi-edge-duplicate-entries";
/// Parse-side drops in lenient mode.
inline constexpr std::string_view nested_graph = "nested-graph";
inline constexpr std::string_view port = "port";
inline constexpr std::string_view hyperedge = "hyperedge";
inline constexpr std::string_view extra_graph = "extra-graph";
inline constexpr std::string_view unknown_element = "unknown-element";
} // namespace loss

struct LossItem {
    std::string kind;
    std::size_t count = 0;
    std::string message;

    bool operator==(const LossItem&) const = default;
};

struct LossReport {
    std::vector<LossItem> dropped_items;

    bool lossless() const noexcept { return dropped_items.empty(); }

    void add(std::string_view kind, std::size_t count, std::string message) {
        if (count == 0) return;
        for (auto& item : dropped_items) {
            if (item.kind == kind) {
                item.count += count;
                return;
            }
        }
        dropped_items.push_back({std::string(kind), count, std::move(message)});
    }

    std::size_t count(std::string_view kind) const {
        for (const auto& item : dropped_items)
            if (item.kind == kind) return item.count;
        return 0;
    }

    bool operator==(const LossReport&) const = default;
};

struct ParseOptions {
    /// Reject constructs outside the supported subset instead of dropping them.
    bool strict = false;
};

struct ParseResult {
    Graph graph;
    /// What lenient parsing dropped; always lossless in strict mode.
    LossReport dropped;
};

struct SerializeResult {
    std::string bytes;
    LossReport report;
};

namespace detail {

/// Maps byte offsets to 1-based line/column.
class LineIndex {
public:
    explicit LineIndex(std::string_view text) {
        starts_.push_back(0);
        for (std::size_t i = 0; i < text.size(); ++i)
            if (text[i] == '\n') starts_.push_back(i + 1);
    }

    std::pair<std::size_t, std::size_t> locate(std::size_t offset) const {
        auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
        std::size_t line = static_cast<std::size_t>(it - starts_.begin());
        return {line, offset - starts_[line - 1] + 1};
    }

    [[noreturn]] void fail(std::size_t offset, const std::string& message) const {
        auto [line, col] = locate(offset);
        throw SyntaxError(line, col, message);
    }

private:
    std::vector<std::size_t> starts_;
};

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

/// `[+-]?(D+(.D*)?|.D+)([eE][+-]?D+)?`
inline bool is_numeric_lexical(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t int_digits = 0, frac_digits = 0;
    while (i < s.size() && is_digit(s[i])) ++i, ++int_digits;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i])) ++i, ++frac_digits;
    }
    if (int_digits + frac_digits == 0) return false;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < s.size() && is_digit(s[i])) ++i, ++exp_digits;
        if (exp_digits == 0) return false;
    }
    return i == s.size();
}

/// `[+-]?D+`
inline bool is_integer_lexical(std::string_view s) {
    std::size_t i = (!s.empty() && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
    if (i == s.size()) return false;
    return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(), is_digit);
}

inline bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

/// Whitespace-separated tokens of one line.
inline std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_blank(line[i])) ++i;
        std::size_t b = i;
        while (i < line.size() && !is_blank(line[i])) ++i;
        if (i > b) out.push_back(line.substr(b, i - b));
    }
    return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

/// Positional ids "1".."n" used by the index-based formats.
inline bool has_positional_ids(const Graph& g) {
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (g.nodes()[i].id != std::to_string(i + 1)) return false;
    return true;
}

} // namespace detail

} // namespace oga::formats
