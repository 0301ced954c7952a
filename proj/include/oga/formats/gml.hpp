#pragma once

// GML reader/writer.
//
// Supported subset: the key-value list syntax (`key value`, values are
// integers, reals, double-quoted strings or `[ ... ]` lists, `#` comments).
// `graph/node/edge/id/source/target/label/directed` are interpreted; every
// other key is kept. Nested lists are flattened into dotted attribute keys
// ("graphics.x"), and the n-th repetition of a key inside one list gets a
// "#n" suffix ("point#1.x"), so the writer can rebuild the exact nesting.
// Top-level keys other than `graph` land in graph_attrs with a "^" prefix.

#include <oga/formats/common.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace oga::formats::gml_detail {

struct Entry {
    std::string key;
    std::size_t offset = 0;
    bool is_list = false;
    std::string scalar;
    std::vector<Entry> list;
};

inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out += s[i];
            continue;
        }
        auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += s[i];
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        if (name == "amp") out += '&';
        else if (name == "quot") out += '"';
        else if (name == "lt") out += '<';
        else if (name == "gt") out += '>';
        else if (name == "apos") out += '\'';
        else {
            out += s[i];
            continue;
        }
        i = semi;
    }
    return out;
}

inline std::string encode_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '"') out += "&quot;";
        else out += c;
    }
    out += '"';
    return out;
}

inline std::string encode_value(std::string_view s) {
    return detail::is_numeric_lexical(s) ? std::string(s) : encode_string(s);
}

inline bool is_key_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
inline bool is_key_char(char c) { return is_key_start(c) || detail::is_digit(c); }

inline bool valid_key(std::string_view k) {
    return !k.empty() && is_key_start(k[0]) && std::all_of(k.begin() + 1, k.end(), is_key_char);
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text), lines_(text) {}

    std::vector<Entry> read_document() {
        auto entries = read_list(0, false);
        return entries;
    }

    const detail::LineIndex& lines() const { return lines_; }

private:
    static constexpr int max_depth = 200;

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (detail::is_blank(c)) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::vector<Entry> read_list(int depth, bool bracketed) {
        if (depth > max_depth) lines_.fail(pos_, "lists nested too deeply");
        std::vector<Entry> out;
        for (;;) {
            skip_space();
            if (pos_ >= text_.size()) {
                if (bracketed) lines_.fail(pos_, "unterminated list: expected ']'");
                return out;
            }
            char c = text_[pos_];
            if (c == ']') {
                if (!bracketed) lines_.fail(pos_, "unexpected ']'");
                ++pos_;
                return out;
            }
            if (!is_key_start(c)) lines_.fail(pos_, "expected a key");
            Entry e;
            e.offset = pos_;
            std::size_t b = pos_;
            while (pos_ < text_.size() && is_key_char(text_[pos_])) ++pos_;
            e.key = std::string(text_.substr(b, pos_ - b));
            skip_space();
            if (pos_ >= text_.size()) lines_.fail(pos_, "missing value for key '" + e.key + "'");
            c = text_[pos_];
            if (c == '[') {
                ++pos_;
                e.is_list = true;
                e.list = read_list(depth + 1, true);
            } else if (c == '"') {
                std::size_t start = ++pos_;
                auto close = text_.find('"', start);
                if (close == std::string_view::npos) lines_.fail(start - 1, "unterminated string");
                e.scalar = decode_entities(text_.substr(start, close - start));
                pos_ = close + 1;
            } else {
                std::size_t start = pos_;
                while (pos_ < text_.size() && !detail::is_blank(text_[pos_]) && text_[pos_] != '[' &&
                       text_[pos_] != ']' && text_[pos_] != '#' && text_[pos_] != '"')
                    ++pos_;
                std::string_view tok = text_.substr(start, pos_ - start);
                if (!detail::is_numeric_lexical(tok)) lines_.fail(start, "expected a number, string or list");
                e.scalar = std::string(tok);
            }
            out.push_back(std::move(e));
        }
    }

    std::string_view text_;
    detail::LineIndex lines_;
    std::size_t pos_ = 0;
};

/// Assigns "#n" suffixes to repeated keys of one list.
class KeyCounter {
public:
    std::string segment(const std::string& key) {
        std::size_t n = counts_[key]++;
        return n == 0 ? key : key + "#" + std::to_string(n);
    }

private:
    std::map<std::string, std::size_t> counts_;
};

inline void flatten(const std::vector<Entry>& list, const std::string& prefix, AttrMap& out) {
    KeyCounter counter;
    for (const auto& e : list) {
        std::string path = prefix.empty() ? counter.segment(e.key) : prefix + "." + counter.segment(e.key);
        if (e.is_list) flatten(e.list, path, out);
        else out[path] = e.scalar;
    }
}

inline void flatten_entry(const Entry& e, const std::string& path, AttrMap& out) {
    if (e.is_list) flatten(e.list, path, out);
    else out[path] = e.scalar;
}

// ---- writer-side attribute tree ---------------------------------------------------------

struct Segment {
    std::string base;
    std::size_t index = 0;
    auto operator<=>(const Segment&) const = default;
};

inline std::optional<Segment> parse_segment(std::string_view s) {
    auto hash = s.find('#');
    Segment seg;
    if (hash == std::string_view::npos) {
        seg.base = std::string(s);
    } else {
        seg.base = std::string(s.substr(0, hash));
        std::string_view digits = s.substr(hash + 1);
        if (digits.empty() || digits[0] == '0' || digits.size() > 9 ||
            !std::all_of(digits.begin(), digits.end(), detail::is_digit))
            return std::nullopt;
        seg.index = std::stoul(std::string(digits));
    }
    if (!valid_key(seg.base)) return std::nullopt;
    return seg;
}

struct TreeNode {
    std::optional<std::string> scalar;
    std::map<Segment, TreeNode> children;
    std::size_t leaf_count() const {
        if (scalar) return 1;
        std::size_t n = 0;
        for (const auto& [_, c] : children) n += c.leaf_count();
        return n;
    }
};

/// Builds the nesting tree for one attribute map. Keys that cannot be written
/// back so that they re-read identically are counted in `dropped`.
inline TreeNode build_tree(const std::vector<std::pair<std::string_view, const std::string*>>& attrs,
                           const std::unordered_set<std::string>& reserved, std::size_t& dropped) {
    TreeNode root;
    for (const auto& [key, value] : attrs) {
        std::vector<Segment> path;
        bool ok = true;
        std::size_t start = 0;
        for (;;) {
            auto dot = key.find('.', start);
            auto seg = parse_segment(key.substr(start, dot == std::string_view::npos ? dot : dot - start));
            if (!seg) {
                ok = false;
                break;
            }
            path.push_back(*seg);
            if (dot == std::string_view::npos) break;
            start = dot + 1;
        }
        if (ok && reserved.count(path.front().base)) ok = false;
        TreeNode* cur = &root;
        for (std::size_t i = 0; ok && i < path.size(); ++i) {
            bool leaf = i + 1 == path.size();
            auto it = cur->children.find(path[i]);
            if (it == cur->children.end()) {
                it = cur->children.emplace(path[i], TreeNode{}).first;
                if (leaf) it->second.scalar = *value;
            } else if (leaf || it->second.scalar) {
                ok = false;
            }
            cur = &it->second;
        }
        if (!ok) ++dropped;
    }
    // Repetition indices must be contiguous from 0 or the re-read would renumber
    // them, and empty lists vanish on re-read. Removing one can expose the
    // other, so repeat until stable.
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<TreeNode*> stack{&root};
        while (!stack.empty()) {
            TreeNode* node = stack.back();
            stack.pop_back();
            std::map<std::string, std::size_t> next;
            for (auto it = node->children.begin(); it != node->children.end();) {
                std::size_t& expect = next[it->first.base];
                std::size_t leaves = it->second.leaf_count();
                if (it->first.index != expect || leaves == 0) {
                    dropped += leaves;
                    it = node->children.erase(it);
                    changed = true;
                    continue;
                }
                ++expect;
                ++it;
            }
            for (auto& [_, c] : node->children)
                if (!c.scalar) stack.push_back(&c);
        }
    }
    return root;
}

inline void write_tree(std::string& out, const TreeNode& node, int indent) {
    for (const auto& [seg, child] : node.children) {
        out.append(static_cast<std::size_t>(indent) * 2, ' ');
        out += seg.base;
        if (child.scalar) {
            out += ' ';
            out += encode_value(*child.scalar);
            out += '\n';
        } else {
            out += " [\n";
            write_tree(out, child, indent + 1);
            out.append(static_cast<std::size_t>(indent) * 2, ' ');
            out += "]\n";
        }
    }
}

inline std::vector<std::pair<std::string_view, const std::string*>> view_of(const AttrMap& attrs) {
    std::vector<std::pair<std::string_view, const std::string*>> out;
    out.reserve(attrs.size());
    for (const auto& [k, v] : attrs) out.emplace_back(k, &v);
    return out;
}

} // namespace oga::formats::gml_detail

namespace oga::formats {

inline ParseResult parse_gml(std::string_view text, const ParseOptions& opts = {}) {
    using namespace gml_detail;
    Reader reader(text);
    auto doc = reader.read_document();
    const auto& lines = reader.lines();

    ParseResult result;
    AttrMap graph_attrs;
    const Entry* graph_entry = nullptr;
    KeyCounter top_counter;
    for (const auto& e : doc) {
        if (e.key == "graph") {
            if (!e.is_list) lines.fail(e.offset, "'graph' must be a list");
            if (graph_entry) {
                if (opts.strict) throw UnsupportedConstruct("multiple graphs in one GML document");
                result.dropped.add(loss::extra_graph, 1, "only the first graph of the document was read");
                continue;
            }
            graph_entry = &e;
            continue;
        }
        flatten_entry(e, "^" + top_counter.segment(e.key), graph_attrs);
    }
    if (!graph_entry) lines.fail(0, "missing 'graph [ ... ]'");

    bool directed = false;
    bool seen_directed = false;
    std::vector<NodeRecord> nodes;
    std::vector<EdgeRecord> edges;
    std::vector<std::size_t> edge_offsets;
    std::unordered_map<std::string, std::size_t> node_offsets;
    KeyCounter counter;

    for (const auto& e : graph_entry->list) {
        std::string seg = counter.segment(e.key);
        if (e.key == "directed" && !seen_directed && !e.is_list) {
            if (e.scalar != "0" && e.scalar != "1") lines.fail(e.offset, "'directed' must be 0 or 1");
            directed = e.scalar == "1";
            seen_directed = true;
        } else if (e.key == "node" && e.is_list) {
            NodeRecord n;
            bool has_id = false;
            KeyCounter nc;
            for (const auto& f : e.list) {
                std::string fs = nc.segment(f.key);
                if (f.key == "id" && fs == "id") {
                    if (f.is_list) lines.fail(f.offset, "node id must be a scalar");
                    n.id = f.scalar;
                    has_id = true;
                } else if (f.key == "label" && fs == "label" && !f.is_list) {
                    n.label = f.scalar;
                } else {
                    flatten_entry(f, fs, n.attrs);
                }
            }
            if (!has_id || n.id.empty()) lines.fail(e.offset, "node without id");
            if (!node_offsets.emplace(n.id, e.offset).second)
                lines.fail(e.offset, "duplicate node id '" + n.id + "'");
            nodes.push_back(std::move(n));
        } else if (e.key == "edge" && e.is_list) {
            EdgeRecord ed;
            bool has_s = false, has_t = false;
            KeyCounter ec;
            for (const auto& f : e.list) {
                std::string fs = ec.segment(f.key);
                if (!f.is_list && f.key == "source" && fs == "source") {
                    ed.source = f.scalar;
                    has_s = true;
                } else if (!f.is_list && f.key == "target" && fs == "target") {
                    ed.target = f.scalar;
                    has_t = true;
                } else if (!f.is_list && f.key == "label" && fs == "label") {
                    ed.label = f.scalar;
                } else if (!f.is_list && f.key == "weight" && fs == "weight") {
                    ed.weight = f.scalar;
                } else {
                    flatten_entry(f, fs, ed.attrs);
                }
            }
            if (!has_s || !has_t) lines.fail(e.offset, "edge without source or target");
            edges.push_back(std::move(ed));
            edge_offsets.push_back(e.offset);
        } else {
            flatten_entry(e, seg, graph_attrs);
        }
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!node_offsets.count(edges[i].source))
            lines.fail(edge_offsets[i], "edge source '" + edges[i].source + "' names no node");
        if (!node_offsets.count(edges[i].target))
            lines.fail(edge_offsets[i], "edge target '" + edges[i].target + "' names no node");
    }
    result.graph = build_graph(directed, std::move(nodes), std::move(edges), std::move(graph_attrs));
    return result;
}

inline SerializeResult serialize_gml(const Graph& g) {
    using namespace gml_detail;
    SerializeResult out;
    std::string& s = out.bytes;
    std::size_t dropped_graph = 0, dropped_node = 0, dropped_edge = 0;

    std::vector<std::pair<std::string_view, const std::string*>> top, inner;
    for (const auto& [k, v] : g.graph_attrs()) {
        if (!k.empty() && k[0] == '^') top.emplace_back(std::string_view(k).substr(1), &v);
        else inner.emplace_back(k, &v);
    }
    write_tree(s, build_tree(top, {"graph"}, dropped_graph), 0);
    s += "graph [\n";
    s += g.directed() ? "  directed 1\n" : "  directed 0\n";
    write_tree(s, build_tree(inner, {"directed", "node", "edge"}, dropped_graph), 1);

    static const std::unordered_set<std::string> node_reserved{"id", "label"};
    for (const auto& n : g.nodes()) {
        s += "  node [\n    id ";
        s += encode_value(n.id);
        s += '\n';
        if (n.label) {
            s += "    label ";
            s += encode_string(*n.label);
            s += '\n';
        }
        write_tree(s, build_tree(view_of(n.attrs), node_reserved, dropped_node), 2);
        s += "  ]\n";
    }
    static const std::unordered_set<std::string> edge_reserved{"source", "target", "label", "weight"};
    for (const auto& e : g.edges()) {
        s += "  edge [\n    source ";
        s += encode_value(e.source);
        s += "\n    target ";
        s += encode_value(e.target);
        s += '\n';
        if (e.label) {
            s += "    label ";
            s += encode_string(*e.label);
            s += '\n';
        }
        if (e.weight) {
            s += "    weight ";
            s += encode_value(*e.weight);
            s += '\n';
        }
        write_tree(s, build_tree(view_of(e.attrs), edge_reserved, dropped_edge), 2);
        s += "  ]\n";
    }
    s += "]\n";

    out.report.add(loss::graph_attr, dropped_graph, "graph attributes whose keys are not expressible in GML");
    out.report.add(loss::node_attr, dropped_node, "node attributes whose keys are not expressible in GML");
    out.report.add(loss::edge_attr, dropped_edge, "edge attributes whose keys are not expressible in GML");
    return out;
}

/// Sniff: a top-level `graph` key followed by `[`.
inline bool sniff_gml(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && detail::is_blank(text[pos])) ++pos;
        if (pos >= text.size()) return false;
        if (text[pos] == '#') {
            while (pos < text.size() && text[pos] != '\n') ++pos;
            continue;
        }
        if (text.compare(pos, 5, "graph") == 0) {
            std::size_t p = pos + 5;
            while (p < text.size() && detail::is_blank(text[p])) ++p;
            if (p < text.size() && text[p] == '[') return true;
        }
        // skip one `key value` pair at top level
        if (!gml_detail::is_key_start(text[pos])) return false;
        while (pos < text.size() && gml_detail::is_key_char(text[pos])) ++pos;
        while (pos < text.size() && detail::is_blank(text[pos])) ++pos;
        if (pos >= text.size()) return false;
        if (text[pos] == '"') {
            auto close = text.find('"', pos + 1);
            if (close == std::string_view::npos) return false;
            pos = close + 1;
        } else if (text[pos] == '[') {
            int depth = 0;
            bool in_string = false;
            for (; pos < text.size(); ++pos) {
                char c = text[pos];
                if (in_string) {
                    if (c == '"') in_string = false;
                } else if (c == '"') {
                    in_string = true;
                } else if (c == '[') {
                    ++depth;
                } else if (c == ']' && --depth == 0) {
                    ++pos;
                    break;
                }
            }
        } else {
            while (pos < text.size() && !detail::is_blank(text[pos])) ++pos;
        }
    }
    return false;
}

} // namespace oga::formats
