#pragma once

// GraphML reader/writer.
//
// Data values are stored under their key's attr.name. The node/edge data named
// "label" and the edge data named "weight" fill the dedicated record fields.
// Everything needed to rebuild the document that is not graph content lives in
// graph_attrs under reserved keys:
//
//   graphml.root/<attr>                 attributes of <graphml> (besides the default xmlns)
//   graphml.graph/<attr>                attributes of <graph> (besides edgedefault)
//   graphml.key/<for>/<field>/<name>    key declaration details: field is "type",
//                                       "default", "xml" (value kept as raw markup)
//                                       or "@<xml-attribute>"
//   graphml.rootdata/<name>             <data> directly under <graphml>
//
// Extra XML attributes of <node>/<edge> are kept as "graphml/<attr>" entries in
// the record's attrs; the edge id attribute is kept as attrs["id"].

#include <oga/formats/common.hpp>
#include <oga/formats/xml.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace oga::formats::graphml_detail {

inline constexpr std::string_view namespace_uri = "http://graphml.graphdrawing.org/xmlns";
inline constexpr std::string_view root_prefix = "graphml.root/";
inline constexpr std::string_view graph_prefix = "graphml.graph/";
inline constexpr std::string_view key_prefix = "graphml.key/";
inline constexpr std::string_view rootdata_prefix = "graphml.rootdata/";
inline constexpr std::string_view element_attr_prefix = "graphml/";

inline bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

inline bool valid_xml_name(std::string_view s) {
    if (s.empty()) return false;
    auto start = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' ||
               static_cast<unsigned char>(c) >= 0x80;
    };
    if (!start(s[0])) return false;
    return std::all_of(s.begin() + 1, s.end(),
                       [&](char c) { return start(c) || detail::is_digit(c) || c == '-' || c == '.'; });
}

inline int domain_rank(std::string_view d) {
    if (d == "graphml") return 0;
    if (d == "graph") return 1;
    if (d == "node") return 2;
    if (d == "edge") return 3;
    if (d == "all") return 4;
    return -1;
}

struct KeyDecl {
    std::string domain;
    std::string name;
    bool raw = false;
};

class Reader {
public:
    Reader(std::string_view text, const ParseOptions& opts) : xml_(text), opts_(opts) {}

    ParseResult read() {
        auto root = xml_.read_document();
        if (root->local_name() != "graphml") xml_.lines().fail(root->offset, "root element must be <graphml>");
        for (const auto& [k, v] : root->attributes) {
            if (k == "xmlns" && v == namespace_uri) continue;
            graph_attrs_[std::string(root_prefix) + k] = v;
        }
        find_raw_keys(*root);

        const xml::Element* graph = nullptr;
        for (const auto& c : root->children) {
            if (!c.element) continue;
            const auto& el = *c.element;
            auto name = el.local_name();
            if (name == "key") read_key(el);
        }
        for (const auto& c : root->children) {
            if (!c.element) continue;
            const auto& el = *c.element;
            auto name = el.local_name();
            if (name == "key" || name == "desc") continue;
            if (name == "graph") {
                if (graph) {
                    if (opts_.strict) throw UnsupportedConstruct("multiple graphs in one GraphML document");
                    result_.dropped.add(loss::extra_graph, 1, "only the first graph of the document was read");
                    continue;
                }
                graph = &el;
            } else if (name == "data") {
                auto [dname, value] = read_data(el);
                graph_attrs_[std::string(rootdata_prefix) + dname] = value;
            } else {
                unknown(el);
            }
        }
        if (!graph) xml_.lines().fail(root->offset, "missing <graph> element");

        const std::string* ed = graph->attribute("edgedefault");
        bool directed = false;
        if (ed) {
            if (*ed == "directed") directed = true;
            else if (*ed != "undirected") xml_.lines().fail(graph->offset, "edgedefault must be directed or undirected");
        }
        for (const auto& [k, v] : graph->attributes)
            if (k != "edgedefault") graph_attrs_[std::string(graph_prefix) + k] = v;
        read_graph(*graph, true);

        for (std::size_t i = 0; i < edges_.size(); ++i) {
            if (!node_ids_.count(edges_[i].source))
                xml_.lines().fail(edge_offsets_[i], "edge source '" + edges_[i].source + "' names no node");
            if (!node_ids_.count(edges_[i].target))
                xml_.lines().fail(edge_offsets_[i], "edge target '" + edges_[i].target + "' names no node");
        }
        result_.graph = build_graph(directed, std::move(nodes_), std::move(edges_), std::move(graph_attrs_));
        return std::move(result_);
    }

private:
    void find_raw_keys(const xml::Element& el) {
        for (const auto& c : el.children) {
            if (!c.element) continue;
            if (c.element->local_name() == "data" && c.element->has_element_children()) {
                if (const auto* k = c.element->attribute("key")) raw_keys_.insert(*k);
            }
            if (c.element->local_name() == "key") {
                for (const auto& d : c.element->children)
                    if (d.element && d.element->local_name() == "default" && d.element->has_element_children())
                        if (const auto* k = c.element->attribute("id")) raw_keys_.insert(*k);
            }
            find_raw_keys(*c.element);
        }
    }

    std::string hint(const KeyDecl& d, std::string_view field) const {
        return std::string(key_prefix) + d.domain + "/" + std::string(field) + "/" + d.name;
    }

    void read_key(const xml::Element& el) {
        const std::string* id = el.attribute("id");
        if (!id) xml_.lines().fail(el.offset, "<key> without id");
        KeyDecl d;
        const std::string* dom = el.attribute("for");
        d.domain = dom ? *dom : "all";
        const std::string* name = el.attribute("attr.name");
        d.name = name ? *name : *id;
        d.raw = raw_keys_.count(*id) > 0;
        if (domain_rank(d.domain) < 0) {
            keys_[*id] = std::move(d);
            return;
        }
        const std::string* type = el.attribute("attr.type");
        if (type && *type != "string") graph_attrs_[hint(d, "type")] = *type;
        for (const auto& [k, v] : el.attributes) {
            if (k == "id" || k == "for" || k == "attr.name" || k == "attr.type") continue;
            graph_attrs_[hint(d, "@" + k)] = v;
        }
        for (const auto& c : el.children) {
            if (c.element && c.element->local_name() == "default") {
                const auto& def = *c.element;
                graph_attrs_[hint(d, "default")] =
                    d.raw || def.has_element_children()
                        ? std::string(xml_.source().substr(def.inner_begin, def.inner_end - def.inner_begin))
                        : def.text();
            }
        }
        if (d.raw) graph_attrs_[hint(d, "xml")] = "1";
        keys_[*id] = std::move(d);
    }

    std::pair<std::string, std::string> read_data(const xml::Element& el) {
        const std::string* key = el.attribute("key");
        if (!key) xml_.lines().fail(el.offset, "<data> without key attribute");
        auto it = keys_.find(*key);
        std::string name = it == keys_.end() ? *key : it->second.name;
        if (raw_keys_.count(*key))
            return {name, std::string(xml_.source().substr(el.inner_begin, el.inner_end - el.inner_begin))};
        return {name, el.text()};
    }

    void unknown(const xml::Element& el) {
        std::string name(el.local_name());
        if (opts_.strict) throw UnsupportedConstruct("<" + name + "> element");
        result_.dropped.add(loss::unknown_element, 1, "elements outside the supported GraphML subset");
    }

    void read_graph(const xml::Element& graph, bool top) {
        for (const auto& c : graph.children) {
            if (!c.element) continue;
            const auto& el = *c.element;
            auto name = el.local_name();
            if (name == "data") {
                auto [dname, value] = read_data(el);
                if (top) graph_attrs_[dname] = value;
            } else if (name == "node") {
                read_node(el);
            } else if (name == "edge") {
                read_edge(el);
            } else if (name == "hyperedge") {
                if (opts_.strict) throw UnsupportedConstruct("hyperedge");
                result_.dropped.add(loss::hyperedge, 1, "hyperedges are not part of the graph model");
            } else if (name != "desc") {
                unknown(el);
            }
        }
    }

    void read_node(const xml::Element& el) {
        NodeRecord n;
        const std::string* id = el.attribute("id");
        if (!id || id->empty()) xml_.lines().fail(el.offset, "<node> without id");
        n.id = *id;
        if (!node_ids_.insert(n.id).second) xml_.lines().fail(el.offset, "duplicate node id '" + n.id + "'");
        for (const auto& [k, v] : el.attributes)
            if (k != "id") n.attrs[std::string(element_attr_prefix) + k] = v;
        std::vector<const xml::Element*> nested;
        for (const auto& c : el.children) {
            if (!c.element) continue;
            const auto& child = *c.element;
            auto name = child.local_name();
            if (name == "data") {
                auto [dname, value] = read_data(child);
                if (dname == "label" && !n.label) n.label = value;
                else n.attrs[dname] = value;
            } else if (name == "port") {
                if (opts_.strict) throw UnsupportedConstruct("port");
                result_.dropped.add(loss::port, 1, "ports are not part of the graph model");
            } else if (name == "graph") {
                if (opts_.strict) throw UnsupportedConstruct("nested graph");
                result_.dropped.add(loss::nested_graph, 1, "nested graphs were flattened into the top-level graph");
                nested.push_back(&child);
            } else if (name != "desc") {
                unknown(child);
            }
        }
        nodes_.push_back(std::move(n));
        for (const auto* g : nested) read_graph(*g, false);
    }

    void read_edge(const xml::Element& el) {
        EdgeRecord e;
        const std::string* s = el.attribute("source");
        const std::string* t = el.attribute("target");
        if (!s || !t) xml_.lines().fail(el.offset, "<edge> without source or target");
        e.source = *s;
        e.target = *t;
        for (const auto& [k, v] : el.attributes) {
            if (k == "source" || k == "target") continue;
            if (k == "sourceport" || k == "targetport") {
                if (opts_.strict) throw UnsupportedConstruct("port");
                result_.dropped.add(loss::port, 1, "ports are not part of the graph model");
                continue;
            }
            if (k == "id") e.attrs["id"] = v;
            else e.attrs[std::string(element_attr_prefix) + k] = v;
        }
        for (const auto& c : el.children) {
            if (!c.element) continue;
            const auto& child = *c.element;
            auto name = child.local_name();
            if (name == "data") {
                auto [dname, value] = read_data(child);
                if (dname == "label" && !e.label) e.label = value;
                else if (dname == "weight" && !e.weight) e.weight = value;
                else e.attrs[dname] = value;
            } else if (name != "desc") {
                unknown(child);
            }
        }
        edges_.push_back(std::move(e));
        edge_offsets_.push_back(el.offset);
    }

    xml::Reader xml_;
    ParseOptions opts_;
    ParseResult result_;
    AttrMap graph_attrs_;
    std::unordered_map<std::string, KeyDecl> keys_;
    std::unordered_set<std::string> raw_keys_;
    std::unordered_set<std::string> node_ids_;
    std::vector<NodeRecord> nodes_;
    std::vector<EdgeRecord> edges_;
    std::vector<std::size_t> edge_offsets_;
};

struct KeyOut {
    std::string type = "string";
    std::optional<std::string> default_value;
    bool raw = false;
    std::map<std::string, std::string> extra;
    std::string id;
};

} // namespace oga::formats::graphml_detail

namespace oga::formats {

inline ParseResult parse_graphml(std::string_view text, const ParseOptions& opts = {}) {
    return graphml_detail::Reader(text, opts).read();
}

inline SerializeResult serialize_graphml(const Graph& g) {
    using namespace graphml_detail;
    SerializeResult out;
    std::size_t dropped_graph = 0, dropped_node = 0, dropped_edge = 0;

    // Sorted by (domain rank, name) so key ids are deterministic.
    using KeyName = std::pair<int, std::string>;
    std::map<KeyName, KeyOut> keys;
    std::vector<std::pair<std::string, std::string>> root_attrs, graph_el_attrs, graph_data, root_data;

    for (const auto& [k, v] : g.graph_attrs()) {
        if (starts_with(k, root_prefix)) {
            std::string name = k.substr(root_prefix.size());
            if (valid_xml_name(name)) root_attrs.emplace_back(name, v);
            else ++dropped_graph;
        } else if (starts_with(k, graph_prefix)) {
            std::string name = k.substr(graph_prefix.size());
            if (valid_xml_name(name) && name != "edgedefault") graph_el_attrs.emplace_back(name, v);
            else ++dropped_graph;
        } else if (starts_with(k, rootdata_prefix)) {
            root_data.emplace_back(k.substr(rootdata_prefix.size()), v);
        } else if (starts_with(k, key_prefix)) {
            std::string_view rest = std::string_view(k).substr(key_prefix.size());
            auto s1 = rest.find('/');
            auto s2 = s1 == std::string_view::npos ? s1 : rest.find('/', s1 + 1);
            int rank = s1 == std::string_view::npos ? -1 : domain_rank(rest.substr(0, s1));
            if (s2 == std::string_view::npos || rank < 0) {
                ++dropped_graph;
                continue;
            }
            std::string field(rest.substr(s1 + 1, s2 - s1 - 1));
            KeyOut& key = keys[{rank, std::string(rest.substr(s2 + 1))}];
            if (field == "type") key.type = v;
            else if (field == "default") key.default_value = v;
            else if (field == "xml") key.raw = true;
            else if (field.size() > 1 && field[0] == '@' && valid_xml_name(field.substr(1)) &&
                     field != "@id" && field != "@for" && field != "@attr.name" && field != "@attr.type")
                key.extra[field.substr(1)] = v;
            else ++dropped_graph;
        } else {
            graph_data.emplace_back(k, v);
        }
    }

    // A name hinted for the "all" domain is declared once and shared.
    auto key_for = [&](int rank, const std::string& name) -> KeyOut& {
        auto all = keys.find({4, name});
        if (all != keys.end()) return all->second;
        return keys[{rank, name}];
    };
    for (const auto& [name, _] : root_data) key_for(0, name);
    for (const auto& [name, _] : graph_data) key_for(1, name);

    struct ElementOut {
        std::vector<std::pair<std::string, std::string>> xml_attrs;
        std::vector<std::pair<std::string, const std::string*>> data;
    };
    std::vector<ElementOut> node_out(g.node_count()), edge_out(g.edge_count());
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto& n = g.nodes()[i];
        if (n.label) {
            key_for(2, "label");
            node_out[i].data.emplace_back("label", &*n.label);
        }
        for (const auto& [k, v] : n.attrs) {
            if (starts_with(k, element_attr_prefix)) {
                std::string name = k.substr(element_attr_prefix.size());
                if (valid_xml_name(name) && name != "id") node_out[i].xml_attrs.emplace_back(name, v);
                else ++dropped_node;
            } else if (k == "label") {
                ++dropped_node;
            } else {
                key_for(2, k);
                node_out[i].data.emplace_back(k, &v);
            }
        }
    }
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        const auto& e = g.edges()[i];
        if (e.label) {
            key_for(3, "label");
            edge_out[i].data.emplace_back("label", &*e.label);
        }
        if (e.weight) {
            key_for(3, "weight");
            edge_out[i].data.emplace_back("weight", &*e.weight);
        }
        for (const auto& [k, v] : e.attrs) {
            if (k == "id") {
                edge_out[i].xml_attrs.emplace_back("id", v);
            } else if (starts_with(k, element_attr_prefix)) {
                std::string name = k.substr(element_attr_prefix.size());
                if (valid_xml_name(name) && name != "id" && name != "source" && name != "target" &&
                    name != "sourceport" && name != "targetport")
                    edge_out[i].xml_attrs.emplace_back(name, v);
                else ++dropped_edge;
            } else if (k == "label" || k == "weight") {
                ++dropped_edge;
            } else {
                key_for(3, k);
                edge_out[i].data.emplace_back(k, &v);
            }
        }
    }

    static const char* domain_names[] = {"graphml", "graph", "node", "edge", "all"};
    std::size_t next_id = 0;
    for (auto& [kn, key] : keys) key.id = "d" + std::to_string(next_id++);
    auto id_of = [&](int rank, const std::string& name) -> const KeyOut& {
        auto all = keys.find({4, name});
        if (all != keys.end()) return all->second;
        return keys.at({rank, name});
    };

    std::string& s = out.bytes;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<graphml";
    bool custom_ns = false;
    for (const auto& [k, v] : root_attrs)
        if (k == "xmlns") custom_ns = true;
    if (!custom_ns) {
        s += " xmlns=\"";
        s += namespace_uri;
        s += '"';
    }
    for (const auto& [k, v] : root_attrs) s += " " + k + "=\"" + xml::escape(v, true) + "\"";
    s += ">\n";
    for (const auto& [kn, key] : keys) {
        s += "  <key id=\"" + key.id + "\" for=\"" + domain_names[kn.first] + "\" attr.name=\"" +
             xml::escape(kn.second, true) + "\" attr.type=\"" + xml::escape(key.type, true) + "\"";
        for (const auto& [k, v] : key.extra) s += " " + k + "=\"" + xml::escape(v, true) + "\"";
        if (key.default_value) {
            s += ">\n    <default>";
            s += key.raw ? *key.default_value : xml::escape(*key.default_value, false);
            s += "</default>\n  </key>\n";
        } else {
            s += "/>\n";
        }
    }
    auto write_data = [&](int indent, int rank, const std::string& name, const std::string& value) {
        const KeyOut& key = id_of(rank, name);
        s.append(static_cast<std::size_t>(indent) * 2, ' ');
        s += "<data key=\"" + key.id + "\">";
        s += key.raw ? value : xml::escape(value, false);
        s += "</data>\n";
    };
    for (const auto& [name, value] : root_data) write_data(1, 0, name, value);

    s += "  <graph edgedefault=\"";
    s += g.directed() ? "directed" : "undirected";
    s += '"';
    for (const auto& [k, v] : graph_el_attrs) s += " " + k + "=\"" + xml::escape(v, true) + "\"";
    s += ">\n";
    for (const auto& [name, value] : graph_data) write_data(2, 1, name, value);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        s += "    <node id=\"" + xml::escape(g.nodes()[i].id, true) + "\"";
        for (const auto& [k, v] : node_out[i].xml_attrs) s += " " + k + "=\"" + xml::escape(v, true) + "\"";
        if (node_out[i].data.empty()) {
            s += "/>\n";
            continue;
        }
        s += ">\n";
        for (const auto& [name, value] : node_out[i].data) write_data(3, 2, name, *value);
        s += "    </node>\n";
    }
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        const auto& e = g.edges()[i];
        s += "    <edge";
        for (const auto& [k, v] : edge_out[i].xml_attrs)
            if (k == "id") s += " id=\"" + xml::escape(v, true) + "\"";
        s += " source=\"" + xml::escape(e.source, true) + "\" target=\"" + xml::escape(e.target, true) + "\"";
        for (const auto& [k, v] : edge_out[i].xml_attrs)
            if (k != "id") s += " " + k + "=\"" + xml::escape(v, true) + "\"";
        if (edge_out[i].data.empty()) {
            s += "/>\n";
            continue;
        }
        s += ">\n";
        for (const auto& [name, value] : edge_out[i].data) write_data(3, 3, name, *value);
        s += "    </edge>\n";
    }
    s += "  </graph>\n</graphml>\n";

    out.report.add(loss::graph_attr, dropped_graph, "graph attributes not expressible in GraphML");
    out.report.add(loss::node_attr, dropped_node, "node attributes colliding with GraphML structure");
    out.report.add(loss::edge_attr, dropped_edge, "edge attributes colliding with GraphML structure");
    return out;
}

/// Sniff: the document is XML and its root element is <graphml>.
inline bool sniff_graphml(std::string_view text) {
    std::size_t pos = text.substr(0, 3) == "\xEF\xBB\xBF" ? 3 : 0;
    while (pos < text.size() && detail::is_blank(text[pos])) ++pos;
    if (pos >= text.size() || text[pos] != '<') return false;
    auto at = text.find("<graphml", pos);
    if (at == std::string_view::npos) return false;
    std::size_t after = at + 8;
    return after < text.size() && (detail::is_blank(text[after]) || text[after] == '>' || text[after] == '/');
}

} // namespace oga::formats
