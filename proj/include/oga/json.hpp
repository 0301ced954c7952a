#pragma once

#include <oga/analysis.hpp>
#include <oga/formats.hpp>
#include <oga/graph.hpp>
#include <oga/layout.hpp>
#include <oga/metadata.hpp>

#include <json.hpp>

#include <string>

/// JSON documents for the model types. Field names follow the C++ member names
/// so the stored documents and the HTTP bodies read the same.
namespace oga::json {

using nlohmann::json;

class InvalidDocument : public Error {
public:
    explicit InvalidDocument(const std::string& message) : Error("InvalidDocument", message) {}
};

namespace json_detail {

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    j[key] = v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> get_optional(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

inline AttrMap attrs_from(const json& j, const char* key) {
    AttrMap out;
    if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<AttrMap>();
    return out;
}

} // namespace json_detail

inline json to_json(const Graph& g) {
    json nodes = json::array(), edges = json::array();
    for (const auto& n : g.nodes()) {
        json node{{"id", n.id}};
        if (n.label) node["label"] = *n.label;
        if (!n.attrs.empty()) node["attrs"] = n.attrs;
        nodes.push_back(std::move(node));
    }
    for (const auto& e : g.edges()) {
        json edge{{"source", e.source}, {"target", e.target}};
        if (e.label) edge["label"] = *e.label;
        if (e.weight) edge["weight"] = *e.weight;
        if (!e.attrs.empty()) edge["attrs"] = e.attrs;
        edges.push_back(std::move(edge));
    }
    json out{{"directed", g.directed()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
    if (!g.graph_attrs().empty()) out["graph_attrs"] = g.graph_attrs();
    return out;
}

inline Graph graph_from_json(const json& j) {
    using namespace json_detail;
    try {
        std::vector<NodeRecord> nodes;
        for (const auto& n : j.at("nodes"))
            nodes.push_back({n.at("id").get<std::string>(), get_optional<std::string>(n, "label"), attrs_from(n, "attrs")});
        std::vector<EdgeRecord> edges;
        for (const auto& e : j.at("edges"))
            edges.push_back({e.at("source").get<std::string>(), e.at("target").get<std::string>(),
                             get_optional<std::string>(e, "label"), get_optional<std::string>(e, "weight"),
                             attrs_from(e, "attrs")});
        return build_graph(j.at("directed").get<bool>(), std::move(nodes), std::move(edges), attrs_from(j, "graph_attrs"));
    } catch (const nlohmann::json::exception& ex) {
        throw InvalidDocument(std::string("malformed graph document: ") + ex.what());
    }
}

inline json to_json(const analysis::PropertySet& p) {
    using json_detail::put_optional;
    json j{{"node_count", p.node_count}, {"edge_count", p.edge_count}, {"directed", p.directed},
           {"min_degree", p.min_degree}, {"max_degree", p.max_degree}, {"avg_degree", p.avg_degree}};
    put_optional(j, "density", p.density);
    put_optional(j, "has_self_loops", p.has_self_loops);
    put_optional(j, "has_multi_edges", p.has_multi_edges);
    put_optional(j, "is_connected", p.is_connected);
    put_optional(j, "connected_component_count", p.connected_component_count);
    put_optional(j, "is_bipartite", p.is_bipartite);
    put_optional(j, "is_acyclic", p.is_acyclic);
    put_optional(j, "biconnected_component_count", p.biconnected_component_count);
    put_optional(j, "is_planar", p.is_planar);
    put_optional(j, "vertex_connectivity", p.vertex_connectivity);
    put_optional(j, "crossing_number", p.crossing_number);
    j["analysis_skipped"] = p.analysis_skipped;
    j["skip_reason"] = p.skip_reason;
    j["skipped_fields"] = p.skipped_fields;
    return j;
}

inline analysis::PropertySet properties_from_json(const json& j) {
    using json_detail::get_optional;
    try {
        analysis::PropertySet p;
        p.node_count = j.at("node_count").get<std::size_t>();
        p.edge_count = j.at("edge_count").get<std::size_t>();
        p.directed = j.at("directed").get<bool>();
        p.min_degree = j.at("min_degree").get<double>();
        p.max_degree = j.at("max_degree").get<double>();
        p.avg_degree = j.at("avg_degree").get<double>();
        p.density = get_optional<double>(j, "density");
        p.has_self_loops = get_optional<bool>(j, "has_self_loops");
        p.has_multi_edges = get_optional<bool>(j, "has_multi_edges");
        p.is_connected = get_optional<bool>(j, "is_connected");
        p.connected_component_count = get_optional<std::size_t>(j, "connected_component_count");
        p.is_bipartite = get_optional<bool>(j, "is_bipartite");
        p.is_acyclic = get_optional<bool>(j, "is_acyclic");
        p.biconnected_component_count = get_optional<std::size_t>(j, "biconnected_component_count");
        p.is_planar = get_optional<bool>(j, "is_planar");
        p.vertex_connectivity = get_optional<std::size_t>(j, "vertex_connectivity");
        p.crossing_number = get_optional<std::int64_t>(j, "crossing_number");
        p.analysis_skipped = j.value("analysis_skipped", false);
        p.skip_reason = j.value("skip_reason", std::string());
        p.skipped_fields = j.value("skipped_fields", std::vector<std::string>{});
        return p;
    } catch (const nlohmann::json::exception& ex) {
        throw InvalidDocument(std::string("malformed property document: ") + ex.what());
    }
}

inline json to_json(const Tag& t) { return {{"value", t.value}, {"kind", to_string(t.kind)}}; }

inline json to_json(const Comment& c) {
    return {{"author", c.author}, {"at", format_timestamp(c.at)}, {"text", c.text}};
}

inline json to_json(const Reference& r) {
    return {{"kind", to_string(r.kind)}, {"citation_or_url", r.citation_or_url}};
}

inline json to_json(const Metadata& m) {
    using json_detail::put_optional;
    json j{{"name", m.name}, {"creator", m.creator}, {"uploaded_at", format_timestamp(m.uploaded_at)}};
    put_optional(j, "description", m.description);
    put_optional(j, "creation_method", m.creation_method);
    put_optional(j, "license", m.license);
    j["tags"] = json::array();
    for (const auto& t : m.tags) j["tags"].push_back(to_json(t));
    j["comments"] = json::array();
    for (const auto& c : m.comments) j["comments"].push_back(to_json(c));
    j["references"] = json::array();
    for (const auto& r : m.references) j["references"].push_back(to_json(r));
    return j;
}

/// A tag given as a bare string is freeform.
inline Tag tag_from_json(const json& j) {
    if (j.is_string()) return Tag::make(j.get<std::string>());
    if (!j.is_object() || !j.contains("value") || !j["value"].is_string())
        throw InvalidDocument("a tag is a string or {\"value\", \"kind\"}");
    TagKind kind = TagKind::freeform;
    if (j.contains("kind")) {
        auto k = j["kind"].is_string() ? parse_tag_kind(j["kind"].get<std::string>()) : std::nullopt;
        if (!k) throw InvalidDocument("unknown tag kind");
        kind = *k;
    }
    return Tag::make(j["value"].get<std::string>(), kind);
}

inline Reference reference_from_json(const json& j) {
    if (!j.is_object() || !j.contains("citation_or_url") || !j["citation_or_url"].is_string())
        throw InvalidDocument("a reference needs a citation_or_url string");
    Reference r;
    r.citation_or_url = j["citation_or_url"].get<std::string>();
    if (j.contains("kind")) {
        auto k = j["kind"].is_string() ? parse_reference_kind(j["kind"].get<std::string>()) : std::nullopt;
        if (!k) throw InvalidDocument("reference kind must be publication or website");
        r.kind = *k;
    }
    if (r.citation_or_url.empty()) throw InvalidDocument("a reference needs a non-empty citation_or_url");
    return r;
}

/// Reads the submitter-controlled part of Metadata: name, creator, description,
/// creation_method, license, tags and references. Timestamps and comments are
/// owned by the archive and ignored here.
inline Metadata metadata_from_json(const json& j) {
    if (!j.is_object()) throw InvalidDocument("metadata must be a JSON object");
    auto text = [&](const char* key) -> std::optional<std::string> {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) throw InvalidDocument(std::string(key) + " must be a string");
        return it->get<std::string>();
    };
    Metadata m;
    m.name = text("name").value_or("");
    m.creator = text("creator").value_or("");
    m.description = text("description");
    m.creation_method = text("creation_method");
    m.license = text("license");
    if (auto it = j.find("tags"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw InvalidDocument("tags must be an array");
        for (const auto& t : *it) m.tags.push_back(tag_from_json(t));
    }
    if (auto it = j.find("references"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw InvalidDocument("references must be an array");
        for (const auto& r : *it) m.references.push_back(reference_from_json(r));
    }
    return m;
}

inline MetadataPatch metadata_patch_from_json(const json& j) {
    if (!j.is_object()) throw InvalidDocument("metadata patch must be a JSON object");
    MetadataPatch p;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_string()) throw InvalidDocument(key + " must be a string");
        auto v = value.get<std::string>();
        if (key == "name") p.name = v;
        else if (key == "description") p.description = v;
        else if (key == "creation_method") p.creation_method = v;
        else if (key == "license") p.license = v;
        else throw InvalidDocument("field '" + key + "' cannot be patched");
    }
    return p;
}

inline json to_json(const layout::Layout& l) {
    json coords = json::object();
    for (const auto& [id, p] : l.coordinates) coords[id] = {p.x, p.y};
    json j{{"graph_id", l.graph_id}, {"algorithm", l.algorithm}, {"coordinates", std::move(coords)}};
    j["computed_at"] = l.computed_at ? json(format_timestamp(*l.computed_at)) : json(nullptr);
    return j;
}

inline layout::Layout layout_from_json(const json& j) {
    try {
        layout::Layout l;
        l.graph_id = j.at("graph_id").get<std::string>();
        l.algorithm = j.at("algorithm").get<std::string>();
        for (const auto& [id, p] : j.at("coordinates").items()) l.coordinates[id] = {p.at(0).get<double>(), p.at(1).get<double>()};
        if (auto s = json_detail::get_optional<std::string>(j, "computed_at")) l.computed_at = parse_timestamp(*s);
        return l;
    } catch (const nlohmann::json::exception& ex) {
        throw InvalidDocument(std::string("malformed layout document: ") + ex.what());
    }
}

inline json to_json(const formats::LossReport& r) {
    json items = json::array();
    for (const auto& item : r.dropped_items)
        items.push_back({{"kind", item.kind}, {"count", item.count}, {"message", item.message}});
    return {{"lossless", r.lossless()}, {"dropped_items", std::move(items)}};
}

inline formats::LossReport loss_report_from_json(const json& j) {
    formats::LossReport r;
    try {
        for (const auto& item : j.at("dropped_items"))
            r.dropped_items.push_back({item.at("kind").get<std::string>(), item.at("count").get<std::size_t>(),
                                       item.value("message", std::string())});
    } catch (const nlohmann::json::exception& ex) {
        throw InvalidDocument(std::string("malformed loss report: ") + ex.what());
    }
    return r;
}

} // namespace oga::json
