#pragma once

#include <oga/formats/common.hpp>
#include <oga/formats/dimacs.hpp>
#include <oga/formats/gml.hpp>
#include <oga/formats/graphml.hpp>
#include <oga/formats/matrix_market.hpp>

#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace oga::formats {

struct Codec {
    FormatId id;
    /// File extension without the dot, used for exports.
    std::string extension;
    std::function<bool(std::string_view)> sniff;
    std::function<ParseResult(std::string_view, const ParseOptions&)> parse;
    std::function<SerializeResult(const Graph&)> serialize;
};

/// Process-wide table of known formats. The four built-in codecs are always
/// present; further formats can be added with add().
class Registry {
public:
    static Registry& instance() {
        static Registry r;
        return r;
    }

    void add(Codec codec) {
        std::unique_lock lock(mutex_);
        for (auto& c : codecs_) {
            if (c.id == codec.id) {
                c = std::move(codec);
                return;
            }
        }
        codecs_.push_back(std::move(codec));
    }

    const Codec* find(const FormatId& id) const {
        std::shared_lock lock(mutex_);
        for (const auto& c : codecs_)
            if (c.id == id) return &c;
        return nullptr;
    }

    const Codec& get(const FormatId& id) const {
        if (const Codec* c = find(id)) return *c;
        throw UnknownFormat("unknown format '" + id.name + "'");
    }

    std::vector<FormatId> ids() const {
        std::shared_lock lock(mutex_);
        std::vector<FormatId> out;
        for (const auto& c : codecs_) out.push_back(c.id);
        return out;
    }

    std::vector<FormatId> sniff_all(std::string_view bytes) const {
        std::shared_lock lock(mutex_);
        std::vector<FormatId> out;
        for (const auto& c : codecs_)
            if (c.sniff && c.sniff(bytes)) out.push_back(c.id);
        return out;
    }

private:
    Registry() {
        codecs_.push_back({gml, "gml", sniff_gml, parse_gml, serialize_gml});
        codecs_.push_back({graphml, "graphml", sniff_graphml, parse_graphml, serialize_graphml});
        codecs_.push_back({dimacs, "dimacs", sniff_dimacs, parse_dimacs, serialize_dimacs});
        codecs_.push_back({matrix_market, "mtx", sniff_matrix_market, parse_matrix_market, serialize_matrix_market});
    }

    mutable std::shared_mutex mutex_;
    // deque: references from find() survive later add() calls
    std::deque<Codec> codecs_;
};

inline std::optional<FormatId> parse_format_name(std::string_view name) {
    for (const auto& id : Registry::instance().ids())
        if (id.name == name) return id;
    if (name == "mtx" || name == "mm" || name == "matrixmarket") return matrix_market;
    if (name == "col") return dimacs;
    return std::nullopt;
}

inline FormatId format_from_extension(std::string_view path) {
    auto dot = path.rfind('.');
    if (dot == std::string_view::npos) throw UnknownFormat("cannot infer a format from '" + std::string(path) + "'");
    std::string_view ext = path.substr(dot + 1);
    for (const auto& id : Registry::instance().ids())
        if (Registry::instance().get(id).extension == ext) return id;
    if (auto id = parse_format_name(ext)) return *id;
    throw UnknownFormat("cannot infer a format from '" + std::string(path) + "'");
}

/// Parses `bytes` in `format`. Throws SyntaxError or UnsupportedConstruct.
inline ParseResult parse_with_report(std::string_view bytes, const FormatId& format, const ParseOptions& opts = {}) {
    if (bytes.empty()) throw SyntaxError(1, 1, "empty input");
    return Registry::instance().get(format).parse(bytes, opts);
}

inline Graph parse(std::string_view bytes, const FormatId& format, const ParseOptions& opts = {}) {
    return parse_with_report(bytes, format, opts).graph;
}

inline SerializeResult serialize(const Graph& g, const FormatId& format) {
    return Registry::instance().get(format).serialize(g);
}

/// Exactly one sniff rule must match.
inline FormatId detect_format(std::string_view bytes) {
    if (bytes.empty()) throw UnknownFormat("empty input");
    auto hits = Registry::instance().sniff_all(bytes);
    if (hits.empty()) throw UnknownFormat("no known format matches the input");
    if (hits.size() > 1) {
        std::string names;
        for (const auto& h : hits) names += (names.empty() ? "" : ", ") + h.name;
        throw UnknownFormat("input matches several formats: " + names);
    }
    return hits.front();
}

/// serialize(parse(bytes, from), to). The report also carries what lenient
/// parsing dropped.
inline SerializeResult convert(std::string_view bytes, const FormatId& from, const FormatId& to,
                               const ParseOptions& opts = {}) {
    auto parsed = parse_with_report(bytes, from, opts);
    auto out = serialize(parsed.graph, to);
    for (const auto& item : parsed.dropped.dropped_items) out.report.add(item.kind, item.count, item.message);
    return out;
}

} // namespace oga::formats
