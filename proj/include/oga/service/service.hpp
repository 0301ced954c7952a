#pragma once

#include <oga/archive/store.hpp>
#include <oga/json.hpp>
#include <oga/service/worker.hpp>

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>

namespace oga::service {

using json = nlohmann::json;
namespace codec = oga::json;

struct ServiceConfig {
    std::filesystem::path data_dir = "oga-data";
    std::string listen_host = "127.0.0.1";
    /// 0 picks a free port.
    int listen_port = 8080;
    /// Writes need no token.
    bool open_mode = false;
    std::size_t max_upload_bytes = 64u << 20;
    /// Uploads must carry license_ack=true.
    bool require_license_ack = false;
    WorkerConfig worker;
    archive::ArchiveConfig archive;
    bool access_log = false;
    /// Off in tests that drive the queue with Worker::drain().
    bool background_worker = true;
};

namespace service_detail {

inline bool truthy(std::string_view v) { return v == "1" || v == "true" || v == "yes" || v == "on"; }

inline std::size_t parse_size(const std::string& name, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long n = 0;
    try {
        n = std::stoull(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty() || v.front() == '-') throw InvalidConfig(name + " must be a non-negative integer");
    return static_cast<std::size_t>(n);
}

} // namespace service_detail

/// Splits "host:port"; a bare port binds to 127.0.0.1.
inline std::pair<std::string, int> parse_listen_addr(const std::string& addr) {
    auto colon = addr.rfind(':');
    std::string host = colon == std::string::npos ? "127.0.0.1" : addr.substr(0, colon);
    std::string port = colon == std::string::npos ? addr : addr.substr(colon + 1);
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    if (host.empty()) host = "0.0.0.0";
    std::size_t p = service_detail::parse_size("listen port", port);
    if (p > 65535) throw InvalidConfig("listen port out of range");
    return {host, static_cast<int>(p)};
}

/// Reads OGA_DATA_DIR, OGA_LISTEN_ADDR, OGA_OPEN_MODE, OGA_VERTEX_THRESHOLD,
/// OGA_TIME_BUDGET_MS, OGA_MAX_UPLOAD_BYTES, OGA_LAYOUT_NODE_LIMIT,
/// OGA_WORKER_THREADS and OGA_REQUIRE_LICENSE_ACK on top of `base`.
inline ServiceConfig config_from_env(ServiceConfig base = {}) {
    using service_detail::parse_size;
    auto env = [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (!v || !*v) return std::nullopt;
        return std::string(v);
    };
    if (auto v = env("OGA_DATA_DIR")) base.data_dir = *v;
    if (auto v = env("OGA_LISTEN_ADDR")) std::tie(base.listen_host, base.listen_port) = parse_listen_addr(*v);
    if (auto v = env("OGA_OPEN_MODE")) base.open_mode = service_detail::truthy(*v);
    if (auto v = env("OGA_VERTEX_THRESHOLD")) base.worker.analysis.vertex_threshold = parse_size("OGA_VERTEX_THRESHOLD", *v);
    if (auto v = env("OGA_TIME_BUDGET_MS"))
        base.worker.analysis.time_budget = std::chrono::milliseconds(parse_size("OGA_TIME_BUDGET_MS", *v));
    if (auto v = env("OGA_MAX_UPLOAD_BYTES")) base.max_upload_bytes = parse_size("OGA_MAX_UPLOAD_BYTES", *v);
    if (auto v = env("OGA_LAYOUT_NODE_LIMIT")) base.worker.layout_node_limit = parse_size("OGA_LAYOUT_NODE_LIMIT", *v);
    if (auto v = env("OGA_WORKER_THREADS")) base.worker.threads = parse_size("OGA_WORKER_THREADS", *v);
    if (auto v = env("OGA_REQUIRE_LICENSE_ACK")) base.require_license_ack = service_detail::truthy(*v);
    analysis::validate(base.worker.analysis);
    return base;
}

// ---- search parameters --------------------------------------------------

struct SearchRequest {
    archive::SearchQuery query;
    std::size_t page = 1;
    std::size_t page_size = 50;
};

namespace service_detail {

inline double parse_number(const std::string& key, const std::string& v) {
    char* end = nullptr;
    double x = v.empty() ? 0 : std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x)) throw archive::InvalidQuery("'" + key + "' needs a number, got '" + v + "'");
    return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw archive::InvalidQuery("'" + key + "' must be true or false, got '" + v + "'");
}

inline Timestamp parse_date(const std::string& key, const std::string& v, bool end_of_day) {
    auto t = parse_timestamp(v);
    if (!t) throw archive::InvalidQuery("'" + key + "' needs a date (YYYY-MM-DD or ISO 8601), got '" + v + "'");
    if (end_of_day && v.size() == 10) *t += std::chrono::milliseconds(86'400'000 - 1);
    return *t;
}

inline bool contains(const std::vector<std::string>& names, const std::string& name) {
    return std::find(names.begin(), names.end(), name) != names.end();
}

} // namespace service_detail

/// Maps URL parameters to a conjunctive query:
///   tag=<t> (repeatable), q=<text> (name, creator or description),
///   name= / creator= / description= (substring of that field),
///   min_nodes= / max_nodes= / min_edges= / max_edges=,
///   min_<numeric property>= / max_<numeric property>=,
///   planar= / connected= / bipartite= / acyclic= / directed= and
///   <boolean property>= (true or false),
///   from= / to= (dates, inclusive), all=true, page=, page_size=.
/// Unrecognized parameters are rejected with UnknownProperty.
inline SearchRequest search_request_from_params(const std::multimap<std::string, std::string>& params) {
    using namespace service_detail;
    static const std::map<std::string, std::string> numeric_alias{{"nodes", "node_count"}, {"edges", "edge_count"}};
    static const std::map<std::string, std::string> bool_alias{
        {"planar", "is_planar"}, {"connected", "is_connected"}, {"bipartite", "is_bipartite"},
        {"acyclic", "is_acyclic"}, {"directed", "directed"}};
    SearchRequest r;
    std::map<std::string, archive::NumericRange> ranges;
    std::vector<std::string> range_order;
    archive::UploadedBetween dates;
    for (const auto& [key, value] : params) {
        if (key == "tag") {
            r.query.criteria.push_back(archive::TagEquals{value});
        } else if (key == "q") {
            r.query.criteria.push_back(archive::TextContains{archive::TextField::any, value});
        } else if (key == "name") {
            r.query.criteria.push_back(archive::TextContains{archive::TextField::name, value});
        } else if (key == "creator") {
            r.query.criteria.push_back(archive::TextContains{archive::TextField::creator, value});
        } else if (key == "description") {
            r.query.criteria.push_back(archive::TextContains{archive::TextField::description, value});
        } else if (key == "from") {
            dates.from = parse_date(key, value, false);
        } else if (key == "to") {
            dates.to = parse_date(key, value, true);
        } else if (key == "all") {
            r.query.all = parse_bool(key, value);
        } else if (key == "page") {
            r.page = static_cast<std::size_t>(parse_number(key, value));
            if (parse_number(key, value) < 1) throw archive::InvalidQuery("page starts at 1");
        } else if (key == "page_size") {
            double n = parse_number(key, value);
            if (n < 1 || n > static_cast<double>(archive::max_page_size))
                throw archive::InvalidQuery("page_size must be between 1 and " + std::to_string(archive::max_page_size));
            r.page_size = static_cast<std::size_t>(n);
        } else if (key.starts_with("min_") || key.starts_with("max_")) {
            std::string prop = key.substr(4);
            if (auto a = numeric_alias.find(prop); a != numeric_alias.end()) prop = a->second;
            if (!contains(archive::numeric_property_names(), prop)) throw archive::UnknownProperty("unknown numeric property in '" + key + "'");
            auto [it, fresh] = ranges.try_emplace(prop, archive::NumericRange{prop, std::nullopt, std::nullopt});
            if (fresh) range_order.push_back(prop);
            double x = parse_number(key, value);
            if (key[1] == 'i') it->second.low = it->second.low ? std::max(*it->second.low, x) : x;
            else it->second.high = it->second.high ? std::min(*it->second.high, x) : x;
        } else if (auto a = bool_alias.find(key); a != bool_alias.end()) {
            r.query.criteria.push_back(archive::BooleanEquals{a->second, parse_bool(key, value)});
        } else if (contains(archive::boolean_property_names(), key)) {
            r.query.criteria.push_back(archive::BooleanEquals{key, parse_bool(key, value)});
        } else {
            throw archive::UnknownProperty("unknown search parameter '" + key + "'");
        }
    }
    for (const auto& prop : range_order) r.query.criteria.push_back(ranges[prop]);
    if (dates.from || dates.to) r.query.criteria.push_back(dates);
    if (r.query.criteria.empty() && !r.query.all)
        throw archive::InvalidQuery("give at least one search criterion, or all=true to list everything");
    return r;
}

// ---- comparison ---------------------------------------------------------

enum class Tally { none, some, all };

inline std::string_view to_string(Tally t) {
    switch (t) {
    case Tally::none: return "none";
    case Tally::some: return "some";
    case Tally::all: return "all";
    }
    return "none";
}

struct ComparisonRow {
    std::string property;
    std::vector<json> values;
    /// Boolean rows only: how many of the compared graphs have the property.
    std::optional<Tally> tally;
};

struct ComparisonView {
    std::vector<archive::GraphId> ids;
    std::vector<ComparisonRow> rows;
};

/// One row per property; a boolean row's tally counts graphs whose value is
/// true (an unknown value does not count as having the property).
inline ComparisonView compare_properties(const std::vector<std::pair<archive::GraphId, analysis::PropertySet>>& graphs) {
    static const std::vector<std::string> order{
        "node_count", "edge_count", "directed", "min_degree", "max_degree", "avg_degree", "density",
        "has_self_loops", "has_multi_edges", "is_connected", "connected_component_count", "is_bipartite", "is_acyclic",
        "biconnected_component_count", "is_planar", "vertex_connectivity", "crossing_number"};
    ComparisonView view;
    std::vector<json> docs;
    for (const auto& [id, props] : graphs) {
        view.ids.push_back(id);
        docs.push_back(codec::to_json(props));
    }
    for (const auto& name : order) {
        ComparisonRow row{name, {}, std::nullopt};
        bool boolean = service_detail::contains(archive::boolean_property_names(), name);
        std::size_t yes = 0;
        for (const auto& d : docs) {
            row.values.push_back(d.value(name, json(nullptr)));
            if (boolean && row.values.back().is_boolean() && row.values.back().get<bool>()) ++yes;
        }
        if (boolean) row.tally = yes == 0 ? Tally::none : yes == docs.size() ? Tally::all : Tally::some;
        view.rows.push_back(std::move(row));
    }
    return view;
}

inline json to_json(const ComparisonView& v) {
    json rows = json::array();
    for (const auto& r : v.rows) {
        json row{{"property", r.property}, {"values", r.values}};
        if (r.tally) row["tally"] = to_string(*r.tally);
        rows.push_back(std::move(row));
    }
    return {{"ids", v.ids}, {"rows", std::move(rows)}};
}

// ---- HTTP ---------------------------------------------------------------

inline int http_status_for(const Error& e) {
    const auto& k = e.kind();
    if (k == "NotFound") return 404;
    if (k == "Gone") return 410;
    if (k == "DuplicateMember" || k == "InvalidTransition" || k == "NotReady") return 409;
    if (k == "FieldNotUserSettable" || k == "Forbidden") return 403;
    if (k == "Unauthorized") return 401;
    if (k == "StorageFull") return 507;
    if (k == "StorageError") return 500;
    return 400;
}

class HttpError : public Error {
public:
    HttpError(std::string kind, const std::string& message) : Error(std::move(kind), message) {}
};

/// The HTTP API and its background worker over one archive directory.
class Service {
public:
    explicit Service(ServiceConfig cfg)
        : cfg_(std::move(cfg)), store_(cfg_.data_dir, cfg_.archive), worker_(store_, cfg_.worker) {
        routes();
    }
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;
    ~Service() { stop(); }

    archive::Archive& archive() noexcept { return store_; }
    Worker& worker() noexcept { return worker_; }
    const ServiceConfig& config() const noexcept { return cfg_; }

    /// Binds the listening socket and returns the port.
    int bind() {
        if (cfg_.listen_port == 0) port_ = server_.bind_to_any_port(cfg_.listen_host);
        else port_ = server_.bind_to_port(cfg_.listen_host, cfg_.listen_port) ? cfg_.listen_port : -1;
        if (port_ < 0)
            throw InvalidConfig("cannot listen on " + cfg_.listen_host + ":" + std::to_string(cfg_.listen_port));
        return port_;
    }

    /// Starts the worker and serves until stop().
    void run() {
        if (port_ < 0) bind();
        if (cfg_.background_worker) worker_.start();
        server_.listen_after_bind();
    }

    /// run() on a background thread; returns once the server accepts connections.
    int start() {
        int port = bind();
        if (cfg_.background_worker) worker_.start();
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port;
    }

    /// Makes run() return; only closes the listening socket, so it may be
    /// called from a signal handler.
    void stop_listening() { server_.stop(); }

    void stop() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
        worker_.stop();
    }

    int port() const noexcept { return port_; }

private:
    using Req = httplib::Request;
    using Res = httplib::Response;

    static void send_json(Res& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(2) + "\n", "application/json");
    }

    static void send_error(Res& res, const Error& e) {
        json body{{"error", e.kind()}, {"message", e.what()}};
        if (auto* pf = dynamic_cast<const archive::ParseFailed*>(&e)) {
            body["cause"] = pf->cause();
            body["line"] = pf->line() ? json(*pf->line()) : json(nullptr);
            body["column"] = pf->column() ? json(*pf->column()) : json(nullptr);
        }
        send_json(res, http_status_for(e), body);
        if (res.status == 401) res.set_header("WWW-Authenticate", "Bearer");
    }

    /// Wraps a handler with error mapping.
    template <class F>
    httplib::Server::Handler guarded(F f) {
        return [f = std::move(f)](const Req& req, Res& res) {
            try {
                f(req, res);
            } catch (const Error& e) {
                send_error(res, e);
            } catch (const nlohmann::json::exception& e) {
                send_error(res, codec::InvalidDocument(std::string("malformed JSON body: ") + e.what()));
            } catch (const std::exception& e) {
                send_json(res, 500, {{"error", "InternalError"}, {"message", e.what()}});
            }
        };
    }

    /// Token owner; in open mode unauthenticated callers act as "guest".
    std::string require_writer(const Req& req) {
        std::string header = req.get_header_value("Authorization");
        std::string token;
        if (header.starts_with("Bearer ")) token = header.substr(7);
        if (!token.empty()) {
            if (auto owner = store_.authenticate(token)) return *owner;
            throw HttpError("Unauthorized", "invalid API token");
        }
        if (cfg_.open_mode) return "guest";
        throw HttpError("Unauthorized", "this operation needs an API token (Authorization: Bearer <token>)");
    }

    static std::string uri_of(const archive::GraphId& id) { return "/graphs/" + id; }

    static json parse_body(const Req& req) {
        if (req.body.empty()) throw codec::InvalidDocument("expected a JSON body");
        return json::parse(req.body);
    }

    json summary_json(const archive::RecordSummary& s) {
        json tags = json::array();
        for (const auto& t : s.tags) tags.push_back(codec::to_json(t));
        return {{"id", s.id},
                {"uri", uri_of(s.id)},
                {"name", s.name},
                {"creator", s.creator},
                {"uploaded_at", format_timestamp(s.uploaded_at)},
                {"tags", std::move(tags)},
                {"status", archive::to_string(s.status)},
                {"node_count", s.node_count},
                {"edge_count", s.edge_count},
                {"directed", s.directed},
                {"is_planar", s.is_planar ? json(*s.is_planar) : json(nullptr)},
                {"is_connected", s.is_connected ? json(*s.is_connected) : json(nullptr)},
                {"thumbnail", s.has_image ? json(uri_of(s.id) + "/image.svg") : json(nullptr)}};
    }

    json record_json(const archive::GraphRecord& r, bool include_graph) {
        json j{{"id", r.id},
               {"uri", uri_of(r.id)},
               {"status", archive::to_string(r.status)},
               {"status_message", r.status_message},
               {"original_format", r.original_format.name},
               {"original_size", r.original_size},
               {"owner", r.owner},
               {"metadata", codec::to_json(r.metadata)},
               {"node_count", r.canonical.node_count()},
               {"edge_count", r.canonical.edge_count()},
               {"directed", r.canonical.directed()},
               {"parse_report", codec::to_json(r.parse_report)},
               {"properties", r.properties ? codec::to_json(*r.properties) : json(nullptr)},
               {"crossing_number", r.crossing_number ? json(*r.crossing_number) : json(nullptr)},
               {"image", r.layout ? json(uri_of(r.id) + "/image.svg") : json(nullptr)},
               {"download", uri_of(r.id) + "/download"},
               {"deleted_at", r.deleted_at ? json(format_timestamp(*r.deleted_at)) : json(nullptr)}};
        if (include_graph) j["graph"] = codec::to_json(r.canonical);
        return j;
    }

    formats::FormatId format_param(const std::string& name) {
        auto f = formats::parse_format_name(name);
        if (!f) throw UnknownFormat("unknown format '" + name + "'");
        return *f;
    }

    static std::vector<std::string> split_ids(const std::string& list) {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (start <= list.size()) {
            auto comma = list.find(',', start);
            std::string part = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!part.empty()) out.push_back(part);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    void handle_upload(const Req& req, Res& res) {
        std::string owner = require_writer(req);
        std::string bytes, filename;
        Metadata meta;
        std::optional<formats::FormatId> format;
        bool license_ack = false;
        if (req.has_param("format")) format = format_param(req.get_param_value("format"));
        if (req.is_multipart_form_data()) {
            if (!req.has_file("file")) throw codec::InvalidDocument("multipart upload needs a 'file' part");
            auto file = req.get_file_value("file");
            bytes = file.content;
            filename = file.filename;
            if (req.has_file("metadata")) meta = codec::metadata_from_json(json::parse(req.get_file_value("metadata").content));
            if (req.has_file("format")) format = format_param(req.get_file_value("format").content);
            if (req.has_file("license_ack")) license_ack = service_detail::truthy(req.get_file_value("license_ack").content);
        } else {
            bytes = req.body;
            filename = req.get_param_value("filename");
            auto text = [&](const char* key) -> std::optional<std::string> {
                if (!req.has_param(key)) return std::nullopt;
                return req.get_param_value(key);
            };
            meta.name = text("name").value_or("");
            meta.creator = text("creator").value_or("");
            meta.description = text("description");
            meta.creation_method = text("creation_method");
            meta.license = text("license");
            for (std::size_t i = 0; i < req.get_param_value_count("tag"); ++i) meta.tags.push_back(Tag::make(req.get_param_value("tag", i)));
            for (std::size_t i = 0; i < req.get_param_value_count("reference"); ++i)
                meta.references.push_back({ReferenceKind::website, req.get_param_value("reference", i)});
        }
        if (req.has_param("license_ack")) license_ack = service_detail::truthy(req.get_param_value("license_ack"));
        if (cfg_.require_license_ack && !license_ack)
            throw HttpError("LicenseNotAcknowledged", "uploads must confirm license_ack=true (the submitter takes responsibility for the data)");
        if (bytes.empty()) throw archive::ParseFailed("SyntaxError", "empty upload", 1, 1);
        if (meta.creator.empty()) meta.creator = owner;
        if (!format) {
            try {
                format = formats::detect_format(bytes);
            } catch (const UnknownFormat& ex) {
                if (filename.empty()) throw archive::ParseFailed("UnknownFormat", std::string(ex.what()) + "; pass ?format=");
                try {
                    format = formats::format_from_extension(filename);
                } catch (const UnknownFormat&) {
                    throw archive::ParseFailed("UnknownFormat", std::string(ex.what()) + "; pass ?format=");
                }
            }
        }
        auto id = store_.put_graph(bytes, *format, std::move(meta), owner);
        worker_.notify();
        res.set_header("Location", uri_of(id));
        send_json(res, 201, {{"id", id},
                             {"uri", uri_of(id)},
                             {"status", "pending-analysis"},
                             {"format", format->name},
                             {"parse_report", codec::to_json(store_.get_record(id).parse_report)}});
    }

    void routes() {
        server_.set_payload_max_length(cfg_.max_upload_bytes);
        if (cfg_.access_log)
            server_.set_logger([](const Req& req, const Res& res) {
                std::cerr << req.method << " " << req.path << " " << res.status << "\n";
            });

        server_.Get("/healthz", guarded([this](const Req&, Res& res) {
            send_json(res, 200, {{"status", "ok"}, {"records", store_.record_count()}, {"queued_jobs", store_.pending_job_count()}});
        }));

        server_.Post("/graphs", guarded([this](const Req& req, Res& res) { handle_upload(req, res); }));

        server_.Get("/graphs/:id", guarded([this](const Req& req, Res& res) {
            auto r = store_.get_record(req.path_params.at("id"));
            bool include = req.has_param("include") && req.get_param_value("include") == "graph";
            send_json(res, r.deleted_at ? 410 : 200, record_json(r, include));
        }));

        server_.Delete("/graphs/:id", guarded([this](const Req& req, Res& res) {
            require_writer(req);
            const auto& id = req.path_params.at("id");
            store_.delete_graph(id);
            send_json(res, 200, {{"id", id}, {"deleted", true}});
        }));

        server_.Get("/graphs/:id/properties", guarded([this](const Req& req, Res& res) {
            auto r = store_.get_record(req.path_params.at("id"));
            send_json(res, 200,
                      {{"id", r.id},
                       {"status", archive::to_string(r.status)},
                       {"status_message", r.status_message},
                       {"properties", r.properties ? codec::to_json(*r.properties) : json(nullptr)},
                       {"crossing_number", r.crossing_number ? json(*r.crossing_number) : json(nullptr)}});
        }));

        server_.Post("/graphs/:id/properties", guarded([this](const Req& req, Res& res) {
            require_writer(req);
            const auto& id = req.path_params.at("id");
            auto body = parse_body(req);
            if (!body.is_object()) throw codec::InvalidDocument("expected an object of property values");
            for (const auto& [name, value] : body.items()) {
                if (!value.is_number_integer()) {
                    store_.set_user_property(id, name, 0);  // raises for names users cannot set
                    throw codec::InvalidDocument(name + " must be an integer");
                }
                store_.set_user_property(id, name, value.get<std::int64_t>());
            }
            send_json(res, 200, {{"id", id}, {"crossing_number", store_.get_record(id).crossing_number.value_or(-1)}});
        }));

        server_.Get("/graphs/:id/download", guarded([this](const Req& req, Res& res) {
            const auto& id = req.path_params.at("id");
            auto [bytes, original] = store_.get_original_bytes(id);
            formats::FormatId format = req.has_param("format") ? format_param(req.get_param_value("format")) : original;
            formats::SerializeResult out;
            if (format == original) out.bytes = std::move(bytes);
            else out = formats::serialize(store_.get_record(id).canonical, format);
            const auto& codec = formats::Registry::instance().get(format);
            res.set_header("X-OGA-Format", format.name);
            res.set_header("X-OGA-Loss-Report", codec::to_json(out.report).dump());
            res.set_header("Content-Disposition", "attachment; filename=\"" + id + "." + codec.extension + "\"");
            res.status = 200;
            res.set_content(out.bytes, format == formats::graphml ? "application/xml" : "text/plain; charset=utf-8");
        }));

        server_.Get("/graphs/:id/image.svg", guarded([this](const Req& req, Res& res) {
            const auto& id = req.path_params.at("id");
            auto svg = store_.get_svg(id);
            if (!svg) {
                auto s = store_.get_summary(id);
                if (s.status == archive::Status::pending_analysis)
                    throw HttpError("NotReady", "the drawing is computed in the background; try again shortly");
                throw archive::NotFound("drawing of graph " + id + " (layout is skipped for graphs over " +
                                        std::to_string(cfg_.worker.layout_node_limit) + " nodes)");
            }
            res.status = 200;
            res.set_content(*svg, "image/svg+xml");
        }));

        server_.Patch("/graphs/:id/metadata", guarded([this](const Req& req, Res& res) {
            require_writer(req);
            const auto& id = req.path_params.at("id");
            auto body = parse_body(req);
            if (!body.is_object()) throw codec::InvalidDocument("metadata patch must be a JSON object");
            std::optional<std::vector<Tag>> tags;
            if (body.contains("tags")) {
                if (!body["tags"].is_array()) throw codec::InvalidDocument("tags must be an array");
                tags.emplace();
                for (const auto& t : body["tags"]) tags->push_back(codec::tag_from_json(t));
                body.erase("tags");
            }
            auto patch = codec::metadata_patch_from_json(body);
            if (!store_.exists(id)) throw archive::NotFound("graph " + id);
            if (tags) store_.set_tags(id, *tags);
            store_.update_metadata(id, patch);
            send_json(res, 200, codec::to_json(store_.get_record(id).metadata));
        }));

        server_.Post("/graphs/:id/comments", guarded([this](const Req& req, Res& res) {
            std::string author = require_writer(req);
            auto body = parse_body(req);
            if (!body.is_object() || !body.contains("text") || !body["text"].is_string())
                throw codec::InvalidDocument("a comment needs a 'text' string");
            if (author == "guest" && body.contains("author") && body["author"].is_string()) author = body["author"].get<std::string>();
            auto c = store_.add_comment(req.path_params.at("id"), author, body["text"].get<std::string>());
            send_json(res, 201, codec::to_json(c));
        }));

        server_.Post("/graphs/:id/references", guarded([this](const Req& req, Res& res) {
            require_writer(req);
            auto ref = codec::reference_from_json(parse_body(req));
            store_.add_reference(req.path_params.at("id"), ref);
            send_json(res, 201, codec::to_json(ref));
        }));

        server_.Get("/search", guarded([this](const Req& req, Res& res) {
            auto sr = search_request_from_params(req.params);
            auto page = store_.search(sr.query, sr.page, sr.page_size);
            json results = json::array();
            for (const auto& id : page.ids) results.push_back(summary_json(store_.get_summary(id)));
            send_json(res, 200, {{"total", page.total}, {"page", sr.page}, {"page_size", sr.page_size}, {"results", std::move(results)}});
        }));

        server_.Get("/compare", guarded([this](const Req& req, Res& res) {
            auto ids = split_ids(req.get_param_value("ids"));
            if (ids.size() < 2 || ids.size() > 8) throw archive::InvalidQuery("compare needs between 2 and 8 ids");
            std::vector<std::pair<archive::GraphId, analysis::PropertySet>> graphs;
            for (const auto& id : ids) {
                auto r = store_.get_record(id);
                if (r.deleted_at) throw archive::Gone(id);
                if (r.status != archive::Status::analyzed || !r.properties)
                    throw HttpError("NotReady", "graph " + id + " is " + std::string(archive::to_string(r.status)) +
                                                    "; only analyzed graphs can be compared");
                graphs.emplace_back(id, *r.properties);
            }
            send_json(res, 200, to_json(compare_properties(graphs)));
        }));

        server_.Get("/collections", guarded([this](const Req&, Res& res) {
            json out = json::array();
            for (const auto& c : store_.list_collections()) out.push_back(collection_json(c));
            send_json(res, 200, out);
        }));

        server_.Post("/collections", guarded([this](const Req& req, Res& res) {
            require_writer(req);
            auto body = parse_body(req);
            if (!body.is_object() || !body.contains("name") || !body["name"].is_string())
                throw codec::InvalidDocument("a collection needs a 'name' string");
            auto cid = store_.create_collection(body["name"].get<std::string>(), body.value("description", std::string()));
            res.set_header("Location", "/collections/" + cid);
            send_json(res, 201, collection_json(store_.list_collection(cid)));
        }));

        server_.Get("/collections/:cid", guarded([this](const Req& req, Res& res) {
            send_json(res, 200, collection_json(store_.list_collection(req.path_params.at("cid"))));
        }));

        server_.Post("/collections/:cid/members", guarded([this](const Req& req, Res& res) {
            require_writer(req);
            auto body = parse_body(req);
            if (!body.is_object() || !body.contains("id") || !body["id"].is_string())
                throw codec::InvalidDocument("expected {\"id\": <graph id>}");
            const auto& cid = req.path_params.at("cid");
            store_.add_to_collection(cid, body["id"].get<std::string>());
            send_json(res, 201, collection_json(store_.list_collection(cid)));
        }));

        server_.Post("/import", guarded([this](const Req& req, Res& res) {
            std::string owner = require_writer(req);
            std::string bytes = req.is_multipart_form_data() && req.has_file("file") ? req.get_file_value("file").content : req.body;
            archive::ImportOptions opts;
            opts.owner = owner;
            opts.defaults.creator = req.has_param("creator") ? req.get_param_value("creator") : owner;
            for (std::size_t i = 0; i < req.get_param_value_count("tag"); ++i)
                opts.defaults.tags.push_back(Tag::make(req.get_param_value("tag", i)));
            for (const auto& [key, value] : req.params)
                if (key.starts_with("format:")) opts.formats[key.substr(7)] = format_param(value);
            auto outcomes = store_.import_zip(bytes, opts);
            worker_.notify();
            json results = json::array();
            std::size_t committed = 0;
            for (const auto& o : outcomes) {
                json item{{"filename", o.filename}};
                if (o.id) {
                    ++committed;
                    item["id"] = *o.id;
                    item["uri"] = uri_of(*o.id);
                } else {
                    item["error"] = {{"kind", o.error_kind},
                                     {"message", o.error_message},
                                     {"line", o.line ? json(*o.line) : json(nullptr)},
                                     {"column", o.column ? json(*o.column) : json(nullptr)}};
                }
                results.push_back(std::move(item));
            }
            send_json(res, 200, {{"committed", committed}, {"failed", outcomes.size() - committed}, {"results", std::move(results)}});
        }));

        server_.Get("/export", guarded([this](const Req& req, Res& res) {
            auto ids = split_ids(req.get_param_value("ids"));
            if (ids.empty()) throw archive::InvalidQuery("export needs ids=<id>,<id>,...");
            if (!req.has_param("format")) throw archive::InvalidQuery("export needs format=<gml|graphml|dimacs|matrix-market>");
            auto bytes = store_.export_zip(ids, format_param(req.get_param_value("format")));
            res.set_header("Content-Disposition", "attachment; filename=\"export.zip\"");
            res.status = 200;
            res.set_content(bytes, "application/zip");
        }));
    }

    static json collection_json(const archive::Collection& c) {
        return {{"id", c.id},
                {"uri", "/collections/" + c.id},
                {"name", c.name},
                {"description", c.description},
                {"created_at", format_timestamp(c.created_at)},
                {"members", c.members}};
    }

    ServiceConfig cfg_;
    archive::Archive store_;
    Worker worker_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = -1;
};

} // namespace oga::service
