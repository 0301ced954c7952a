#pragma once

#include <oga/analysis.hpp>
#include <oga/archive/sqlite.hpp>
#include <oga/archive/ulid.hpp>
#include <oga/archive/zip.hpp>
#include <oga/formats.hpp>
#include <oga/json.hpp>
#include <oga/layout.hpp>
#include <oga/metadata.hpp>

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace oga::archive {

using GraphId = std::string;
using CollectionId = std::string;
using sql::StorageError;
using sql::StorageFull;
using zip::CorruptArchive;

class NotFound : public Error {
public:
    explicit NotFound(const std::string& what) : Error("NotFound", what + " not found") {}
};

/// The record exists but was deleted; its id stays reserved.
class Gone : public Error {
public:
    explicit Gone(const std::string& id) : Error("Gone", "graph " + id + " was deleted") {}
};

class DuplicateMember : public Error {
public:
    DuplicateMember(const std::string& cid, const std::string& id)
        : Error("DuplicateMember", "graph " + id + " is already in collection " + cid) {}
};

class FieldNotUserSettable : public Error {
public:
    explicit FieldNotUserSettable(const std::string& field)
        : Error("FieldNotUserSettable", "field '" + field + "' is computed by the archive and cannot be set by users") {}
};

class UnknownProperty : public Error {
public:
    explicit UnknownProperty(const std::string& message) : Error("UnknownProperty", message) {}
};

class InvalidQuery : public Error {
public:
    explicit InvalidQuery(const std::string& message) : Error("InvalidQuery", message) {}
};

class InvalidTransition : public Error {
public:
    explicit InvalidTransition(const std::string& message) : Error("InvalidTransition", message) {}
};

/// Upload rejected because the bytes do not parse. Carries the position when
/// the underlying error has one.
class ParseFailed : public Error {
public:
    ParseFailed(std::string cause, const std::string& message, std::optional<std::size_t> line = {},
                std::optional<std::size_t> column = {})
        : Error("ParseFailed", message), cause_(std::move(cause)), line_(line), column_(column) {}

    const std::string& cause() const noexcept { return cause_; }
    std::optional<std::size_t> line() const noexcept { return line_; }
    std::optional<std::size_t> column() const noexcept { return column_; }

private:
    std::string cause_;
    std::optional<std::size_t> line_;
    std::optional<std::size_t> column_;
};

enum class Status { pending_analysis, analyzed, analysis_skipped, analysis_failed };

inline std::string_view to_string(Status s) {
    switch (s) {
    case Status::pending_analysis: return "pending-analysis";
    case Status::analyzed: return "analyzed";
    case Status::analysis_skipped: return "analysis-skipped";
    case Status::analysis_failed: return "analysis-failed";
    }
    return "pending-analysis";
}

inline Status parse_status(std::string_view s) {
    if (s == "analyzed") return Status::analyzed;
    if (s == "analysis-skipped") return Status::analysis_skipped;
    if (s == "analysis-failed") return Status::analysis_failed;
    return Status::pending_analysis;
}

struct GraphRecord {
    GraphId id;
    formats::FormatId original_format;
    std::size_t original_size = 0;
    Graph canonical;
    /// What lenient parsing of the original dropped.
    formats::LossReport parse_report;
    Metadata metadata;
    std::string owner;
    Status status = Status::pending_analysis;
    std::string status_message;
    /// Present once analysis ran (analyzed or skipped); crossing_number is merged in.
    std::optional<analysis::PropertySet> properties;
    std::optional<std::int64_t> crossing_number;
    std::optional<layout::Layout> layout;
    std::optional<Timestamp> deleted_at;
};

/// The fields of a record a listing needs, read without the canonical graph.
struct RecordSummary {
    GraphId id;
    std::string name;
    std::string creator;
    Timestamp uploaded_at{};
    std::vector<Tag> tags;
    Status status = Status::pending_analysis;
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    bool directed = false;
    std::optional<bool> is_planar;
    std::optional<bool> is_connected;
    bool has_image = false;
    std::optional<Timestamp> deleted_at;
};

enum class Supplier { system, user };

// Search criteria. All bounds are inclusive; a missing bound is open.
struct NumericRange {
    std::string property;
    std::optional<double> low;
    std::optional<double> high;
};
struct TagEquals {
    std::string tag;
};
enum class TextField { name, creator, description, any };
struct TextContains {
    TextField field = TextField::any;
    std::string needle;
};
struct BooleanEquals {
    std::string property;
    bool value = true;
};
struct UploadedBetween {
    std::optional<Timestamp> from;
    std::optional<Timestamp> to;
};
using Criterion = std::variant<NumericRange, TagEquals, TextContains, BooleanEquals, UploadedBetween>;

struct SearchQuery {
    std::vector<Criterion> criteria;
    /// Permits an empty criteria list, listing every live record.
    bool all = false;

    SearchQuery refine(Criterion c) const {
        SearchQuery q = *this;
        q.criteria.push_back(std::move(c));
        return q;
    }
};

struct SearchPage {
    std::size_t total = 0;
    std::vector<GraphId> ids;
};

inline constexpr std::size_t max_page_size = 500;

inline const std::vector<std::string>& numeric_property_names() {
    static const std::vector<std::string> names{
        "node_count", "edge_count", "min_degree", "max_degree", "avg_degree", "density", "connected_component_count",
        "biconnected_component_count", "vertex_connectivity", "crossing_number"};
    return names;
}

inline const std::vector<std::string>& boolean_property_names() {
    static const std::vector<std::string> names{"directed", "has_self_loops", "has_multi_edges", "is_connected",
                                                "is_bipartite", "is_acyclic", "is_planar"};
    return names;
}

struct Collection {
    CollectionId id;
    std::string name;
    std::string description;
    Timestamp created_at{};
    std::vector<GraphId> members;
};

struct ImportOptions {
    /// Creator, tags and the other shared fields; the name defaults to the file stem.
    Metadata defaults;
    /// Per-file format overrides keyed by entry name; others are detected.
    std::map<std::string, formats::FormatId> formats;
    std::string owner;
};

struct ImportOutcome {
    std::string filename;
    std::optional<GraphId> id;
    std::string error_kind;
    std::string error_message;
    std::optional<std::size_t> line;
    std::optional<std::size_t> column;
};

struct Job {
    std::int64_t seq = 0;
    GraphId graph_id;
    std::string kind;
    std::int64_t attempts = 0;
};

struct ApiToken {
    std::string token;
    std::string owner;
    Timestamp created_at{};
};

struct AuditFinding {
    GraphId id;
    std::string problem;
};

struct ArchiveConfig {
    /// Cap on the summed size of stored originals; 0 means unlimited.
    std::uint64_t max_total_original_bytes = 0;
};

namespace store_detail {

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) out += hex[digest[i] >> 4], out += hex[digest[i] & 15];
    return out;
}

inline std::string base64url(const unsigned char* data, std::size_t n) {
    static constexpr char alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
    std::string out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        acc = (acc << 8) | data[i];
        bits += 8;
        while (bits >= 6) {
            bits -= 6;
            out += alphabet[(acc >> bits) & 63];
        }
    }
    if (bits > 0) out += alphabet[(acc << (6 - bits)) & 63];
    return out;
}

/// Writes `data` to `path` durably: temp file, fsync, rename, fsync of the directory.
inline void write_file_durably(const std::filesystem::path& path, std::string_view data) {
    namespace fs = std::filesystem;
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw StorageError("cannot create " + tmp.string() + ": " + std::strerror(errno));
    std::size_t done = 0;
    while (done < data.size()) {
        ssize_t w = ::write(fd, data.data() + done, data.size() - done);
        if (w < 0) {
            if (errno == EINTR) continue;
            int err = errno;
            ::close(fd);
            ::unlink(tmp.c_str());
            if (err == ENOSPC || err == EDQUOT) throw StorageFull("no space left for " + path.string());
            throw StorageError("cannot write " + tmp.string() + ": " + std::strerror(err));
        }
        done += static_cast<std::size_t>(w);
    }
    if (::fsync(fd) != 0) {
        int err = errno;
        ::close(fd);
        ::unlink(tmp.c_str());
        throw StorageError("fsync failed for " + tmp.string() + ": " + std::strerror(err));
    }
    ::close(fd);
    if (::rename(tmp.c_str(), path.c_str()) != 0) throw StorageError("cannot rename " + tmp.string() + ": " + std::strerror(errno));
    int dfd = ::open(path.parent_path().c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (dfd >= 0) {
        ::fsync(dfd);
        ::close(dfd);
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// The criteria-independent numeric and boolean fields of a PropertySet, as
/// (name, value) rows; booleans are 0 or 1.
inline std::vector<std::pair<std::string, double>> property_rows(const analysis::PropertySet& p) {
    std::vector<std::pair<std::string, double>> rows{
        {"node_count", static_cast<double>(p.node_count)}, {"edge_count", static_cast<double>(p.edge_count)},
        {"directed", p.directed ? 1.0 : 0.0},              {"min_degree", p.min_degree},
        {"max_degree", p.max_degree},                      {"avg_degree", p.avg_degree}};
    auto num = [&](const char* name, const auto& v) {
        if (v) rows.emplace_back(name, static_cast<double>(*v));
    };
    num("density", p.density);
    num("connected_component_count", p.connected_component_count);
    num("biconnected_component_count", p.biconnected_component_count);
    num("vertex_connectivity", p.vertex_connectivity);
    auto flag = [&](const char* name, const std::optional<bool>& v) {
        if (v) rows.emplace_back(name, *v ? 1.0 : 0.0);
    };
    flag("has_self_loops", p.has_self_loops);
    flag("has_multi_edges", p.has_multi_edges);
    flag("is_connected", p.is_connected);
    flag("is_bipartite", p.is_bipartite);
    flag("is_acyclic", p.is_acyclic);
    flag("is_planar", p.is_planar);
    return rows;
}

inline std::string file_stem(const std::string& name) {
    auto slash = name.find_last_of('/');
    std::string base = slash == std::string::npos ? name : name.substr(slash + 1);
    auto dot = base.find_last_of('.');
    return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

} // namespace store_detail

/// Persistent archive: a SQLite database for records, metadata, search,
/// collections, jobs and tokens, plus one file per original submission under
/// `blobs/<first two id characters>/<id>`.
///
/// All operations are safe to call from several threads. Database access is
/// serialized through one connection, so every read sees a committed snapshot
/// and writes to a record never interleave.
class Archive {
public:
    explicit Archive(std::filesystem::path dir, ArchiveConfig config = {})
        : dir_(std::move(dir)), config_(config), db_((std::filesystem::create_directories(dir_), (dir_ / "archive.sqlite").string())) {
        db_.exec("PRAGMA journal_mode=WAL; PRAGMA synchronous=FULL; PRAGMA foreign_keys=ON;");
        db_.exec(R"sql(
CREATE TABLE IF NOT EXISTS graphs(
  id TEXT PRIMARY KEY,
  original_format TEXT NOT NULL,
  original_size INTEGER NOT NULL,
  original_sha256 TEXT NOT NULL,
  canonical TEXT NOT NULL,
  parse_report TEXT NOT NULL,
  node_count INTEGER NOT NULL,
  edge_count INTEGER NOT NULL,
  directed INTEGER NOT NULL,
  name TEXT NOT NULL,
  creator TEXT NOT NULL,
  description TEXT,
  creation_method TEXT,
  license TEXT,
  uploaded_at INTEGER NOT NULL,
  owner TEXT NOT NULL,
  status TEXT NOT NULL,
  status_message TEXT NOT NULL DEFAULT '',
  properties TEXT,
  crossing_number INTEGER,
  layout TEXT,
  svg TEXT,
  deleted_at INTEGER
);
CREATE INDEX IF NOT EXISTS graphs_order ON graphs(uploaded_at DESC, id DESC);
CREATE TABLE IF NOT EXISTS tags(
  graph_id TEXT NOT NULL REFERENCES graphs(id),
  pos INTEGER NOT NULL,
  value TEXT NOT NULL,
  kind TEXT NOT NULL,
  PRIMARY KEY(graph_id, value)
);
CREATE INDEX IF NOT EXISTS tags_value ON tags(value);
CREATE TABLE IF NOT EXISTS comments(
  seq INTEGER PRIMARY KEY AUTOINCREMENT,
  graph_id TEXT NOT NULL REFERENCES graphs(id),
  author TEXT NOT NULL,
  at INTEGER NOT NULL,
  text TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS refs(
  seq INTEGER PRIMARY KEY AUTOINCREMENT,
  graph_id TEXT NOT NULL REFERENCES graphs(id),
  kind TEXT NOT NULL,
  citation TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS props(
  graph_id TEXT NOT NULL REFERENCES graphs(id),
  name TEXT NOT NULL,
  value REAL NOT NULL,
  PRIMARY KEY(graph_id, name)
);
CREATE TABLE IF NOT EXISTS collections(
  id TEXT PRIMARY KEY,
  name TEXT NOT NULL,
  description TEXT NOT NULL,
  created_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS members(
  collection_id TEXT NOT NULL REFERENCES collections(id),
  pos INTEGER NOT NULL,
  graph_id TEXT NOT NULL REFERENCES graphs(id),
  PRIMARY KEY(collection_id, graph_id)
);
CREATE TABLE IF NOT EXISTS jobs(
  seq INTEGER PRIMARY KEY AUTOINCREMENT,
  graph_id TEXT NOT NULL,
  kind TEXT NOT NULL,
  claimed INTEGER NOT NULL DEFAULT 0,
  attempts INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS tokens(
  sha256 TEXT PRIMARY KEY,
  owner TEXT NOT NULL,
  created_at INTEGER NOT NULL
);
)sql");
        // Jobs claimed by a process that died are handed out again.
        db_.exec("UPDATE jobs SET claimed = 0 WHERE claimed = 1");
    }

    const std::filesystem::path& directory() const noexcept { return dir_; }

    std::filesystem::path blob_path(const GraphId& id) const { return dir_ / "blobs" / id.substr(0, 2) / id; }

    // ---- records -------------------------------------------------------

    /// Parses and stores a submission; the record starts pending analysis and
    /// an analysis job is queued in the same transaction.
    GraphId put_graph(std::string_view bytes, const formats::FormatId& format, Metadata metadata, const std::string& owner = "") {
        Prepared p = prepare(bytes, format, std::move(metadata), owner);
        std::vector<Prepared> batch;
        batch.push_back(std::move(p));
        commit(batch);
        return batch.front().id;
    }

    GraphRecord get_record(const GraphId& id) {
        GraphRecord r;
        std::string canonical, report, properties, layout_doc;
        {
            std::lock_guard lock(mutex_);
            auto st = db_.prepare(
                "SELECT original_format, original_size, canonical, parse_report, name, creator, description, creation_method, "
                "license, uploaded_at, owner, status, status_message, properties, crossing_number, layout, deleted_at "
                "FROM graphs WHERE id = ?");
            st.bind(1, id);
            if (!st.step()) throw NotFound("graph " + id);
            r.id = id;
            r.original_format = {st.text(0)};
            r.original_size = static_cast<std::size_t>(st.int64(1));
            canonical = st.text(2);
            report = st.text(3);
            r.metadata.name = st.text(4);
            r.metadata.creator = st.text(5);
            r.metadata.description = st.opt_text(6);
            r.metadata.creation_method = st.opt_text(7);
            r.metadata.license = st.opt_text(8);
            r.metadata.uploaded_at = from_millis(st.int64(9));
            r.owner = st.text(10);
            r.status = parse_status(st.text(11));
            r.status_message = st.text(12);
            properties = st.is_null(13) ? "" : st.text(13);
            if (!st.is_null(14)) r.crossing_number = st.int64(14);
            layout_doc = st.is_null(15) ? "" : st.text(15);
            if (!st.is_null(16)) r.deleted_at = from_millis(st.int64(16));
            load_annotations(id, r.metadata);
        }
        r.canonical = json::graph_from_json(nlohmann::json::parse(canonical));
        r.parse_report = json::loss_report_from_json(nlohmann::json::parse(report));
        if (!properties.empty()) {
            r.properties = json::properties_from_json(nlohmann::json::parse(properties));
            r.properties->crossing_number = r.crossing_number;
        }
        if (!layout_doc.empty()) r.layout = json::layout_from_json(nlohmann::json::parse(layout_doc));
        return r;
    }

    RecordSummary get_summary(const GraphId& id) {
        std::lock_guard lock(mutex_);
        auto st = db_.prepare(
            "SELECT name, creator, uploaded_at, status, node_count, edge_count, directed, properties, svg IS NOT NULL, deleted_at "
            "FROM graphs WHERE id = ?");
        st.bind(1, id);
        if (!st.step()) throw NotFound("graph " + id);
        RecordSummary s;
        s.id = id;
        s.name = st.text(0);
        s.creator = st.text(1);
        s.uploaded_at = from_millis(st.int64(2));
        s.status = parse_status(st.text(3));
        s.node_count = static_cast<std::size_t>(st.int64(4));
        s.edge_count = static_cast<std::size_t>(st.int64(5));
        s.directed = st.int64(6) != 0;
        if (!st.is_null(7)) {
            auto p = nlohmann::json::parse(st.text(7));
            if (p.contains("is_planar") && p["is_planar"].is_boolean()) s.is_planar = p["is_planar"].get<bool>();
            if (p.contains("is_connected") && p["is_connected"].is_boolean()) s.is_connected = p["is_connected"].get<bool>();
        }
        s.has_image = st.int64(8) != 0;
        if (!st.is_null(9)) s.deleted_at = from_millis(st.int64(9));
        Metadata m;
        load_annotations(id, m);
        s.tags = std::move(m.tags);
        return s;
    }

    /// Byte-exact original submission and its format.
    std::pair<std::string, formats::FormatId> get_original_bytes(const GraphId& id) {
        formats::FormatId format;
        {
            std::lock_guard lock(mutex_);
            auto st = db_.prepare("SELECT original_format FROM graphs WHERE id = ?");
            st.bind(1, id);
            if (!st.step()) throw NotFound("graph " + id);
            format = {st.text(0)};
        }
        return {store_detail::read_file(blob_path(id)), format};
    }

    std::optional<std::string> get_svg(const GraphId& id) {
        std::lock_guard lock(mutex_);
        auto st = db_.prepare("SELECT svg FROM graphs WHERE id = ?");
        st.bind(1, id);
        if (!st.step()) throw NotFound("graph " + id);
        return st.opt_text(0);
    }

    bool exists(const GraphId& id) {
        std::lock_guard lock(mutex_);
        auto st = db_.prepare("SELECT 1 FROM graphs WHERE id = ?");
        st.bind(1, id);
        return st.step();
    }

    std::size_t record_count() {
        std::lock_guard lock(mutex_);
        auto st = db_.prepare("SELECT COUNT(*) FROM graphs");
        st.step();
        return static_cast<std::size_t>(st.int64(0));
    }

    /// Tombstones the record: it leaves search results and collections keep
    /// listing it, but its id keeps resolving.
    void delete_graph(const GraphId& id) {
        std::lock_guard lock(mutex_);
        live_or_throw(id);
        auto st = db_.prepare("UPDATE graphs SET deleted_at = ? WHERE id = ?");
        st.bind(1, to_millis(now_utc())).bind(2, id).run();
    }

    // ---- metadata ------------------------------------------------------

    void update_metadata(const GraphId& id, const MetadataPatch& patch) {
        if (patch.name && patch.name->empty()) throw InvalidMetadata("metadata name is mandatory");
        std::lock_guard lock(mutex_);
        sql::Transaction tx(db_);
        live_or_throw(id);
        auto set = [&](const char* column, const std::optional<std::string>& v) {
            if (!v) return;
            auto st = db_.prepare(std::string("UPDATE graphs SET ") + column + " = ? WHERE id = ?");
            st.bind(1, *v).bind(2, id).run();
        };
        set("name", patch.name);
        set("description", patch.description);
        set("creation_method", patch.creation_method);
        set("license", patch.license);
        tx.commit();
    }

    /// Comments are append-only.
    Comment add_comment(const GraphId& id, const std::string& author, const std::string& text) {
        if (text.empty()) throw InvalidMetadata("comment text must be non-empty");
        Comment c{author, now_utc(), text};
        std::lock_guard lock(mutex_);
        sql::Transaction tx(db_);
        live_or_throw(id);
        db_.prepare("INSERT INTO comments(graph_id, author, at, text) VALUES(?, ?, ?, ?)")
            .bind(1, id)
            .bind(2, author)
            .bind(3, to_millis(c.at))
            .bind(4, text)
            .run();
        tx.commit();
        return c;
    }

    void add_reference(const GraphId& id, const Reference& ref) {
        if (ref.citation_or_url.empty()) throw InvalidMetadata("reference must be non-empty");
        std::lock_guard lock(mutex_);
        sql::Transaction tx(db_);
        live_or_throw(id);
        db_.prepare("INSERT INTO refs(graph_id, kind, citation) VALUES(?, ?, ?)")
            .bind(1, id)
            .bind(2, to_string(ref.kind))
            .bind(3, ref.citation_or_url)
            .run();
        tx.commit();
    }

    /// Replaces the tag list. Throws InvalidTag before changing anything.
    void set_tags(const GraphId& id, const std::vector<Tag>& tags) {
        auto normalized = normalize_tags(tags);
        std::lock_guard lock(mutex_);
        sql::Transaction tx(db_);
        live_or_throw(id);
        write_tags(id, normalized);
        tx.commit();
    }

    // ---- properties, layout, status --------------------------------------

    /// System-supplied results move a pending record to analyzed or
    /// analysis-skipped; repeating the same results is a no-op. User-supplied
    /// sets may only carry crossing_number: every other field must be left at
    /// its default.
    void set_properties(const GraphId& id, const analysis::PropertySet& props, Supplier supplier) {
        if (supplier == Supplier::user) {
            analysis::PropertySet rest = props;
            rest.crossing_number.reset();
            if (!(rest == analysis::PropertySet{})) throw FieldNotUserSettable(first_changed_field(rest));
            if (!props.crossing_number) return;
            set_user_property(id, "crossing_number", *props.crossing_number);
            return;
        }
        std::lock_guard lock(mutex_);
        sql::Transaction tx(db_);
        store_analysis(id, props, std::nullopt, std::nullopt);
        tx.commit();
    }

    /// Sets one user-supplied property by name.
    void set_user_property(const GraphId& id, const std::string& name, std::int64_t value) {
        if (name != "crossing_number") {
            auto known = [&](const std::vector<std::string>& names) {
                return std::find(names.begin(), names.end(), name) != names.end();
            };
            if (known(numeric_property_names()) || known(boolean_property_names())) throw FieldNotUserSettable(name);
            throw UnknownProperty("unknown property '" + name + "'");
        }
        if (value < 0) throw InvalidMetadata("crossing_number must be non-negative");
        std::lock_guard lock(mutex_);
        sql::Transaction tx(db_);
        live_or_throw(id);
        db_.prepare("UPDATE graphs SET crossing_number = ? WHERE id = ?").bind(1, value).bind(2, id).run();
        db_.prepare("INSERT OR REPLACE INTO props(graph_id, name, value) VALUES(?, 'crossing_number', ?)")
            .bind(1, id)
            .bind(2, static_cast<double>(value))
            .run();
        tx.commit();
    }

    /// Stores analysis results together with a layout and its drawing in one
    /// transaction, so a worker that dies halfway leaves the record pending.
    void complete_analysis(const GraphId& id, const analysis::PropertySet& props, const std::optional<layout::Layout>& layout,
                           const std::optional<std::string>& svg) {
        std::lock_guard lock(mutex_);
        sql::Transaction tx(db_);
        store_analysis(id, props, layout, svg);
        tx.commit();
    }

    void mark_analysis_failed(const GraphId& id, const std::string& message) {
        std::lock_guard lock(mutex_);
        sql::Transaction tx(db_);
        auto status = status_of(id);
        if (status == Status::analysis_failed) return;
        if (status != Status::pending_analysis)
            throw InvalidTransition("graph " + id + " is " + std::string(to_string(status)) + ", not pending");
        db_.prepare("UPDATE graphs SET status = 'analysis-failed', status_message = ? WHERE id = ?").bind(1, message).bind(2, id).run();
        tx.commit();
    }

    /// Stores a layout (and optional drawing) outside the analysis step.
    void set_layout(const GraphId& id, layout::Layout l, const std::optional<std::string>& svg) {
        std::lock_guard lock(mutex_);
        sql::Transaction tx(db_);
        live_or_throw(id);
        write_layout(id, l, svg);
        tx.commit();
    }

    // ---- search ----------------------------------------------------------

    /// Conjunctive search over live records, newest upload first (ties by id,
    /// descending). `page` is 1-based. Records still pending analysis never
    /// match numeric property criteria.
    SearchPage search(const SearchQuery& q, std::size_t page = 1, std::size_t page_size = 50) {
        if (q.criteria.empty() && !q.all) throw InvalidQuery("a query needs at least one criterion (or all=true)");
        if (page_size == 0 || page_size > max_page_size)
            throw InvalidQuery("page_size must be between 1 and " + std::to_string(max_page_size));
        if (page == 0) throw InvalidQuery("page numbers start at 1");

        std::string where = "g.deleted_at IS NULL";
        std::vector<std::variant<std::string, double, std::int64_t>> params;
        for (const auto& c : q.criteria) {
            std::visit(
                [&](const auto& crit) {
                    using T = std::decay_t<decltype(crit)>;
                    if constexpr (std::is_same_v<T, NumericRange>) {
                        require_property(crit.property, numeric_property_names(), "numeric");
                        where += " AND g.status <> 'pending-analysis' AND EXISTS(SELECT 1 FROM props p WHERE p.graph_id = g.id "
                                 "AND p.name = ?";
                        params.emplace_back(crit.property);
                        if (crit.low) where += " AND p.value >= ?", params.emplace_back(*crit.low);
                        if (crit.high) where += " AND p.value <= ?", params.emplace_back(*crit.high);
                        where += ")";
                    } else if constexpr (std::is_same_v<T, TagEquals>) {
                        where += " AND EXISTS(SELECT 1 FROM tags t WHERE t.graph_id = g.id AND t.value = ?)";
                        params.emplace_back(Tag::make(crit.tag).value);
                    } else if constexpr (std::is_same_v<T, TextContains>) {
                        if (crit.needle.empty()) throw InvalidQuery("text search needs a non-empty needle");
                        auto contains = [&](const char* column) {
                            params.emplace_back(crit.needle);
                            return std::string("instr(lower(coalesce(g.") + column + ", '')), lower(?)) > 0";
                        };
                        switch (crit.field) {
                        case TextField::name: where += " AND " + contains("name"); break;
                        case TextField::creator: where += " AND " + contains("creator"); break;
                        case TextField::description: where += " AND " + contains("description"); break;
                        case TextField::any: {
                            std::string a = contains("name"), b = contains("creator"), d = contains("description");
                            where += " AND (" + a + " OR " + b + " OR " + d + ")";
                            break;
                        }
                        }
                    } else if constexpr (std::is_same_v<T, BooleanEquals>) {
                        require_property(crit.property, boolean_property_names(), "boolean");
                        where += " AND EXISTS(SELECT 1 FROM props p WHERE p.graph_id = g.id AND p.name = ? AND p.value = ?)";
                        params.emplace_back(crit.property);
                        params.emplace_back(crit.value ? 1.0 : 0.0);
                    } else {
                        if (crit.from) where += " AND g.uploaded_at >= ?", params.emplace_back(to_millis(*crit.from));
                        if (crit.to) where += " AND g.uploaded_at <= ?", params.emplace_back(to_millis(*crit.to));
                    }
                },
                c);
        }
        auto bind_all = [&](sql::Statement& st) {
            int i = 1;
            for (const auto& p : params) std::visit([&](const auto& v) { st.bind(i++, v); }, p);
            return i;
        };

        std::lock_guard lock(mutex_);
        // Count and page inside one read transaction so both see the same snapshot.
        db_.exec("BEGIN");
        SearchPage result;
        try {
            auto count = db_.prepare("SELECT COUNT(*) FROM graphs g WHERE " + where);
            bind_all(count);
            count.step();
            result.total = static_cast<std::size_t>(count.int64(0));
            auto rows = db_.prepare("SELECT g.id FROM graphs g WHERE " + where +
                                    " ORDER BY g.uploaded_at DESC, g.id DESC LIMIT ? OFFSET ?");
            int next = bind_all(rows);
            rows.bind(next, page_size).bind(next + 1, (page - 1) * page_size);
            while (rows.step()) result.ids.push_back(rows.text(0));
            db_.exec("COMMIT");
        } catch (...) {
            db_.exec("ROLLBACK");
            throw;
        }
        return result;
    }

    // ---- zip import / export ---------------------------------------------

    /// Parses every entry independently and commits the ones that parse, all
    /// in one transaction. A container that is not a readable zip commits nothing.
    std::vector<ImportOutcome> import_zip(std::string_view bytes, const ImportOptions& options = {}) {
        auto entries = zip::read(bytes);
        std::map<std::string, formats::FormatId> manifest_formats;
        for (const auto& e : entries) {
            if (e.name != "manifest.txt") continue;
            std::istringstream lines(e.data);
            std::string line;
            while (std::getline(lines, line)) {
                auto t1 = line.find('\t'), t2 = line.find('\t', t1 == std::string::npos ? t1 : t1 + 1);
                if (t1 == std::string::npos || t2 == std::string::npos) continue;
                if (auto f = formats::parse_format_name(line.substr(t2 + 1))) manifest_formats[line.substr(t1 + 1, t2 - t1 - 1)] = *f;
            }
        }

        std::vector<ImportOutcome> outcomes;
        std::vector<Prepared> batch;
        std::vector<std::size_t> batch_outcome;
        for (const auto& e : entries) {
            if (skip_on_import(e.name)) continue;
            ImportOutcome outcome;
            outcome.filename = e.name;
            try {
                formats::FormatId format;
                if (auto it = options.formats.find(e.name); it != options.formats.end()) format = it->second;
                else if (auto m = manifest_formats.find(e.name); m != manifest_formats.end()) format = m->second;
                else format = detect_for_import(e.name, e.data);
                Metadata meta = options.defaults;
                meta.name = store_detail::file_stem(e.name);
                if (meta.creator.empty()) meta.creator = options.owner.empty() ? "import" : options.owner;
                batch.push_back(prepare(e.data, format, std::move(meta), options.owner));
                batch_outcome.push_back(outcomes.size());
            } catch (const ParseFailed& ex) {
                outcome.error_kind = ex.cause();
                outcome.error_message = ex.what();
                outcome.line = ex.line();
                outcome.column = ex.column();
            } catch (const Error& ex) {
                outcome.error_kind = ex.kind();
                outcome.error_message = ex.what();
            }
            outcomes.push_back(std::move(outcome));
        }
        commit(batch);
        for (std::size_t i = 0; i < batch.size(); ++i) outcomes[batch_outcome[i]].id = batch[i].id;
        return outcomes;
    }

    /// One `<id>.<ext>` entry per graph, `<id>.loss.json` with its LossReport,
    /// and `manifest.txt` with `id<TAB>filename<TAB>format` lines. A graph
    /// exported in its original format is written byte-exactly.
    std::string export_zip(const std::vector<GraphId>& ids, const formats::FormatId& format) {
        const auto& codec = formats::Registry::instance().get(format);
        std::vector<zip::Entry> entries;
        std::string manifest;
        std::set<GraphId> seen;
        for (const auto& id : ids) {
            if (!seen.insert(id).second) continue;
            auto [bytes, original_format] = get_original_bytes(id);
            formats::SerializeResult out;
            if (original_format == format) {
                out.bytes = std::move(bytes);
            } else {
                out = formats::serialize(get_record(id).canonical, format);
            }
            std::string filename = id + "." + codec.extension;
            manifest += id + "\t" + filename + "\t" + format.name + "\n";
            entries.push_back({filename, std::move(out.bytes)});
            entries.push_back({id + ".loss.json", json::to_json(out.report).dump(2) + "\n"});
        }
        entries.insert(entries.begin(), zip::Entry{"manifest.txt", manifest});
        return zip::write(entries);
    }

    // ---- collections -----------------------------------------------------

    CollectionId create_collection(const std::string& name, const std::string& description = "") {
        if (name.empty()) throw InvalidMetadata("collection name must be non-empty");
        CollectionId cid = ids_.next();
        std::lock_guard lock(mutex_);
        db_.prepare("INSERT INTO collections(id, name, description, created_at) VALUES(?, ?, ?, ?)")
            .bind(1, cid)
            .bind(2, name)
            .bind(3, description)
            .bind(4, to_millis(now_utc()))
            .run();
        return cid;
    }

    void add_to_collection(const CollectionId& cid, const GraphId& id) {
        std::lock_guard lock(mutex_);
        sql::Transaction tx(db_);
        {
            auto st = db_.prepare("SELECT 1 FROM collections WHERE id = ?");
            st.bind(1, cid);
            if (!st.step()) throw NotFound("collection " + cid);
        }
        live_or_throw(id);
        {
            auto st = db_.prepare("SELECT 1 FROM members WHERE collection_id = ? AND graph_id = ?");
            st.bind(1, cid).bind(2, id);
            if (st.step()) throw DuplicateMember(cid, id);
        }
        db_.prepare("INSERT INTO members(collection_id, pos, graph_id) "
                    "VALUES(?1, (SELECT COALESCE(MAX(pos), 0) + 1 FROM members WHERE collection_id = ?1), ?2)")
            .bind(1, cid)
            .bind(2, id)
            .run();
        tx.commit();
    }

    Collection list_collection(const CollectionId& cid) {
        std::lock_guard lock(mutex_);
        auto st = db_.prepare("SELECT name, description, created_at FROM collections WHERE id = ?");
        st.bind(1, cid);
        if (!st.step()) throw NotFound("collection " + cid);
        Collection c{cid, st.text(0), st.text(1), from_millis(st.int64(2)), {}};
        auto m = db_.prepare("SELECT graph_id FROM members WHERE collection_id = ? ORDER BY pos");
        m.bind(1, cid);
        while (m.step()) c.members.push_back(m.text(0));
        return c;
    }

    std::vector<Collection> list_collections() {
        std::vector<CollectionId> ids;
        {
            std::lock_guard lock(mutex_);
            auto st = db_.prepare("SELECT id FROM collections ORDER BY id");
            while (st.step()) ids.push_back(st.text(0));
        }
        std::vector<Collection> out;
        for (const auto& id : ids) out.push_back(list_collection(id));
        return out;
    }

    // ---- job queue -------------------------------------------------------

    void enqueue_job(const GraphId& id, const std::string& kind = "analyze") {
        std::lock_guard lock(mutex_);
        db_.prepare("INSERT INTO jobs(graph_id, kind) VALUES(?, ?)").bind(1, id).bind(2, kind).run();
    }

    /// Oldest unclaimed job, now marked claimed. Claims do not survive a
    /// restart, so a job whose worker died is handed out again.
    std::optional<Job> claim_job() {
        std::lock_guard lock(mutex_);
        sql::Transaction tx(db_);
        auto st = db_.prepare("SELECT seq, graph_id, kind, attempts FROM jobs WHERE claimed = 0 ORDER BY seq LIMIT 1");
        if (!st.step()) return std::nullopt;
        Job job{st.int64(0), st.text(1), st.text(2), st.int64(3) + 1};
        db_.prepare("UPDATE jobs SET claimed = 1, attempts = attempts + 1 WHERE seq = ?").bind(1, job.seq).run();
        tx.commit();
        return job;
    }

    void complete_job(std::int64_t seq) {
        std::lock_guard lock(mutex_);
        db_.prepare("DELETE FROM jobs WHERE seq = ?").bind(1, seq).run();
    }

    /// Returns a claimed job to the queue.
    void release_job(std::int64_t seq) {
        std::lock_guard lock(mutex_);
        db_.prepare("UPDATE jobs SET claimed = 0 WHERE seq = ?").bind(1, seq).run();
    }

    std::size_t pending_job_count() {
        std::lock_guard lock(mutex_);
        auto st = db_.prepare("SELECT COUNT(*) FROM jobs");
        st.step();
        return static_cast<std::size_t>(st.int64(0));
    }

    // ---- tokens ----------------------------------------------------------

    /// Issues a random 32-byte token (URL-safe base64). Only its SHA-256 is stored.
    ApiToken create_token(const std::string& owner) {
        if (owner.empty()) throw InvalidMetadata("token owner must be non-empty");
        unsigned char raw[32];
        if (RAND_bytes(raw, sizeof raw) != 1) throw std::runtime_error("no randomness available for tokens");
        ApiToken t{store_detail::base64url(raw, sizeof raw), owner, now_utc()};
        std::lock_guard lock(mutex_);
        db_.prepare("INSERT INTO tokens(sha256, owner, created_at) VALUES(?, ?, ?)")
            .bind(1, store_detail::sha256_hex(t.token))
            .bind(2, owner)
            .bind(3, to_millis(t.created_at))
            .run();
        return t;
    }

    /// Owner of a valid token.
    std::optional<std::string> authenticate(const std::string& token) {
        if (token.empty()) return std::nullopt;
        std::lock_guard lock(mutex_);
        auto st = db_.prepare("SELECT owner FROM tokens WHERE sha256 = ?");
        st.bind(1, store_detail::sha256_hex(token));
        if (!st.step()) return std::nullopt;
        return st.text(0);
    }

    bool revoke_token(const std::string& token) {
        std::lock_guard lock(mutex_);
        db_.prepare("DELETE FROM tokens WHERE sha256 = ?").bind(1, store_detail::sha256_hex(token)).run();
        return db_.changes() > 0;
    }

    // ---- consistency -----------------------------------------------------

    /// Checks that every original is present and unchanged and that its
    /// canonical graph still re-derives from it.
    std::vector<AuditFinding> audit() {
        struct Row {
            GraphId id;
            std::string format, sha, canonical;
        };
        std::vector<Row> rows;
        {
            std::lock_guard lock(mutex_);
            auto st = db_.prepare("SELECT id, original_format, original_sha256, canonical FROM graphs ORDER BY id");
            while (st.step()) rows.push_back({st.text(0), st.text(1), st.text(2), st.text(3)});
        }
        std::vector<AuditFinding> findings;
        for (const auto& row : rows) {
            std::string bytes;
            try {
                bytes = store_detail::read_file(blob_path(row.id));
            } catch (const Error&) {
                findings.push_back({row.id, "original bytes missing"});
                continue;
            }
            if (store_detail::sha256_hex(bytes) != row.sha) {
                findings.push_back({row.id, "original bytes changed"});
                continue;
            }
            try {
                Graph g = formats::parse(bytes, {row.format});
                if (!(g == json::graph_from_json(nlohmann::json::parse(row.canonical))))
                    findings.push_back({row.id, "canonical graph differs from the parsed original"});
            } catch (const std::exception& ex) {
                findings.push_back({row.id, std::string("original no longer parses: ") + ex.what()});
            }
        }
        return findings;
    }

private:
    struct Prepared {
        GraphId id;
        std::string bytes;
        formats::FormatId format;
        std::string canonical;
        std::string report;
        std::string sha;
        std::size_t node_count = 0, edge_count = 0;
        bool directed = false;
        Metadata metadata;
        std::string owner;
    };

    Prepared prepare(std::string_view bytes, const formats::FormatId& format, Metadata metadata, const std::string& owner) {
        formats::ParseResult parsed;
        try {
            parsed = formats::parse_with_report(bytes, format);
        } catch (const SyntaxError& ex) {
            throw ParseFailed(ex.kind(), ex.what(), ex.line(), ex.column());
        } catch (const Error& ex) {
            throw ParseFailed(ex.kind(), ex.what());
        }
        metadata.tags = normalize_tags(metadata.tags);
        validate(metadata);
        Prepared p;
        p.bytes = std::string(bytes);
        p.format = format;
        p.canonical = json::to_json(parsed.graph).dump();
        p.report = json::to_json(parsed.dropped).dump();
        p.sha = store_detail::sha256_hex(bytes);
        p.node_count = parsed.graph.node_count();
        p.edge_count = parsed.graph.edge_count();
        p.directed = parsed.graph.directed();
        p.metadata = std::move(metadata);
        p.owner = owner;
        return p;
    }

    /// Assigns ids and upload times, writes the blobs, then inserts all rows
    /// in one transaction. Blobs of a failed batch are removed again.
    void commit(std::vector<Prepared>& batch) {
        if (batch.empty()) return;
        std::lock_guard lock(mutex_);
        if (config_.max_total_original_bytes > 0) {
            auto st = db_.prepare("SELECT COALESCE(SUM(original_size), 0) FROM graphs");
            st.step();
            std::uint64_t total = static_cast<std::uint64_t>(st.int64(0));
            for (const auto& p : batch) total += p.bytes.size();
            if (total > config_.max_total_original_bytes)
                throw StorageFull("storing this would exceed the archive's limit of " +
                                  std::to_string(config_.max_total_original_bytes) + " bytes");
        }
        std::vector<std::filesystem::path> written;
        try {
            for (auto& p : batch) {
                Timestamp at = now_utc();
                p.id = ids_.next(at);
                if (p.metadata.uploaded_at == Timestamp{}) p.metadata.uploaded_at = at;
                store_detail::write_file_durably(blob_path(p.id), p.bytes);
                written.push_back(blob_path(p.id));
            }
            sql::Transaction tx(db_);
            for (const auto& p : batch) insert(p);
            tx.commit();
        } catch (...) {
            std::error_code ec;
            for (const auto& path : written) std::filesystem::remove(path, ec);
            throw;
        }
    }

    void insert(const Prepared& p) {
        const auto& m = p.metadata;
        db_.prepare(
               "INSERT INTO graphs(id, original_format, original_size, original_sha256, canonical, parse_report, node_count, "
               "edge_count, directed, name, creator, description, creation_method, license, uploaded_at, owner, status) "
               "VALUES(?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, 'pending-analysis')")
            .bind(1, p.id)
            .bind(2, p.format.name)
            .bind(3, p.bytes.size())
            .bind(4, p.sha)
            .bind(5, p.canonical)
            .bind(6, p.report)
            .bind(7, p.node_count)
            .bind(8, p.edge_count)
            .bind(9, p.directed)
            .bind(10, m.name)
            .bind(11, m.creator)
            .bind(12, m.description)
            .bind(13, m.creation_method)
            .bind(14, m.license)
            .bind(15, to_millis(m.uploaded_at))
            .bind(16, p.owner)
            .run();
        write_tags(p.id, m.tags);
        for (const auto& r : m.references)
            db_.prepare("INSERT INTO refs(graph_id, kind, citation) VALUES(?, ?, ?)")
                .bind(1, p.id)
                .bind(2, to_string(r.kind))
                .bind(3, r.citation_or_url)
                .run();
        for (const auto& c : m.comments)
            db_.prepare("INSERT INTO comments(graph_id, author, at, text) VALUES(?, ?, ?, ?)")
                .bind(1, p.id)
                .bind(2, c.author)
                .bind(3, to_millis(c.at))
                .bind(4, c.text)
                .run();
        db_.prepare("INSERT INTO jobs(graph_id, kind) VALUES(?, 'analyze')").bind(1, p.id).run();
    }

    void write_tags(const GraphId& id, const std::vector<Tag>& tags) {
        db_.prepare("DELETE FROM tags WHERE graph_id = ?").bind(1, id).run();
        for (std::size_t i = 0; i < tags.size(); ++i)
            db_.prepare("INSERT INTO tags(graph_id, pos, value, kind) VALUES(?, ?, ?, ?)")
                .bind(1, id)
                .bind(2, i)
                .bind(3, tags[i].value)
                .bind(4, to_string(tags[i].kind))
                .run();
    }

    void write_layout(const GraphId& id, layout::Layout l, const std::optional<std::string>& svg) {
        l.graph_id = id;
        l.computed_at = now_utc();
        db_.prepare("UPDATE graphs SET layout = ?, svg = ? WHERE id = ?")
            .bind(1, json::to_json(l).dump())
            .bind(2, svg)
            .bind(3, id)
            .run();
    }

    void store_analysis(const GraphId& id, const analysis::PropertySet& props, const std::optional<layout::Layout>& l,
                        const std::optional<std::string>& svg) {
        auto status = status_of(id);
        analysis::PropertySet stored = props;
        stored.crossing_number.reset();
        std::string doc = json::to_json(stored).dump();
        Status target = props.analysis_skipped ? Status::analysis_skipped : Status::analyzed;
        if (status != Status::pending_analysis) {
            auto st = db_.prepare("SELECT properties FROM graphs WHERE id = ?");
            st.bind(1, id);
            st.step();
            if (status == target && st.opt_text(0) == doc) return;
            throw InvalidTransition("graph " + id + " is already " + std::string(to_string(status)));
        }
        db_.prepare("UPDATE graphs SET properties = ?, status = ?, status_message = ? WHERE id = ?")
            .bind(1, doc)
            .bind(2, to_string(target))
            .bind(3, props.analysis_skipped ? props.skip_reason : std::string())
            .bind(4, id)
            .run();
        db_.prepare("DELETE FROM props WHERE graph_id = ? AND name <> 'crossing_number'").bind(1, id).run();
        for (const auto& [name, value] : store_detail::property_rows(stored))
            db_.prepare("INSERT INTO props(graph_id, name, value) VALUES(?, ?, ?)").bind(1, id).bind(2, name).bind(3, value).run();
        if (l) write_layout(id, *l, svg);
    }

    Status status_of(const GraphId& id) {
        auto st = db_.prepare("SELECT status, deleted_at FROM graphs WHERE id = ?");
        st.bind(1, id);
        if (!st.step()) throw NotFound("graph " + id);
        if (!st.is_null(1)) throw Gone(id);
        return parse_status(st.text(0));
    }

    void live_or_throw(const GraphId& id) { status_of(id); }

    void load_annotations(const GraphId& id, Metadata& m) {
        auto tags = db_.prepare("SELECT value, kind FROM tags WHERE graph_id = ? ORDER BY pos");
        tags.bind(1, id);
        while (tags.step()) m.tags.push_back({tags.text(0), parse_tag_kind(tags.text(1)).value_or(TagKind::freeform)});
        auto comments = db_.prepare("SELECT author, at, text FROM comments WHERE graph_id = ? ORDER BY seq");
        comments.bind(1, id);
        while (comments.step()) m.comments.push_back({comments.text(0), from_millis(comments.int64(1)), comments.text(2)});
        auto refs = db_.prepare("SELECT kind, citation FROM refs WHERE graph_id = ? ORDER BY seq");
        refs.bind(1, id);
        while (refs.step())
            m.references.push_back({parse_reference_kind(refs.text(0)).value_or(ReferenceKind::website), refs.text(1)});
    }

    static void require_property(const std::string& name, const std::vector<std::string>& names, const char* kind) {
        if (std::find(names.begin(), names.end(), name) == names.end())
            throw UnknownProperty("'" + name + "' is not a " + kind + " property");
    }

    static std::string first_changed_field(const analysis::PropertySet& p) {
        analysis::PropertySet d;
        auto j = json::to_json(p), dj = json::to_json(d);
        for (const auto& [key, value] : j.items())
            if (dj[key] != value) return key;
        return "unknown";
    }

    static bool skip_on_import(const std::string& name) {
        if (name == "manifest.txt" || name.starts_with("__MACOSX/")) return true;
        if (name.size() >= 10 && name.ends_with(".loss.json")) return true;
        auto slash = name.find_last_of('/');
        std::string base = slash == std::string::npos ? name : name.substr(slash + 1);
        return base.empty() || base.front() == '.';
    }

    /// Content sniffing first; the extension decides when sniffing is ambiguous or fails.
    static formats::FormatId detect_for_import(const std::string& name, const std::string& data) {
        try {
            return formats::detect_format(data);
        } catch (const UnknownFormat& ex) {
            try {
                return formats::format_from_extension(name);
            } catch (const UnknownFormat&) {
                throw ParseFailed("UnknownFormat", ex.what());
            }
        }
    }

    std::filesystem::path dir_;
    ArchiveConfig config_;
    std::mutex mutex_;
    sql::Database db_;
    UlidGenerator ids_;
};

} // namespace oga::archive
