#pragma once

#include <oga/error.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oga {

using Timestamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::milliseconds>;

inline Timestamp now_utc() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

inline std::int64_t to_millis(Timestamp t) { return t.time_since_epoch().count(); }
inline Timestamp from_millis(std::int64_t ms) { return Timestamp(std::chrono::milliseconds(ms)); }

/// "2026-10-19T08:15:00.123Z"
inline std::string format_timestamp(Timestamp t) {
    std::int64_t ms = to_millis(t);
    std::int64_t secs = ms >= 0 ? ms / 1000 : (ms - 999) / 1000;
    int frac = static_cast<int>(ms - secs * 1000);
    std::time_t tt = static_cast<std::time_t>(secs);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
    return buf;
}

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS", optional ".fff" and trailing "Z".
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, ms = 0;
    auto digits = [&](std::size_t pos, std::size_t len, int& out) {
        if (pos + len > s.size()) return false;
        out = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
            out = out * 10 + (s[i] - '0');
        }
        return true;
    };
    if (!digits(0, 4, y) || s.size() < 10 || s[4] != '-' || !digits(5, 2, mo) || s[7] != '-' ||
        !digits(8, 2, d))
        return std::nullopt;
    std::size_t pos = 10;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
        if (!digits(pos + 1, 2, h) || pos + 3 >= s.size() || s[pos + 3] != ':' || !digits(pos + 4, 2, mi) ||
            pos + 6 >= s.size() || s[pos + 6] != ':' || !digits(pos + 7, 2, sec))
            return std::nullopt;
        pos += 9;
        if (pos < s.size() && s[pos] == '.') {
            if (!digits(pos + 1, 3, ms)) return std::nullopt;
            pos += 4;
        }
    }
    if (pos < s.size() && s[pos] == 'Z') ++pos;
    if (pos != s.size()) return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60) return std::nullopt;
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    auto tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{ms};
    return time_point_cast<milliseconds>(tp);
}

class InvalidTag : public Error {
public:
    explicit InvalidTag(const std::string& value)
        : Error("InvalidTag", "invalid tag '" + value + "': expected [a-z0-9][a-z0-9_-]{0,63}") {}
};

enum class TagKind { application_domain, structural, freeform };

inline std::string_view to_string(TagKind k) {
    switch (k) {
    case TagKind::application_domain: return "application-domain";
    case TagKind::structural: return "structural";
    case TagKind::freeform: return "freeform";
    }
    return "freeform";
}

inline std::optional<TagKind> parse_tag_kind(std::string_view s) {
    if (s == "application-domain") return TagKind::application_domain;
    if (s == "structural") return TagKind::structural;
    if (s == "freeform") return TagKind::freeform;
    return std::nullopt;
}

inline bool valid_tag_value(std::string_view v) {
    if (v.empty() || v.size() > 64) return false;
    auto alnum = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
    if (!alnum(v.front())) return false;
    return std::all_of(v.begin() + 1, v.end(), [&](char c) { return alnum(c) || c == '_' || c == '-'; });
}

struct Tag {
    std::string value;
    TagKind kind = TagKind::freeform;

    bool operator==(const Tag&) const = default;

    /// Lowercases and trims `raw`, then validates it against the tag grammar.
    static Tag make(std::string_view raw, TagKind kind = TagKind::freeform) {
        auto b = raw.find_first_not_of(" \t\r\n");
        auto e = raw.find_last_not_of(" \t\r\n");
        std::string v = b == std::string_view::npos ? std::string{} : std::string(raw.substr(b, e - b + 1));
        std::transform(v.begin(), v.end(), v.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (!valid_tag_value(v)) throw InvalidTag(std::string(raw));
        return Tag{std::move(v), kind};
    }
};

/// Normalizes a tag list: validated, first occurrence of each value kept.
inline std::vector<Tag> normalize_tags(const std::vector<Tag>& tags) {
    std::vector<Tag> out;
    for (const auto& t : tags) {
        Tag n = Tag::make(t.value, t.kind);
        if (std::none_of(out.begin(), out.end(), [&](const Tag& x) { return x.value == n.value; }))
            out.push_back(std::move(n));
    }
    return out;
}

enum class ReferenceKind { publication, website };

inline std::string_view to_string(ReferenceKind k) {
    return k == ReferenceKind::publication ? "publication" : "website";
}

inline std::optional<ReferenceKind> parse_reference_kind(std::string_view s) {
    if (s == "publication") return ReferenceKind::publication;
    if (s == "website") return ReferenceKind::website;
    return std::nullopt;
}

struct Reference {
    ReferenceKind kind = ReferenceKind::publication;
    std::string citation_or_url;

    bool operator==(const Reference&) const = default;
};

struct Comment {
    std::string author;
    Timestamp at{};
    std::string text;

    bool operator==(const Comment&) const = default;
};

struct Metadata {
    std::string name;
    std::string creator;
    Timestamp uploaded_at{};
    std::optional<std::string> description;
    std::optional<std::string> creation_method;
    std::optional<std::string> license;
    std::vector<Tag> tags;
    std::vector<Comment> comments;
    std::vector<Reference> references;

    bool operator==(const Metadata&) const = default;
};

class InvalidMetadata : public Error {
public:
    explicit InvalidMetadata(const std::string& message) : Error("InvalidMetadata", message) {}
};

/// Mandatory fields are name and creator; tags must already be normalized.
inline void validate(const Metadata& m) {
    if (m.name.empty()) throw InvalidMetadata("metadata name is mandatory");
    if (m.creator.empty()) throw InvalidMetadata("metadata creator is mandatory");
    for (const auto& r : m.references)
        if (r.citation_or_url.empty()) throw InvalidMetadata("reference must be non-empty");
}

/// Partial update for update_metadata; unset fields are left untouched.
struct MetadataPatch {
    std::optional<std::string> name;
    std::optional<std::string> description;
    std::optional<std::string> creation_method;
    std::optional<std::string> license;
};

} // namespace oga
