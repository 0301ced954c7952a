#pragma once

#include <oga/error.hpp>

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

/// Minimal zip container: stored and deflated entries, no zip64, no
/// encryption, no multi-disk archives.
namespace oga::archive::zip {

class CorruptArchive : public Error {
public:
    explicit CorruptArchive(const std::string& message) : Error("CorruptArchive", message) {}
};

struct Entry {
    std::string name;
    std::string data;
};

namespace zip_detail {

inline std::uint32_t crc(std::string_view data) {
    uLong c = crc32(0L, Z_NULL, 0);
    std::size_t done = 0;
    while (done < data.size()) {
        auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - done, 1u << 30));
        c = crc32(c, reinterpret_cast<const Bytef*>(data.data() + done), chunk);
        done += chunk;
    }
    return static_cast<std::uint32_t>(c);
}

inline void put16(std::string& out, std::uint32_t v) {
    out += static_cast<char>(v & 0xFF);
    out += static_cast<char>((v >> 8) & 0xFF);
}

inline void put32(std::string& out, std::uint32_t v) {
    put16(out, v & 0xFFFF);
    put16(out, v >> 16);
}

inline std::uint32_t get16(std::string_view in, std::size_t at) {
    if (at + 2 > in.size()) throw CorruptArchive("truncated zip structure");
    return static_cast<std::uint8_t>(in[at]) | static_cast<std::uint32_t>(static_cast<std::uint8_t>(in[at + 1])) << 8;
}

inline std::uint32_t get32(std::string_view in, std::size_t at) { return get16(in, at) | get16(in, at + 2) << 16; }

inline std::string deflate_raw(std::string_view data) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw std::runtime_error("deflateInit2 failed");
    std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&zs, Z_FINISH);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw std::runtime_error("deflate failed");
    return out;
}

inline std::string inflate_raw(std::string_view data, std::size_t expected) {
    z_stream zs{};
    if (inflateInit2(&zs, -15) != Z_OK) throw std::runtime_error("inflateInit2 failed");
    std::string out(expected, '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    std::size_t produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != expected) throw CorruptArchive("deflate stream does not match its declared size");
    return out;
}

} // namespace zip_detail

/// Deflates each entry unless that makes it larger.
inline std::string write(const std::vector<Entry>& entries) {
    using namespace zip_detail;
    std::string out, central;
    for (const auto& e : entries) {
        if (e.data.size() > 0xFFFF'FFF0u || out.size() > 0xFFFF'FFF0u) throw std::length_error("zip64 is not supported");
        std::uint32_t checksum = crc(e.data);
        std::string packed = deflate_raw(e.data);
        std::uint32_t method = 8;
        if (packed.size() >= e.data.size()) packed = e.data, method = 0;
        auto offset = static_cast<std::uint32_t>(out.size());
        auto header = [&](std::string& s, bool central_entry) {
            put32(s, central_entry ? 0x02014b50 : 0x04034b50);
            if (central_entry) put16(s, 20);  // version made by
            put16(s, 20);                     // version needed
            put16(s, 0x0800);                 // UTF-8 names
            put16(s, method);
            put16(s, 0);  // time
            put16(s, 0x21);  // date: 1980-01-01
            put32(s, checksum);
            put32(s, static_cast<std::uint32_t>(packed.size()));
            put32(s, static_cast<std::uint32_t>(e.data.size()));
            put16(s, static_cast<std::uint32_t>(e.name.size()));
            put16(s, 0);  // extra
            if (central_entry) {
                put16(s, 0);  // comment
                put16(s, 0);  // disk
                put16(s, 0);  // internal attrs
                put32(s, 0);  // external attrs
                put32(s, offset);
            }
            s += e.name;
        };
        header(out, false);
        out += packed;
        header(central, true);
    }
    auto central_offset = static_cast<std::uint32_t>(out.size());
    out += central;
    put32(out, 0x06054b50);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<std::uint32_t>(entries.size()));
    put16(out, static_cast<std::uint32_t>(entries.size()));
    put32(out, static_cast<std::uint32_t>(central.size()));
    put32(out, central_offset);
    put16(out, 0);
    return out;
}

/// Reads every file entry (directories are skipped) and verifies its CRC.
/// Throws CorruptArchive on any structural problem.
inline std::vector<Entry> read(std::string_view in) {
    using namespace zip_detail;
    if (in.size() < 22) throw CorruptArchive("not a zip archive");
    std::size_t eocd = std::string_view::npos;
    std::size_t lowest = in.size() >= 22 + 0xFFFF ? in.size() - 22 - 0xFFFF : 0;
    for (std::size_t at = in.size() - 22 + 1; at-- > lowest;) {
        if (get32(in, at) == 0x06054b50) {
            eocd = at;
            break;
        }
    }
    if (eocd == std::string_view::npos) throw CorruptArchive("no end-of-central-directory record");
    std::uint32_t count = get16(in, eocd + 10);
    std::uint32_t cd_size = get32(in, eocd + 12);
    std::uint32_t cd_offset = get32(in, eocd + 16);
    if (get16(in, eocd + 4) != 0 || get16(in, eocd + 6) != 0) throw CorruptArchive("multi-disk archives are not supported");
    if (count == 0xFFFF || cd_offset == 0xFFFF'FFFFu) throw CorruptArchive("zip64 archives are not supported");
    if (static_cast<std::uint64_t>(cd_offset) + cd_size > eocd) throw CorruptArchive("central directory out of range");

    std::vector<Entry> entries;
    std::size_t at = cd_offset;
    for (std::uint32_t i = 0; i < count; ++i) {
        if (get32(in, at) != 0x02014b50) throw CorruptArchive("bad central directory entry");
        std::uint32_t flags = get16(in, at + 8);
        std::uint32_t method = get16(in, at + 10);
        std::uint32_t checksum = get32(in, at + 16);
        std::uint32_t packed_size = get32(in, at + 20);
        std::uint32_t size = get32(in, at + 24);
        std::uint32_t name_len = get16(in, at + 28), extra_len = get16(in, at + 30), comment_len = get16(in, at + 32);
        std::uint32_t local = get32(in, at + 42);
        if (at + 46 + name_len > in.size()) throw CorruptArchive("truncated central directory");
        std::string name(in.substr(at + 46, name_len));
        at += 46 + name_len + extra_len + comment_len;

        if (flags & 1) throw CorruptArchive("encrypted entry '" + name + "'");
        if (get32(in, local) != 0x04034b50) throw CorruptArchive("bad local header for '" + name + "'");
        std::size_t data_at = local + 30 + get16(in, local + 26) + get16(in, local + 28);
        if (data_at + packed_size > in.size()) throw CorruptArchive("entry '" + name + "' runs past the end");
        std::string_view packed = in.substr(data_at, packed_size);
        if (!name.empty() && name.back() == '/') continue;

        std::string data;
        if (method == 0) {
            if (packed_size != size) throw CorruptArchive("stored entry '" + name + "' has inconsistent sizes");
            data = std::string(packed);
        } else if (method == 8) {
            // Deflate cannot expand by more than about 1032:1; larger claims are corrupt.
            if (size > static_cast<std::uint64_t>(packed_size) * 1032 + 64)
                throw CorruptArchive("entry '" + name + "' declares an impossible size");
            data = inflate_raw(packed, size);
        } else {
            throw CorruptArchive("entry '" + name + "' uses unsupported compression method " + std::to_string(method));
        }
        if (crc(data) != checksum) throw CorruptArchive("checksum mismatch in '" + name + "'");
        entries.push_back({std::move(name), std::move(data)});
    }
    return entries;
}

} // namespace oga::archive::zip
