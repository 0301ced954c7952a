#pragma once

#include <oga/metadata.hpp>

#include <array>
#include <cstdint>
#include <mutex>
#include <random>
#include <string>
#include <string_view>

namespace oga::archive {

/// 26-character ULIDs: 48-bit millisecond timestamp then 80 random bits, in
/// Crockford base32. Ids from one generator are strictly increasing, also
/// within a millisecond (the random part is incremented).
class UlidGenerator {
public:
    std::string next() { return next(now_utc()); }

    std::string next(Timestamp at) {
        std::lock_guard lock(mutex_);
        auto ms = static_cast<std::uint64_t>(to_millis(at)) & 0xFFFF'FFFF'FFFFULL;
        if (ms <= last_ms_ && have_last_) {
            ms = last_ms_;
            increment();
        } else {
            for (auto& b : random_) b = static_cast<std::uint8_t>(device_() & 0xFF);
        }
        last_ms_ = ms;
        have_last_ = true;
        return encode(ms, random_);
    }

    static std::string encode(std::uint64_t ms, const std::array<std::uint8_t, 10>& random) {
        static constexpr char alphabet[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";
        std::array<std::uint8_t, 16> bytes{};
        for (int i = 0; i < 6; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(ms >> (40 - 8 * i));
        for (std::size_t i = 0; i < 10; ++i) bytes[6 + i] = random[i];
        // 128 bits as 26 five-bit groups; the first group carries only 3 bits.
        std::string out(26, '0');
        for (int c = 25, bit = 0; c >= 0; --c, bit += 5) {
            unsigned v = 0;
            for (int k = 0; k < 5; ++k) {
                int b = bit + k;
                if (b >= 128) break;
                int byte = 15 - b / 8;
                v |= ((bytes[static_cast<std::size_t>(byte)] >> (b % 8)) & 1u) << k;
            }
            out[static_cast<std::size_t>(c)] = alphabet[v];
        }
        return out;
    }

private:
    void increment() {
        for (std::size_t i = random_.size(); i-- > 0;)
            if (++random_[i] != 0) return;
    }

    std::mutex mutex_;
    std::random_device device_;
    std::array<std::uint8_t, 10> random_{};
    std::uint64_t last_ms_ = 0;
    bool have_last_ = false;
};

inline bool is_ulid(std::string_view s) {
    if (s.size() != 26 || s[0] > '7') return false;
    for (char c : s) {
        bool ok = (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z' && c != 'I' && c != 'L' && c != 'O' && c != 'U');
        if (!ok) return false;
    }
    return true;
}

} // namespace oga::archive
