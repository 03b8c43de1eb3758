#include "srpsim/hash.hpp"

#include <cstdio>

namespace srpsim {

std::uint64_t keyed_mix(std::uint64_t key, std::span<const std::uint8_t> bytes) noexcept {
    std::uint64_t h = splitmix64(key ^ (0x5bd1e9955bd1e995ULL * (bytes.size() + 1)));
    std::size_t i = 0;
    while (i < bytes.size()) {
        std::uint64_t word = 0;
        for (int b = 0; b < 8 && i < bytes.size(); ++b, ++i) {
            word |= static_cast<std::uint64_t>(bytes[i]) << (8 * b);
        }
        h = splitmix64(h ^ word) + key;
        h = (h << 27) | (h >> 37);
    }
    return splitmix64(h ^ key);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bool parse_hex64(std::string_view text, std::uint64_t& out) noexcept {
    if (text.size() != 16) return false;
    std::uint64_t v = 0;
    for (char c : text) {
        v <<= 4;
        if (c >= '0' && c <= '9') {
            v |= static_cast<std::uint64_t>(c - '0');
        } else if (c >= 'a' && c <= 'f') {
            v |= static_cast<std::uint64_t>(c - 'a' + 10);
        } else {
            return false;
        }
    }
    out = v;
    return true;
}

}  // namespace srpsim
