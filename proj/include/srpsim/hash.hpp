#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace srpsim {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

// Incremental FNV-1a, used for trace and message digests.
class Fnv1a {
public:
    void update(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= kFnvPrime;
        }
    }

    void update(std::span<const std::uint8_t> bytes) noexcept {
        for (std::uint8_t c : bytes) {
            state_ ^= c;
            state_ *= kFnvPrime;
        }
    }

    std::uint64_t value() const noexcept { return state_; }

private:
    std::uint64_t state_ = kFnvOffset;
};

// Keyed 64-bit mixer over a byte string. Not a cryptographic MAC; forgery
// resistance in the simulator comes from key-access control.
std::uint64_t keyed_mix(std::uint64_t key, std::span<const std::uint8_t> bytes) noexcept;

std::string hex64(std::uint64_t v);

// Parses 16 hex digits; returns false on malformed input.
bool parse_hex64(std::string_view text, std::uint64_t& out) noexcept;

}  // namespace srpsim
