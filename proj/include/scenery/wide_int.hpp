#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace scenery {

// Sites, walk positions and lattice scenery sums. Heavy-tailed step laws are
// truncated far beyond the 64-bit range, so positions need 128 bits.
__extension__ typedef __int128 wide_int;

std::string to_string(wide_int v);
wide_int parse_wide_int(const std::string& text);
wide_int wide_abs(wide_int v);
wide_int wide_gcd(wide_int a, wide_int b);

// Floor-mod with a positive modulus (result in [0, m)).
wide_int wide_mod(wide_int v, wide_int m);

struct WideIntHash {
    std::size_t operator()(wide_int v) const noexcept {
        auto lo = static_cast<std::uint64_t>(v);
        auto hi = static_cast<std::uint64_t>(static_cast<unsigned __int128>(v) >> 64);
        std::uint64_t h = lo ^ (hi * 0x9E3779B97F4A7C15ULL);
        h ^= h >> 33;
        h *= 0xFF51AFD7ED558CCDULL;
        h ^= h >> 33;
        return static_cast<std::size_t>(h);
    }
};

}  // namespace scenery
