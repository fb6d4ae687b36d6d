#include "scenery/error.hpp"
#include "scenery/wide_int.hpp"

namespace scenery {

const char* to_string(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::quadrature_nonconvergence: return "quadrature-nonconvergence";
        case Errc::unsupported_skew: return "unsupported-skew";
        case Errc::unknown_name: return "unknown-name";
        case Errc::not_lattice: return "not-lattice";
        case Errc::budget_exceeded: return "budget-exceeded";
        case Errc::truncation_mass_too_large: return "truncation-mass-too-large";
        case Errc::bridge_rejection_exhausted: return "bridge-rejection-exhausted";
        case Errc::invalid_p0: return "invalid-p0";
        case Errc::insufficient_points: return "insufficient-points";
    }
    return "unknown";
}

std::string to_string(wide_int v) {
    if (v == 0) return "0";
    bool negative = v < 0;
    auto mag = negative ? static_cast<unsigned __int128>(-(v + 1)) + 1
                        : static_cast<unsigned __int128>(v);
    std::string digits;
    while (mag != 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(mag % 10)));
        mag /= 10;
    }
    if (negative) digits.push_back('-');
    return {digits.rbegin(), digits.rend()};
}

wide_int parse_wide_int(const std::string& text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        negative = text[i] == '-';
        ++i;
    }
    if (i == text.size()) throw Error(Errc::invalid_argument, "not an integer: '" + text + "'");
    unsigned __int128 mag = 0;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c < '0' || c > '9') throw Error(Errc::invalid_argument, "not an integer: '" + text + "'");
        mag = mag * 10 + static_cast<unsigned>(c - '0');
        if (mag > (static_cast<unsigned __int128>(1) << 126))
            throw Error(Errc::invalid_argument, "integer out of range: '" + text + "'");
    }
    auto v = static_cast<wide_int>(mag);
    return negative ? -v : v;
}

wide_int wide_abs(wide_int v) { return v < 0 ? -v : v; }

wide_int wide_gcd(wide_int a, wide_int b) {
    a = wide_abs(a);
    b = wide_abs(b);
    while (b != 0) {
        wide_int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

wide_int wide_mod(wide_int v, wide_int m) {
    wide_int r = v % m;
    return r < 0 ? r + m : r;
}

}  // namespace scenery
