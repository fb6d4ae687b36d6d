#include "scenery/stable_law.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "scenery/error.hpp"
#include "scenery/quadrature.hpp"

namespace scenery {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_integer_index(double index) { return index == std::floor(index); }

double parse_double(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw Error(Errc::invalid_argument, "not a number: '" + text + "'");
    }
    if (used != text.size()) throw Error(Errc::invalid_argument, "not a number: '" + text + "'");
    return v;
}

// Parses "p" or "num/den".
std::pair<double, std::optional<ExactProb>> parse_probability(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return {parse_double(text), std::nullopt};
    auto num = static_cast<std::int64_t>(parse_wide_int(text.substr(0, slash)));
    auto den = static_cast<std::int64_t>(parse_wide_int(text.substr(slash + 1)));
    if (den <= 0 || num < 0) throw Error(Errc::invalid_argument, "bad rational '" + text + "'");
    return {static_cast<double>(num) / static_cast<double>(den), ExactProb{num, den}};
}

wide_int atoms_span(const std::vector<PmfAtom>& atoms) {
    wide_int g = 0;
    for (const auto& a : atoms) g = wide_gcd(g, a.value - atoms.front().value);
    return g;
}

std::optional<StableParams> finite_attraction(const std::vector<PmfAtom>& atoms) {
    long double mean = 0, second = 0;
    for (const auto& a : atoms) {
        auto v = static_cast<long double>(a.value);
        mean += v * a.probability;
        second += v * v * a.probability;
    }
    long double var = second - mean * mean;
    if (std::abs(static_cast<double>(mean)) > 1e-12 || var <= 0) return std::nullopt;
    return StableParams{2.0, static_cast<double>(var / 2), 0.0};
}

DistributionSpec zeta_tail(double index) {
    if (!(index > 0.0 && index < 2.0) || index == 1.0)
        throw Error(Errc::invalid_argument, "zeta-tail index must lie in (0,1) or (1,2)");
    double s = 1.0 + index;
    double zeta = boost::math::zeta(s);
    // int_K^inf x^-s dx bounds the dropped tail; pick K so that bound / zeta <= 1e-12.
    double k_real = std::ceil(std::pow(1e-12 * index * zeta, -1.0 / index));
    if (!(k_real < 0x1.0p96))
        throw Error(Errc::truncation_mass_too_large,
                    "zeta-tail(" + std::to_string(index) +
                        "): truncation point for 1e-12 omitted mass exceeds 2^96");
    PowerTail tail;
    tail.index = index;
    tail.truncation = static_cast<wide_int>(k_real);
    tail.omitted_mass = std::pow(k_real, -index) / (index * zeta);
    // Euler-Maclaurin for sum_{k > K} k^-s.
    double above = std::pow(k_real, -index) / index - 0.5 * std::pow(k_real, -s) +
                   s * std::pow(k_real, -s - 1.0) / 12.0;
    tail.normalizer = zeta - above;

    DistributionSpec spec;
    std::ostringstream name;
    name << "zeta-tail(" << index << ")";
    spec.name = name.str();
    spec.kind = DistKind::lattice_pmf;
    spec.tail = tail;
    spec.declared_span = 1;
    // P(|X| > x) ~ x^-index / (index zeta(s)); 1 - phi(u) ~ A1 |u|^index.
    double a1 = boost::math::tgamma(1.0 - index) * std::cos(kPi * index / 2.0) / (index * zeta);
    spec.attraction = StableParams{index, a1, 0.0};
    return spec;
}

DistributionSpec centered_geometric(double q) {
    if (!(q > 0.0 && q < 1.0)) throw Error(Errc::invalid_argument, "centered-geometric q must lie in (0,1)");
    // Difference of two i.i.d. geometrics: P(k) = (1-q)/(1+q) q^|k|; tail beyond K
    // has mass 2 q^(K+1) / (1+q).
    int K = 1;
    while (2.0 * std::pow(q, K + 1) / (1.0 + q) >= 1e-12) ++K;
    std::vector<PmfAtom> atoms;
    double total = 0.0;
    for (int k = -K; k <= K; ++k) total += std::pow(q, std::abs(k));
    for (int k = -K; k <= K; ++k) atoms.push_back({k, std::pow(q, std::abs(k)) / total, std::nullopt});
    if (q == 0.5) {
        // Exact: 2^(K-1-|k|) / (3 * 2^(K-1) - 1).
        std::int64_t den = 3 * (std::int64_t{1} << (K - 1)) - 1;
        for (auto& a : atoms) {
            int k = static_cast<int>(wide_abs(a.value));
            a.exact = ExactProb{std::int64_t{1} << (K - 1 - k), den};
        }
    }
    std::ostringstream name;
    name << "centered-geometric(" << q << ")";
    auto spec = make_finite_pmf(name.str(), std::move(atoms));
    spec.attraction = StableParams{2.0, q / ((1.0 - q) * (1.0 - q)), 0.0};
    return spec;
}

std::string strip_call(const std::string& name, const std::string& head) {
    // name == head + "(" + args + ")"
    if (name.size() < head.size() + 2 || name.compare(0, head.size() + 1, head + "(") != 0 ||
        name.back() != ')')
        return {};
    return name.substr(head.size() + 1, name.size() - head.size() - 2);
}

}  // namespace

void StableParams::validate() const {
    if (!(index > 0.0 && index <= 2.0))
        throw Error(Errc::invalid_argument, "stable index must lie in (0,2]");
    if (!(A1 > 0.0 && std::isfinite(A1))) throw Error(Errc::invalid_argument, "A1 must be > 0");
    if (index == 1.0) {
        if (A2 != 0.0) throw Error(Errc::invalid_argument, "A2 must be 0 at index 1");
        return;
    }
    double bound = std::abs(std::tan(kPi * index / 2.0));
    if (std::abs(A2 / A1) > bound + 1e-12)
        throw Error(Errc::invalid_argument, "|A2/A1| exceeds |tan(pi index/2)|");
}

std::complex<double> stable_cf(double u, const StableParams& params) {
    if (u == 0.0) return {1.0, 0.0};
    double mag = std::pow(std::abs(u), params.index);
    double sgn = u > 0 ? 1.0 : -1.0;
    return std::exp(std::complex<double>(-mag * params.A1, -mag * params.A2 * sgn));
}

double stable_inversion_cutoff(const StableParams& params, double tol) {
    const double index = params.index;
    const double a1 = params.A1;
    // (1/pi) int_T^inf exp(-A1 t^index) dt = Gamma(1/index, A1 T^index) / (pi index A1^(1/index)).
    auto tail = [&](double T) {
        return boost::math::tgamma(1.0 / index, a1 * std::pow(T, index)) /
               (kPi * index * std::pow(a1, 1.0 / index));
    };
    double arg = -std::log(tol * a1 / 10.0) / a1;
    double T = arg > 0 ? std::pow(arg, 1.0 / index) : 1.0;
    while (tail(T) > tol / 10.0) T *= 1.25;
    return T;
}

double stable_density(double x, const StableParams& params, double tol) {
    params.validate();
    if (!(tol > 0.0)) throw Error(Errc::invalid_argument, "tol must be > 0");
    const double T = stable_inversion_cutoff(params, tol);
    const double index = params.index;
    // t = T s^q smooths exp(-A1 t^index) at the origin for fractional indices.
    const double q = is_integer_index(index) ? 1.0 : std::ceil(2.0 / index);
    auto integrand = [&](double s) {
        if (s <= 0.0) return q == 1.0 ? T : 0.0;
        double t = T * std::pow(s, q);
        double tb = std::pow(t, index);
        double jac = q * T * std::pow(s, q - 1.0);
        return std::exp(-params.A1 * tb) * std::cos(t * x + params.A2 * tb) * jac;
    };
    QuadratureOptions opt;
    opt.tol = tol * kPi / 2.0;
    auto res = integrate_panels(integrand, 0.0, 1.0, opt);
    return res.value / kPi;
}

double stable_sample(const StableParams& params, RngStream& stream) {
    params.validate();
    if (!params.symmetric())
        throw Error(Errc::unsupported_skew, "stable_sample supports symmetric laws only (A2 == 0)");
    const double index = params.index;
    if (index == 2.0) return std::sqrt(2.0 * params.A1) * stream.normal();
    if (index == 1.0) return params.A1 * std::tan(kPi * (stream.uniform_open() - 0.5));
    double v = kPi * (stream.uniform_open() - 0.5);
    double w = stream.exponential();
    double x = std::sin(index * v) / std::pow(std::cos(v), 1.0 / index) *
               std::pow(std::cos((1.0 - index) * v) / w, (1.0 - index) / index);
    return std::pow(params.A1, 1.0 / index) * x;
}

bool DistributionSpec::all_exact() const noexcept {
    if (!finite_support()) return false;
    return std::all_of(atoms.begin(), atoms.end(), [](const PmfAtom& a) { return a.exact.has_value(); });
}

double DistributionSpec::probability(wide_int value) const {
    if (!is_lattice()) throw Error(Errc::not_lattice, name + " has no point masses");
    if (tail) {
        if (value == 0 || wide_abs(value) > tail->truncation) return 0.0;
        double k = static_cast<double>(wide_abs(value));
        return 0.5 * std::pow(k, -1.0 - tail->index) / tail->normalizer;
    }
    auto it = std::lower_bound(atoms.begin(), atoms.end(), value,
                               [](const PmfAtom& a, wide_int v) { return a.value < v; });
    return (it != atoms.end() && it->value == value) ? it->probability : 0.0;
}

wide_int DistributionSpec::max_abs_value() const {
    if (!is_lattice()) throw Error(Errc::not_lattice, name + " is continuous");
    if (tail) return tail->truncation;
    wide_int m = 0;
    for (const auto& a : atoms) m = std::max(m, wide_abs(a.value));
    return m;
}

DistributionSpec make_finite_pmf(const std::string& name, std::vector<PmfAtom> atoms) {
    std::map<wide_int, PmfAtom> merged;
    for (auto& a : atoms) {
        if (!(a.probability >= 0.0)) throw Error(Errc::invalid_argument, name + ": negative probability");
        if (a.probability == 0.0) continue;
        auto [it, inserted] = merged.emplace(a.value, a);
        if (!inserted) {
            it->second.probability += a.probability;
            it->second.exact.reset();
        }
    }
    if (merged.empty()) throw Error(Errc::invalid_argument, name + ": empty support");
    DistributionSpec spec;
    spec.name = name;
    spec.kind = DistKind::lattice_pmf;
    double total = 0.0;
    for (auto& [v, a] : merged) {
        spec.atoms.push_back(a);
        total += a.probability;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw Error(Errc::invalid_argument, name + ": probabilities sum to " + std::to_string(total));
    spec.declared_span = atoms_span(spec.atoms);
    spec.attraction = finite_attraction(spec.atoms);
    return spec;
}

DistributionSpec catalog(const std::string& name) {
    if (name == "rademacher") {
        auto spec = make_finite_pmf(name, {{-1, 0.5, ExactProb{1, 2}}, {1, 0.5, ExactProb{1, 2}}});
        spec.attraction = StableParams{2.0, 0.5, 0.0};
        return spec;
    }
    if (name == "lazy-uniform") {
        auto third = ExactProb{1, 3};
        auto spec = make_finite_pmf(name, {{-1, 1.0 / 3, third}, {0, 1.0 / 3, third}, {1, 1.0 / 3, third}});
        spec.attraction = StableParams{2.0, 1.0 / 3.0, 0.0};
        return spec;
    }
    if (name == "gaussian") {
        DistributionSpec spec;
        spec.name = name;
        spec.kind = DistKind::continuous;
        spec.gaussian_sd = 1.0;
        spec.attraction = StableParams{2.0, 0.5, 0.0};
        return spec;
    }
    if (name == "centered-geometric") return centered_geometric(0.5);
    if (auto args = strip_call(name, "centered-geometric"); !args.empty())
        return centered_geometric(parse_double(args));
    if (auto args = strip_call(name, "zeta-tail"); !args.empty()) return zeta_tail(parse_double(args));
    if (auto args = strip_call(name, "pmf"); !args.empty()) {
        std::vector<PmfAtom> atoms;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos)
                throw Error(Errc::invalid_argument, "pmf entry must be value:probability, got '" + item + "'");
            auto [p, exact] = parse_probability(item.substr(colon + 1));
            atoms.push_back({parse_wide_int(item.substr(0, colon)), p, exact});
        }
        return make_finite_pmf(name, std::move(atoms));
    }
    throw Error(Errc::unknown_name, "unknown distribution '" + name + "'");
}

}  // namespace scenery
