#include "scenery/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "scenery/error.hpp"
#include "scenery/quadrature.hpp"

namespace scenery {

namespace {

constexpr double kPi = std::numbers::pi;

Rational to_rational(const ExactProb& p) { return Rational(p.num, p.den); }

void check_budget(std::size_t support, std::uint64_t n) {
    double paths = std::pow(static_cast<double>(support), static_cast<double>(n));
    if (paths > static_cast<double>(kEnumerationBudget))
        throw Error(Errc::budget_exceeded, std::to_string(support) + "^" + std::to_string(n) +
                                               " paths exceed the enumeration budget of 1e7");
}

const std::vector<PmfAtom>& finite_atoms(const DistributionSpec& d, const char* role) {
    if (!d.is_lattice()) throw Error(Errc::not_lattice, std::string(role) + " " + d.name + " is not a lattice law");
    if (d.tail) {
        if (d.tail->omitted_mass > 1e-9)
            throw Error(Errc::truncation_mass_too_large, std::string(role) + " " + d.name + " truncation too coarse");
        throw Error(Errc::budget_exceeded, std::string(role) + " " + d.name + " has too many atoms to enumerate");
    }
    return d.atoms;
}

// Depth-first walk over all step sequences of length n.
template <class Leaf>
void enumerate_paths(const std::vector<PmfAtom>& atoms, std::uint64_t n, bool exact, Leaf&& leaf) {
    wide_int reach = 0;
    for (const auto& a : atoms) reach = std::max(reach, wide_abs(a.value));
    reach *= static_cast<wide_int>(n);
    if (reach > (wide_int{1} << 26)) throw Error(Errc::budget_exceeded, "step values too large to enumerate");
    const auto offset = static_cast<std::int64_t>(reach);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(2 * offset + 1), 0);
    std::vector<std::int64_t> visited;
    std::vector<double> weight(n + 1, 1.0);
    std::vector<Rational> exact_weight(exact ? n + 1 : 0, Rational(1));

    auto rec = [&](auto&& self, std::uint64_t depth, std::int64_t pos) -> void {
        if (depth == n) {
            leaf(counts, visited, offset, weight[n], exact ? exact_weight[n] : Rational(0));
            return;
        }
        auto& c = counts[static_cast<std::size_t>(pos + offset)];
        if (c++ == 0) visited.push_back(pos);
        for (const auto& a : atoms) {
            weight[depth + 1] = weight[depth] * a.probability;
            if (exact) exact_weight[depth + 1] = exact_weight[depth] * to_rational(*a.exact);
            self(self, depth + 1, pos + static_cast<std::int64_t>(a.value));
        }
        if (--c == 0) visited.pop_back();
    };
    rec(rec, 0, 0);
}

// Dense law on [lo, lo + size).
template <class T>
struct Dense {
    wide_int lo = 0;
    std::vector<T> p;
};

template <class T>
Dense<T> convolve(const Dense<T>& a, const Dense<T>& b) {
    Dense<T> out;
    out.lo = a.lo + b.lo;
    out.p.assign(a.p.size() + b.p.size() - 1, T(0));
    for (std::size_t i = 0; i < a.p.size(); ++i) {
        if (a.p[i] == 0) continue;
        for (std::size_t j = 0; j < b.p.size(); ++j) {
            if (b.p[j] == 0) continue;
            out.p[i + j] += a.p[i] * b.p[j];
        }
    }
    return out;
}

template <class T, class Prob>
Dense<T> pushforward(const std::vector<PmfAtom>& atoms, std::uint64_t c, Prob&& prob) {
    Dense<T> out;
    const auto cc = static_cast<wide_int>(c);
    out.lo = atoms.front().value * cc;
    wide_int hi = atoms.back().value * cc;
    out.p.assign(static_cast<std::size_t>(hi - out.lo + 1), T(0));
    for (const auto& a : atoms) out.p[static_cast<std::size_t>(a.value * cc - out.lo)] += prob(a);
    return out;
}

template <class T, class Prob, class Weight>
std::vector<T> mixture(const ProfileGroups& groups, const std::vector<PmfAtom>& atoms, wide_int& lo, Prob&& prob,
                       Weight&& weight) {
    const auto n = static_cast<wide_int>(groups.n);
    lo = atoms.front().value * n;
    wide_int hi = atoms.back().value * n;
    std::vector<T> total(static_cast<std::size_t>(hi - lo + 1), T(0));
    std::map<std::uint64_t, Dense<T>> push;
    for (const auto& g : groups.groups) {
        Dense<T> law;
        law.p = {T(1)};
        for (auto c : g.counts) {
            auto it = push.find(c);
            if (it == push.end()) it = push.emplace(c, pushforward<T>(atoms, c, prob)).first;
            law = convolve(law, it->second);
        }
        const T w = weight(g);
        for (std::size_t i = 0; i < law.p.size(); ++i)
            if (law.p[i] != 0) total[static_cast<std::size_t>(law.lo - lo) + i] += w * law.p[i];
    }
    return total;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const char* to_string(PmfMode mode) { return mode == PmfMode::rational ? "rational" : "double"; }

double IntegerPmf::at(wide_int value) const {
    auto it = probability.find(value);
    return it == probability.end() ? 0.0 : it->second;
}

double IntegerPmf::total() const {
    double t = 0;
    for (const auto& [v, p] : probability) t += p;
    return t;
}

Rational IntegerPmf::exact_total() const {
    Rational t(0);
    for (const auto& [v, p] : exact) t += p;
    return t;
}

ProfileGroups group_profiles(const DistributionSpec& step, std::uint64_t n) {
    if (n == 0) throw Error(Errc::invalid_argument, "n must be >= 1");
    const auto& atoms = finite_atoms(step, "step");
    check_budget(atoms.size(), n);
    ProfileGroups out;
    out.n = n;
    out.exact = step.all_exact();
    std::map<std::vector<std::uint64_t>, ProfileGroup> table;
    std::vector<std::uint64_t> key;
    enumerate_paths(atoms, n, out.exact,
                    [&](const std::vector<std::uint64_t>& counts, const std::vector<std::int64_t>& visited,
                        std::int64_t offset, double w, const Rational& ew) {
                        key.clear();
                        for (auto s : visited) key.push_back(counts[static_cast<std::size_t>(s + offset)]);
                        std::sort(key.begin(), key.end());
                        auto& g = table[key];
                        g.weight += w;
                        if (out.exact) g.exact_weight += ew;
                        ++out.paths;
                    });
    for (auto& [k, g] : table) {
        g.counts = k;
        out.groups.push_back(std::move(g));
    }
    return out;
}

IntegerPmf exact_pmf(const ProfileGroups& groups, const SceneryModel& scenery) {
    const auto& atoms = finite_atoms(scenery.dist, "scenery");
    IntegerPmf out;
    out.n = groups.n;
    const bool rational = groups.exact && scenery.dist.all_exact();
    out.mode = rational ? PmfMode::rational : PmfMode::real;
    wide_int lo = 0;
    if (rational) {
        auto total = mixture<Rational>(
            groups, atoms, lo, [](const PmfAtom& a) { return to_rational(*a.exact); },
            [](const ProfileGroup& g) { return g.exact_weight; });
        for (std::size_t i = 0; i < total.size(); ++i) {
            if (total[i] == 0) continue;
            wide_int v = lo + static_cast<wide_int>(i);
            out.exact.emplace(v, total[i]);
            out.probability.emplace(v, static_cast<double>(total[i]));
        }
        if (out.exact_total() != 1) throw Error(Errc::invalid_argument, "rational pmf does not sum to 1");
    } else {
        auto total = mixture<double>(
            groups, atoms, lo, [](const PmfAtom& a) { return a.probability; },
            [](const ProfileGroup& g) { return g.weight; });
        for (std::size_t i = 0; i < total.size(); ++i)
            if (total[i] > 0) out.probability.emplace(lo + static_cast<wide_int>(i), total[i]);
        if (std::abs(out.total() - 1.0) > 1e-12)
            throw Error(Errc::invalid_argument, "pmf mass check failed: total " + format_double(out.total()));
    }
    return out;
}

IntegerPmf exact_pmf(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n) {
    finite_atoms(scenery.dist, "scenery");
    auto out = exact_pmf(group_profiles(step, n), scenery);
    out.model = "step=" + step.name + " scenery=" + scenery.dist.name;
    return out;
}

std::complex<double> scenery_cf(const SceneryModel& scenery, double t) {
    if (!scenery.dist.is_lattice()) {
        double s = scenery.dist.gaussian_sd * t;
        return {std::exp(-0.5 * s * s), 0.0};
    }
    const auto& atoms = finite_atoms(scenery.dist, "scenery");
    std::complex<double> out{};
    for (const auto& a : atoms) {
        double arg = t * static_cast<double>(a.value);
        out += a.probability * std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return out;
}

std::complex<double> exact_cf(const ProfileGroups& groups, const SceneryModel& scenery, double t) {
    if (t == 0.0) return {1.0, 0.0};
    std::vector<std::complex<double>> phi(groups.n + 1);
    for (std::uint64_t c = 1; c <= groups.n; ++c) phi[c] = scenery_cf(scenery, t * static_cast<double>(c));
    std::complex<double> out{};
    for (const auto& g : groups.groups) {
        std::complex<double> prod(1.0, 0.0);
        for (auto c : g.counts) prod *= phi[c];
        out += g.weight * prod;
    }
    return out;
}

std::complex<double> exact_cf(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n,
                              double t) {
    return exact_cf(group_profiles(step, n), scenery, t);
}

InversionReport inversion_check(const ProfileGroups& groups, const SceneryModel& scenery, const IntegerPmf& pmf,
                                wide_int x) {
    if (!scenery.dist.is_lattice()) throw Error(Errc::not_lattice, "inversion needs a lattice scenery");
    InversionReport r;
    r.n = groups.n;
    r.x = x;
    r.span = scenery.span;
    r.support_condition = support_condition(groups.n, x, scenery);
    const double d = static_cast<double>(scenery.span);
    const double xd = static_cast<double>(x);
    auto q = integrate_panels(
        [&](double t) {
            auto v = exact_cf(groups, scenery, t) * std::complex<double>(std::cos(t * xd), -std::sin(t * xd));
            return v.real();  // phi_n(-t) = conj(phi_n(t)), so the integral is real
        },
        -kPi / d, kPi / d, {1e-11, 4, std::size_t{1} << 14});
    r.quadrature_change = q.last_change;
    r.integral = d / (2 * kPi) * q.value;
    const auto root = scenery_cf(scenery, 2 * kPi / d);
    const auto rootn = std::pow(root, static_cast<double>(groups.n));
    std::complex<double> factor{};
    std::complex<double> power(1.0, 0.0);
    const auto span = scenery.span;
    for (wide_int k = 0; k < span; ++k) {
        // exp(-2 pi i k x / d) with k x reduced mod d to keep the argument small.
        double arg = -2 * kPi * static_cast<double>(wide_mod(k * x, span)) / d;
        factor += std::complex<double>(std::cos(arg), std::sin(arg)) * power;
        power *= rootn;
    }
    r.root_factor = factor.real();
    r.identity = factor.real() * q.value / (2 * kPi);
    r.pmf = pmf.at(x);
    r.difference = std::abs(r.identity - r.pmf);
    return r;
}

InversionReport inversion_check(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n,
                                wide_int x) {
    auto groups = group_profiles(step, n);
    auto pmf = exact_pmf(groups, scenery);
    return inversion_check(groups, scenery, pmf, x);
}

IntegerPmf exact_range_pmf(const DistributionSpec& step, std::uint64_t n) {
    if (n == 0) throw Error(Errc::invalid_argument, "n must be >= 1");
    const auto& atoms = finite_atoms(step, "step");
    check_budget(atoms.size(), n);
    const bool exact = step.all_exact();
    std::vector<double> prob(n + 1, 0.0);
    std::vector<Rational> ex(exact ? n + 1 : 0, Rational(0));
    enumerate_paths(atoms, n, exact,
                    [&](const std::vector<std::uint64_t>&, const std::vector<std::int64_t>& visited, std::int64_t,
                        double w, const Rational& ew) {
                        prob[visited.size()] += w;
                        if (exact) ex[visited.size()] += ew;
                    });
    IntegerPmf out;
    out.n = n;
    out.mode = exact ? PmfMode::rational : PmfMode::real;
    out.model = "range step=" + step.name;
    for (std::uint64_t r = 1; r <= n; ++r) {
        if (prob[r] <= 0) continue;
        out.probability.emplace(r, exact ? static_cast<double>(ex[r]) : prob[r]);
        if (exact) out.exact.emplace(r, ex[r]);
    }
    return out;
}

std::string to_csv(const IntegerPmf& pmf) {
    std::ostringstream os;
    os << "# schema_version: 1\n# model: " << pmf.model << "\n# n: " << pmf.n << "\n# mode: " << to_string(pmf.mode)
       << "\n";
    const bool rational = pmf.mode == PmfMode::rational;
    os << (rational ? "value,probability,exact\n" : "value,probability\n");
    for (const auto& [v, p] : pmf.probability) {
        os << to_string(v) << ',' << format_double(p);
        if (rational) os << ',' << pmf.exact.at(v).str();
        os << '\n';
    }
    return os.str();
}

}  // namespace scenery
