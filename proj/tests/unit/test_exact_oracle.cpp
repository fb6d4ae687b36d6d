#include "doctest.h"

#include <cmath>
#include <numbers>

#include "scenery/error.hpp"
#include "scenery/exact_oracle.hpp"

using namespace scenery;

namespace {
const double kPi = std::numbers::pi;

// Plain brute force over steps and scenery values on the window [-n, n].
std::map<wide_int, double> brute_force(const DistributionSpec& step, const DistributionSpec& scen, int n) {
    std::map<wide_int, double> out;
    const int sites = 2 * n + 1;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::size_t ns = step.atoms.size(), nx = scen.atoms.size();
    std::size_t total_steps = 1;
    for (int i = 0; i < n; ++i) total_steps *= ns;
    for (std::size_t code = 0; code < total_steps; ++code) {
        std::size_t c = code;
        double w = 1;
        std::map<wide_int, std::uint64_t> counts;
        wide_int pos = 0;
        for (int i = 0; i < n; ++i) {
            ++counts[pos];
            const auto& a = step.atoms[c % ns];
            c /= ns;
            w *= a.probability;
            pos += a.value;
        }
        std::vector<std::uint64_t> cs;
        for (auto& [s, k] : counts) cs.push_back(k);
        std::size_t combos = 1;
        for (std::size_t i = 0; i < cs.size(); ++i) combos *= nx;
        for (std::size_t sc = 0; sc < combos; ++sc) {
            std::size_t v = sc;
            double ww = w;
            wide_int z = 0;
            for (auto k : cs) {
                const auto& a = scen.atoms[v % nx];
                v /= nx;
                ww *= a.probability;
                z += a.value * static_cast<wide_int>(k);
            }
            out[z] += ww;
        }
    }
    (void)sites;
    return out;
}
}  // namespace

TEST_CASE("small pmfs") {
    auto step = catalog("rademacher");
    auto scen = make_scenery_model(catalog("rademacher"));
    auto p1 = exact_pmf(step, scen, 1);
    CHECK(p1.mode == PmfMode::rational);
    CHECK(p1.exact == std::map<wide_int, Rational>{{-1, Rational(1, 2)}, {1, Rational(1, 2)}});
    auto p2 = exact_pmf(step, scen, 2);
    CHECK(p2.exact == std::map<wide_int, Rational>{{-2, Rational(1, 4)}, {0, Rational(1, 2)}, {2, Rational(1, 4)}});
    auto p3 = exact_pmf(step, scen, 3);
    CHECK(p3.at(0) == 0.0);
    for (std::uint64_t n = 1; n <= 12; ++n) CHECK(exact_pmf(step, scen, n).exact_total() == 1);
}

TEST_CASE("grouped enumeration matches brute force") {
    for (auto [s, x] : {std::pair{"lazy-uniform", "pmf(-1:0.3,2:0.7)"}, {"pmf(-1:0.4,2:0.6)", "rademacher"},
                        {"rademacher", "lazy-uniform"}}) {
        auto step = catalog(s);
        auto scen = catalog(x);
        for (int n = 1; n <= 5; ++n) {
            auto brute = brute_force(step, scen, n);
            auto pmf = exact_pmf(step, make_scenery_model(scen), static_cast<std::uint64_t>(n));
            for (auto& [v, p] : brute) CHECK(pmf.at(v) == doctest::Approx(p).epsilon(1e-12));
            for (auto& [v, p] : pmf.probability) CHECK(brute.count(v) == 1);
        }
    }
}

TEST_CASE("support dichotomy agrees with the exact pmf") {
    for (const char* name : {"rademacher", "pmf(1:1/3,4:1/3,7:1/3)", "pmf(0:1/2,2:1/2)"}) {
        auto scen = make_scenery_model(catalog(name));
        auto step = catalog("rademacher");
        for (std::uint64_t n = 1; n <= 10; ++n) {
            auto pmf = exact_pmf(step, scen, n);
            for (wide_int t = -80; t <= 80; ++t)
                if (!support_condition(n, t, scen)) CHECK(pmf.at(t) == 0.0);
        }
    }
}

TEST_CASE("characteristic function") {
    auto step = catalog("lazy-uniform");
    auto scen = make_scenery_model(catalog("pmf(-1:1/4,1:3/4)"));
    CHECK(exact_cf(step, scen, 6, 0.0) == std::complex<double>(1, 0));
    auto groups = group_profiles(step, 6);
    auto pmf = exact_pmf(groups, scen);
    for (double t : {0.1, 0.7, 2.3}) {
        std::complex<double> sum{};
        for (auto& [v, p] : pmf.probability) sum += p * std::exp(std::complex<double>(0, t * double(v)));
        auto cf = exact_cf(groups, scen, t);
        CHECK(std::abs(cf - sum) <= 1e-12);
        auto shifted = exact_cf(groups, scen, t + 2 * kPi / double(scen.span));
        auto root = std::pow(scenery_cf(scen, 2 * kPi / double(scen.span)), 6.0);
        CHECK(std::abs(shifted - root * cf) <= 1e-12);
    }
}

TEST_CASE("inversion identity") {
    auto step = catalog("rademacher");
    auto scen = make_scenery_model(catalog("rademacher"));
    auto r4 = inversion_check(step, scen, 4, 0);
    CHECK(r4.support_condition);
    CHECK(std::abs(r4.integral - r4.pmf) <= 1e-10);
    CHECK(r4.difference <= 1e-10);
    auto r3 = inversion_check(step, scen, 3, 0);
    CHECK_FALSE(r3.support_condition);
    CHECK(r3.pmf == 0.0);
    CHECK(std::abs(r3.identity) <= 1e-10);
    CHECK(std::abs(r3.root_factor) <= 1e-12);
    for (const char* name : {"rademacher", "pmf(1:1/3,4:1/3,7:1/3)", "lazy-uniform"}) {
        auto m = make_scenery_model(catalog(name));
        auto r = inversion_check(catalog("lazy-uniform"), m, 5, 5 * m.witness);
        CHECK(r.difference <= 1e-10);
        CHECK(std::abs(r.integral - r.pmf) <= 1e-10);
    }
}

TEST_CASE("range law") {
    auto step = catalog("rademacher");
    auto r2 = exact_range_pmf(step, 2);
    CHECK(r2.exact == std::map<wide_int, Rational>{{2, Rational(1)}});
    auto r3 = exact_range_pmf(step, 3);
    CHECK(r3.exact == std::map<wide_int, Rational>{{2, Rational(1, 2)}, {3, Rational(1, 2)}});
    auto lz = exact_range_pmf(catalog("pmf(-1:0.2,0:0.3,1:0.5)"), 9);
    CHECK(lz.mode == PmfMode::real);
    CHECK(std::abs(lz.total() - 1) <= 1e-12);
    CHECK(lz.probability.begin()->first >= 1);
    CHECK(lz.probability.rbegin()->first <= 9);
}

TEST_CASE("budget and csv") {
    auto scen = make_scenery_model(catalog("rademacher"));
    try {
        exact_pmf(catalog("lazy-uniform"), scen, 15);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::budget_exceeded);
    }
    CHECK_THROWS_AS(exact_pmf(catalog("zeta-tail(0.5)"), scen, 2), Error);
    auto csv = to_csv(exact_pmf(catalog("rademacher"), scen, 2));
    CHECK(csv.find("# mode: rational") != std::string::npos);
    CHECK(csv.find("-2,0.25,1/4\n0,0.5,1/2\n2,0.25,1/4\n") != std::string::npos);
}
