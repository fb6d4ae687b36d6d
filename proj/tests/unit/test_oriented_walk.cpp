#include "doctest.h"

#include <cmath>

#include "scenery/error.hpp"
#include "scenery/oriented_walk.hpp"

using namespace scenery;

namespace {
OrientedParams cp() { return make_oriented_params(1.0 / 3.0, catalog("rademacher"), catalog("rademacher"), ExactProb{1, 3}); }
}  // namespace

TEST_CASE("d0 and d1") {
    auto a = compute_d0_d1(catalog("rademacher"), catalog("rademacher"));
    CHECK(a.d0 == 2);
    CHECK(a.d1 == 2);
    CHECK(a.hypothesis_ok);
    auto b = compute_d0_d1(catalog("pmf(-3:0.5,2:0.5)"), catalog("lazy-uniform"));
    CHECK(b.d0 == 1);
    CHECK(b.hypothesis_ok);
    auto c = compute_d0_d1(catalog("pmf(-2:0.5,2:0.5)"), catalog("rademacher"));
    CHECK(c.d1 == 2);
    CHECK(c.hypothesis_ok);
    auto d = compute_d0_d1(catalog("pmf(1:0.5,2:0.5)"), catalog("rademacher"));
    CHECK(d.d1 == 0);
    CHECK_FALSE(d.hypothesis_ok);
    auto e = compute_d0_d1(catalog("pmf(-1:0.5,2:0.5)"), catalog("rademacher"));
    CHECK(e.d1 == 3);
    CHECK_FALSE(e.hypothesis_ok);
    auto params = cp();
    CHECK(params.d == 2);
    CHECK(params.d0 == 2);
    CHECK(params.d1_searched <= kD1SearchLimit);
}

TEST_CASE("simulator basics") {
    auto params = cp();
    RngStream r(1, 1);
    CHECK(simulate_direct(params, 0, r).position == Point2{0, 0});
    CHECK(simulate_repr(params, 0, r).position == Point2{0, 0});
    auto fast = make_oriented_params(1 - 1e-9, catalog("rademacher"), catalog("rademacher"));
    for (int i = 0; i < 100; ++i) {
        auto s = simulate_direct(fast, 50, r);
        CHECK(wide_abs(s.position.first) == 50);
        CHECK(s.position.second == 0);
    }
    for (int i = 0; i < 1000; ++i) {
        auto s = simulate_repr(params, 40, r);
        std::uint64_t h = 0;
        for (auto& [y, c] : s.horizontal) {
            h += c;
            CHECK(c <= s.local_times.at(y));
        }
        CHECK(h + s.vertical_moves == 40);
        CHECK(s.position == Point2{s.z_tilde, s.s_n});
    }
}

TEST_CASE("forced representation traces") {
    auto a = repr_from_inputs({1, 1}, {0, 0}, {{0, 1}});
    CHECK(a.z_tilde == 2);
    CHECK(a.s_n == 0);
    CHECK(a.horizontal == std::map<wide_int, std::uint64_t>{{0, 2}});
    auto b = repr_from_inputs({0, 0}, {1, -1}, {});
    CHECK(b.z_tilde == 0);
    CHECK(b.s_n == 0);
    CHECK(b.horizontal.empty());
}

TEST_CASE("exact laws of the two constructions agree") {
    auto params = cp();
    for (std::uint64_t n = 0; n <= 6; ++n) {
        auto a = exact_direct_law(params, n);
        auto b = exact_repr_law(params, n);
        CHECK(a == b);
        Rational t(0);
        for (auto& [k, v] : a) t += v;
        CHECK(t == 1);
    }
    auto other = make_oriented_params(0.5, catalog("pmf(-1:1/4,0:1/4,2:1/2)"), catalog("pmf(-1:1/3,0:1/3,2:1/3)"),
                                      ExactProb{1, 2});
    for (std::uint64_t n = 1; n <= 5; ++n) CHECK(exact_direct_law(other, n) == exact_repr_law(other, n));
}

TEST_CASE("return probabilities") {
    auto params = cp();
    RngStream r(2, 0);
    auto odd = estimate_return_prob(params, 7, 1000, r);
    CHECK(odd.hits == 0);
    CHECK(odd.estimate == 0.0);
    auto raw = simulate_return_prob(params, 7, 100000, r);
    CHECK(raw.hits == 0);
    double exact2 = static_cast<double>(exact_direct_law(params, 2)[{0, 0}]);
    auto e2 = estimate_return_prob(params, 2, 400000, r);
    CHECK(std::abs(e2.estimate - exact2) <= 4 * std::sqrt(exact2 * (1 - exact2) / 4e5));
    double exact6 = static_cast<double>(exact_repr_law(params, 6)[{0, 0}]);
    auto e6 = estimate_return_prob(params, 6, 400000, r);
    CHECK(std::abs(e6.estimate - exact6) <= 4 * std::sqrt(exact6 * (1 - exact6) / 4e5));
}

TEST_CASE("E estimate") {
    auto params = cp();
    auto Y = vertical_law(params);
    CHECK(Y.declared_span == 1);
    CHECK(Y.all_exact());
    auto e = estimate_E(params, 256, 1000, RngStream(3, 0));
    CHECK(e.E > 0);
    CHECK(e.f_alpha0 > 0);
    CHECK(e.exponent == 1.25);
    auto e2 = estimate_E(params, 512, 1000, RngStream(3, 1));
    CHECK(std::abs(e.f_alpha0 - e2.f_alpha0) <= 3 * std::hypot(e.f_alpha0_std_error, e2.f_alpha0_std_error) + 0.05 * e2.f_alpha0);
    // f_alpha(0) for Y with variance 2/3: 1 / sqrt(2 pi 2/3).
    CHECK(e2.f_alpha0 == doctest::Approx(1 / std::sqrt(2 * M_PI * 2.0 / 3.0)).epsilon(0.05));
    CHECK_THROWS_AS(estimate_E(params, 64, 10, RngStream(1, 1), {}, 1), Error);
}

TEST_CASE("chi-square comparison of the simulators") {
    auto params = cp();
    auto a = position_histogram(params, 10, 200000, true, RngStream(4, 0));
    auto b = position_histogram(params, 10, 200000, false, RngStream(4, 1));
    auto r = chi_square_two_sample(a, b);
    CHECK(r.dof > 10);
    CHECK(r.p_value > 0.001);
    // A wrong law must be rejected.
    auto wrong = make_oriented_params(0.4, catalog("rademacher"), catalog("rademacher"));
    auto c = position_histogram(wrong, 10, 200000, false, RngStream(4, 2));
    CHECK(chi_square_two_sample(a, c).p_value < 1e-6);
}
