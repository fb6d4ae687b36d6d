#include "doctest.h"

#include <cmath>
#include <map>

#include "scenery/error.hpp"
#include "scenery/scenery_engine.hpp"

using namespace scenery;

TEST_CASE("lattice spans") {
    CHECK(lattice_span(catalog("pmf(-1:0.5,1:0.5)")) == 2);
    CHECK(lattice_span(catalog("lazy-uniform")) == 1);
    CHECK(lattice_span(catalog("pmf(1:0.2,4:0.3,7:0.5)")) == 3);
    CHECK_THROWS_AS(lattice_span(catalog("gaussian")), Error);
}

TEST_CASE("witness and support condition") {
    auto rad = make_scenery_model(catalog("rademacher"));
    CHECK(rad.span == 2);
    CHECK(rad.witness == -1);
    CHECK_FALSE(support_condition(3, 0, rad));
    CHECK(support_condition(4, 0, rad));
    auto m = make_scenery_model(catalog("pmf(1:0.2,4:0.3,7:0.5)"));
    CHECK(m.witness == 1);
    CHECK(support_condition(5, 8, m));
    CHECK_FALSE(support_condition(5, 9, m));
    CHECK_THROWS_AS(support_condition(1, 0, make_scenery_model(catalog("gaussian"))), Error);
    CHECK_THROWS_AS(make_scenery_model(catalog("pmf(3:1)")), Error);
}

TEST_CASE("evaluate_Z with forced and random scenery") {
    LocalTimeProfile p;
    p.n = 3;
    p.counts = {{0, 2}, {1, 1}};
    p.endpoint = 1;
    auto z = evaluate_Z(p, std::map<wide_int, wide_int>{{0, 1}, {1, -1}});
    CHECK(std::get<wide_int>(z.z) == 1);
    CHECK(z.scenery_draws == 2);

    auto rad = make_scenery_model(catalog("rademacher"));
    auto step = catalog("rademacher");
    RngStream r(1, 2);
    for (int i = 0; i < 1000; ++i) {
        auto prof = simulate_path(step, 5, r);
        auto s = evaluate_Z(prof, rad, r);
        CHECK(wide_mod(std::get<wide_int>(s.z), 2) == 1);
        CHECK(s.scenery_draws == prof.counts.size());
    }
}

TEST_CASE("Z_1 has the scenery law") {
    auto model = make_scenery_model(catalog("pmf(-2:0.25,1:0.5,3:0.25)"));
    RwrsKernel k(catalog("rademacher"), model, 1);
    RngStream r(9, 9);
    std::map<wide_int, double> hist;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) hist[k.sample_lattice(1, r)] += 1;
    double chi2 = 0;
    for (auto& a : model.dist.atoms) {
        double e = n * a.probability;
        chi2 += (hist[a.value] - e) * (hist[a.value] - e) / e;
    }
    CHECK(hist.size() == 3);
    CHECK(chi2 < 13.8);  // chi-square(2) 0.999 quantile
}

TEST_CASE("kernel draw accounting and parity") {
    auto model = make_scenery_model(catalog("rademacher"));
    auto step = catalog("rademacher");
    RwrsKernel k(step, model, 101);
    RngStream r(3, 3);
    for (int i = 0; i < 2000; ++i) {
        auto z = k.sample_lattice(101, r);
        CHECK(wide_mod(z, 2) == 1);
        CHECK(k.last_draws() == k.workspace().range());
    }
    auto gauss = make_scenery_model(catalog("gaussian"));
    RwrsKernel g(step, gauss, 16);
    double s2 = 0;
    for (int i = 0; i < 20000; ++i) {
        double v = g.sample_real(1, r);
        s2 += v * v;
    }
    CHECK(s2 / 20000 == doctest::Approx(1.0).epsilon(0.05));
}
