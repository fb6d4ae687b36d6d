#include "scenery/scenery_engine.hpp"

#include <cassert>

#include "scenery/error.hpp"

namespace scenery {

wide_int lattice_span(const DistributionSpec& dist) {
    if (!dist.is_lattice()) throw Error(Errc::not_lattice, dist.name + " is not a lattice law");
    if (dist.tail) return 1;  // symmetric support containing 1 and 2
    wide_int g = 0;
    for (const auto& a : dist.atoms) g = wide_gcd(g, a.value - dist.atoms.front().value);
    return g;
}

SceneryModel make_scenery_model(DistributionSpec dist) {
    SceneryModel m;
    if (dist.is_lattice()) {
        m.span = lattice_span(dist);
        if (m.span == 0)
            throw Error(Errc::invalid_argument, "scenery " + dist.name + " is degenerate (single atom)");
        if (dist.tail) {
            m.witness = -1;
        } else {
            m.witness = dist.atoms.front().value;
            for (const auto& a : dist.atoms) {
                wide_int ab = wide_abs(a.value), wb = wide_abs(m.witness);
                if (ab < wb || (ab == wb && a.value < m.witness)) m.witness = a.value;
            }
        }
    }
    m.dist = std::move(dist);
    return m;
}

bool support_condition(std::uint64_t n, wide_int target, const SceneryModel& model) {
    if (!model.dist.is_lattice()) throw Error(Errc::not_lattice, model.dist.name + " is not a lattice law");
    return wide_mod(target - static_cast<wide_int>(n) * model.witness, model.span) == 0;
}

RwrsSample evaluate_Z(const LocalTimeProfile& profile, const SceneryModel& model, RngStream& stream) {
    ScenerySampler sampler(model);
    RwrsSample out;
    out.profile = &profile;
    if (sampler.lattice()) {
        wide_int z = 0;
        for (const auto& [site, c] : profile.counts) {
            z += sampler.draw_lattice(stream) * static_cast<wide_int>(c);
            ++out.scenery_draws;
        }
        assert(support_condition(profile.n, z, model));
        out.z = z;
    } else {
        double z = 0;
        for (const auto& [site, c] : profile.counts) {
            z += sampler.draw_real(stream) * static_cast<double>(c);
            ++out.scenery_draws;
        }
        out.z = z;
    }
    return out;
}

RwrsSample evaluate_Z(const LocalTimeProfile& profile, const std::map<wide_int, wide_int>& scenery) {
    RwrsSample out;
    out.profile = &profile;
    wide_int z = 0;
    for (const auto& [site, c] : profile.counts) {
        auto it = scenery.find(site);
        if (it == scenery.end())
            throw Error(Errc::invalid_argument, "no scenery value for site " + to_string(site));
        z += it->second * static_cast<wide_int>(c);
        ++out.scenery_draws;
    }
    out.z = z;
    return out;
}

ScenerySampler::ScenerySampler(const SceneryModel& model) {
    if (model.dist.is_lattice()) {
        lattice_.emplace(model.dist);
    } else {
        sd_ = model.dist.gaussian_sd;
    }
}

double ScenerySampler::draw_real(RngStream& rng) const {
    if (lattice_) return static_cast<double>((*lattice_)(rng));
    return sd_ * rng.normal();
}

RwrsKernel::RwrsKernel(const DistributionSpec& step, const SceneryModel& model, std::uint64_t max_n)
    : model_(&model), step_(step), scenery_(model), ws_(step_, max_n) {}

wide_int RwrsKernel::sample_lattice(std::uint64_t n, RngStream& rng) {
    ws_.run(step_, n, rng);
    wide_int z = 0;
    std::uint64_t draws = 0;
    scenery_.lattice_sampler().visit([&](const auto& draw) {
        ws_.for_each([&](wide_int, std::uint64_t c) {
            z += draw(rng) * static_cast<wide_int>(c);
            ++draws;
        });
    });
    draws_ = draws;
    assert(support_condition(n, z, *model_));
    return z;
}

double RwrsKernel::sample_real(std::uint64_t n, RngStream& rng) {
    ws_.run(step_, n, rng);
    double z = 0;
    std::uint64_t draws = 0;
    ws_.for_each([&](wide_int, std::uint64_t c) {
        z += scenery_.draw_real(rng) * static_cast<double>(c);
        ++draws;
    });
    draws_ = draws;
    return z;
}

}  // namespace scenery
