#pragma once

#include <cstdint>
#include <map>
#include <variant>

#include "scenery/rng.hpp"
#include "scenery/sampler.hpp"
#include "scenery/stable_law.hpp"
#include "scenery/walk_engine.hpp"
#include "scenery/wide_int.hpp"

namespace scenery {

// Scenery law with its lattice arithmetic. span and witness are 0 for
// continuous laws.
struct SceneryModel {
    DistributionSpec dist;
    wide_int span = 0;
    wide_int witness = 0;  // smallest |b| in the support, ties to the smaller b
};

SceneryModel make_scenery_model(DistributionSpec dist);

// gcd of support differences. Errc::not_lattice for continuous laws.
wide_int lattice_span(const DistributionSpec& dist);

// (target - n b) in dZ. Errc::not_lattice for a continuous model.
bool support_condition(std::uint64_t n, wide_int target, const SceneryModel& model);

struct RwrsSample {
    std::variant<wide_int, double> z;
    const LocalTimeProfile* profile = nullptr;
    std::uint64_t scenery_draws = 0;
};

// One fresh scenery value per visited site, in ascending site order.
RwrsSample evaluate_Z(const LocalTimeProfile& profile, const SceneryModel& model, RngStream& stream);

// Scenery forced per site (missing sites are an error).
RwrsSample evaluate_Z(const LocalTimeProfile& profile, const std::map<wide_int, wide_int>& scenery);

// Draws scenery values: lattice laws through LatticeSampler, gaussian by sd * N(0,1).
class ScenerySampler {
public:
    explicit ScenerySampler(const SceneryModel& model);
    bool lattice() const noexcept { return lattice_.has_value(); }
    wide_int draw_lattice(RngStream& rng) const { return (*lattice_)(rng); }
    double draw_real(RngStream& rng) const;
    const LatticeSampler& lattice_sampler() const { return *lattice_; }

private:
    std::optional<LatticeSampler> lattice_;
    double sd_ = 1.0;
};

// Hot loop for repeated Z_n draws: walk into a reusable workspace, then one
// scenery draw per visited site.
class RwrsKernel {
public:
    RwrsKernel(const DistributionSpec& step, const SceneryModel& model, std::uint64_t max_n);

    wide_int sample_lattice(std::uint64_t n, RngStream& rng);
    double sample_real(std::uint64_t n, RngStream& rng);
    const LocalTimeWorkspace& workspace() const noexcept { return ws_; }
    std::uint64_t last_draws() const noexcept { return draws_; }
    bool lattice() const noexcept { return scenery_.lattice(); }

private:
    const SceneryModel* model_;
    LatticeSampler step_;
    ScenerySampler scenery_;
    LocalTimeWorkspace ws_;
    std::uint64_t draws_ = 0;
};

}  // namespace scenery
