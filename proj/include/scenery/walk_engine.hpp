#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "scenery/estimate.hpp"
#include "scenery/parallel.hpp"
#include "scenery/rng.hpp"
#include "scenery/sampler.hpp"
#include "scenery/stable_law.hpp"
#include "scenery/wide_int.hpp"

namespace scenery {

// Local times N_n(y) = #{k in [0, n) : S_k = y} of one walk realization.
struct LocalTimeProfile {
    std::uint64_t n = 0;
    std::map<wide_int, std::uint64_t> counts;
    wide_int endpoint = 0;  // S_n
};

struct WalkStats {
    std::uint64_t range = 0;      // R_n
    std::uint64_t max_local = 0;  // N_n^*
    double beta_energy = 0.0;     // V_n = sum_y N_n(y)^beta
    std::uint64_t horizon = 0;
};

// Builds the profile of the walk with the given increments (n = steps.size()).
LocalTimeProfile profile_from_steps(std::span<const wide_int> steps);

LocalTimeProfile simulate_path(const DistributionSpec& step, std::uint64_t n, RngStream& stream);

WalkStats stats(const LocalTimeProfile& profile, double beta);

// Sum of count^beta with an exact integer path for beta = 1 and beta = 2.
double beta_energy_term(std::uint64_t count, double beta);

struct BridgeSample {
    LocalTimeProfile profile;
    std::uint64_t attempts = 0;
};

// Rejection sampling of a walk conditioned on S_n = 0.
BridgeSample simulate_bridge(const DistributionSpec& step, std::uint64_t n, RngStream& stream,
                             std::uint64_t max_attempts);

// Attempt budget scaled by the expected acceptance ~ n^(-1/alpha).
std::uint64_t default_bridge_budget(const DistributionSpec& step, std::uint64_t n);

// True when S_n = 0 is compatible with the support's lattice and extent.
bool bridge_feasible(const DistributionSpec& step, std::uint64_t n);

struct ReturnEstimate {
    MCEstimate estimate;
    std::uint64_t horizon = 0;
};

// Fraction of walks with S_k = 0 for some k in [1, horizon]; a lower-bound
// estimator of the return probability p0.
ReturnEstimate estimate_p0(const DistributionSpec& step, std::uint64_t horizon, std::uint64_t samples,
                           const RngStream& stream, const ExecPolicy& policy = {});

struct NtildeMoment {
    double moment = 1.0;  // E[(1 + G1 + G2)^(beta - 1)]
    double r = 1.0;       // moment^(-1/beta)
    std::uint64_t terms = 0;
};

// G1, G2 i.i.d. geometric on {0,1,...} with P(G >= k) = p0^k.
NtildeMoment ntilde_moment(double p0, double beta);

// Direct simulation of the two-sided occupation of 0: 1 + visits of two
// independent walks at times 1..horizon.
MeanEstimate estimate_two_sided_occupation(const DistributionSpec& step, std::uint64_t horizon,
                                           std::uint64_t replicas, const RngStream& stream,
                                           const ExecPolicy& policy = {});

// Reusable local-time storage for hot loops: a dense window when the support
// is bounded and small, an open-addressing table otherwise.
class LocalTimeWorkspace {
public:
    LocalTimeWorkspace(const LatticeSampler& sampler, std::uint64_t max_n);

    // Runs n steps from 0, records S_0..S_{n-1}, returns S_n. Clears the previous walk.
    wide_int run(const LatticeSampler& sampler, std::uint64_t n, RngStream& rng);

    // f(site, count) over visited sites; dense mode visits in ascending order,
    // table mode in first-visit order.
    template <class F>
    void for_each(F&& f) const {
        if (dense_) {
            for (std::int64_t s = lo_; s <= hi_; ++s) {
                std::uint32_t c = dense_counts_[static_cast<std::size_t>(s + radius_)];
                if (c != 0) f(wide_int{s}, std::uint64_t{c});
            }
        } else {
            for (std::uint32_t slot : order_) f(keys_[slot], std::uint64_t{values_[slot]});
        }
    }

    std::uint64_t range() const;
    std::uint64_t count_at(wide_int site) const;
    LocalTimeProfile to_profile(std::uint64_t n, wide_int endpoint) const;
    bool dense() const noexcept { return dense_; }

private:
    void clear();
    void table_add(wide_int site);

    bool dense_ = true;
    std::int64_t radius_ = 0;
    std::vector<std::uint32_t> dense_counts_;
    std::int64_t lo_ = 0, hi_ = -1;

    std::vector<wide_int> keys_;
    std::vector<std::uint32_t> values_;
    std::vector<std::uint32_t> order_;
    std::size_t mask_ = 0;
};

}  // namespace scenery
