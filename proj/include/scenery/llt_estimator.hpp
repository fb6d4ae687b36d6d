#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scenery/estimate.hpp"
#include "scenery/parallel.hpp"
#include "scenery/rng.hpp"
#include "scenery/scenery_engine.hpp"
#include "scenery/stable_law.hpp"

namespace scenery {

// delta = 1 - 1/alpha + 1/(alpha beta), written so that beta = 1 gives exactly 1.
double delta_exponent(double alpha, double beta);

struct Exponents {
    StableParams walk_attraction;
    StableParams scenery_attraction;
    double delta = 0.0;
    // Target scale: n^scaling with scaling = delta for alpha > 1 and 1/beta for
    // a transient walk (alpha < 1).
    double scaling = 0.0;
    double oriented_exponent = 0.0;  // 1 + 1/(alpha beta)
};

// Errc::invalid_argument at alpha = 1.
Exponents make_exponents(const StableParams& walk, const StableParams& scenery);
// From catalogued attractions; Errc::invalid_argument if either law has none.
Exponents make_exponents(const DistributionSpec& step, const SceneryModel& scenery);

struct ValueWithError {
    double value = 0.0;
    double std_error = 0.0;
};

struct LimitConstants {
    double x = 0.0;
    std::optional<ValueWithError> c_of_x;
    std::optional<ValueWithError> d_of_x;
    double r = 1.0;
    std::uint64_t m_used = 0;
    std::uint64_t replicas = 0;
    // estimate_D only: D evaluated at the ends of the p0 interval.
    double d_at_p0_low = 0.0;
    double d_at_p0_high = 0.0;
};

struct ScalingPoint {
    std::uint64_t n = 0;
    MCEstimate estimate;
};

struct ScalingSeries {
    std::vector<ScalingPoint> points;
    double slope = 0.0;
    double slope_std_error = 0.0;
};

struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
    std::size_t used_points = 0;
};

inline constexpr std::uint64_t kMinHitsForFit = 30;

// Hit frequency of Z_n = target with a Wilson interval. When the support
// condition fails nothing is simulated and the result is exactly 0.
MCEstimate estimate_point_prob(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n,
                               wide_int target, std::uint64_t samples, const RngStream& stream,
                               const ExecPolicy& policy = {});

// Same estimator without the short-circuit.
MCEstimate simulate_point_prob(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n,
                               wide_int target, std::uint64_t samples, const RngStream& stream,
                               const ExecPolicy& policy = {});

// P(Z_n in [n^scaling x + a, n^scaling x + b]).
MCEstimate estimate_interval_prob(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n,
                                  double x, double a, double b, std::uint64_t samples, const RngStream& stream,
                                  const ExecPolicy& policy = {});

// Mean of W_m f_beta(W_m x), W_m = m^delta V_m^(-1/beta), with a bootstrap
// standard error.
LimitConstants estimate_C(double x, const DistributionSpec& step, const StableParams& scenery_attraction,
                          std::uint64_t m, std::uint64_t replicas, const RngStream& stream,
                          const ExecPolicy& policy = {}, std::size_t bootstrap_resamples = 1000);

// r f_beta(r x) with r from ntilde_moment(p0, beta).
LimitConstants estimate_D(double x, const DistributionSpec& step, const StableParams& scenery_attraction,
                          const MCEstimate& p0_est);

// Weighted least squares of log estimate on log n over points with at least
// kMinHitsForFit hits. Errc::insufficient_points below three such points.
SlopeFit slope_fit(const ScalingSeries& series);

// Point-probability series at target floor(n^scaling x); point i uses stream.split(n_i).
ScalingSeries point_prob_series(const DistributionSpec& step, const SceneryModel& scenery,
                                const std::vector<std::uint64_t>& ns, double x, std::uint64_t samples,
                                const RngStream& stream, const ExecPolicy& policy = {});

}  // namespace scenery
