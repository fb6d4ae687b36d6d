#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scenery/rng.hpp"

namespace scenery {

inline constexpr double kZ95 = 1.959963984540054;

// Probability (or expectation) estimate with its uncertainty.
struct MCEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double level = 0.95;
};

// Hit frequency with a Wilson score interval.
MCEstimate wilson_estimate(std::uint64_t hits, std::uint64_t samples, double z = kZ95);

// Estimate that is exactly zero by construction (no sampling performed).
MCEstimate exact_zero(std::uint64_t samples);

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t count = 0;
};

// Welford mean in index order (exact for constant sequences) with the usual
// standard error of the mean.
MeanEstimate mean_estimate(std::span<const double> values);

// Standard deviation of the bootstrap distribution of the mean.
double bootstrap_mean_std_error(std::span<const double> values, std::size_t resamples,
                                RngStream stream);

}  // namespace scenery
