#include "scenery/estimate.hpp"

#include <cmath>

#include "scenery/error.hpp"

namespace scenery {

MCEstimate wilson_estimate(std::uint64_t hits, std::uint64_t samples, double z) {
    if (samples == 0) throw Error(Errc::invalid_argument, "estimate needs at least one sample");
    if (hits > samples) throw Error(Errc::invalid_argument, "hits exceed samples");
    MCEstimate e;
    e.hits = hits;
    e.samples = samples;
    double n = static_cast<double>(samples);
    double p = static_cast<double>(hits) / n;
    e.estimate = p;
    e.std_error = std::sqrt(p * (1.0 - p) / n);
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double centre = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    e.ci_low = std::max(0.0, centre - half);
    e.ci_high = std::min(1.0, centre + half);
    // Keep the point estimate inside the interval despite rounding at p = 0 or 1.
    e.ci_low = std::min(e.ci_low, p);
    e.ci_high = std::max(e.ci_high, p);
    return e;
}

MCEstimate exact_zero(std::uint64_t samples) {
    MCEstimate e;
    e.samples = samples;
    return e;
}

MeanEstimate mean_estimate(std::span<const double> values) {
    MeanEstimate out;
    double mean = 0.0, m2 = 0.0;
    std::uint64_t k = 0;
    for (double v : values) {
        ++k;
        double delta = v - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (v - mean);
    }
    out.mean = mean;
    out.count = k;
    out.std_error = k > 1 ? std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k)) : 0.0;
    return out;
}

double bootstrap_mean_std_error(std::span<const double> values, std::size_t resamples,
                                RngStream stream) {
    if (values.empty() || resamples < 2) return 0.0;
    std::vector<double> means(resamples);
    const auto n = values.size();
    for (auto& m : means) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double v = values[stream.below(n)];
            mean += (v - mean) / static_cast<double>(i + 1);
        }
        m = mean;
    }
    return mean_estimate(means).std_error * std::sqrt(static_cast<double>(resamples));
}

}  // namespace scenery
