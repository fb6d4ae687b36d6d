#include "scenery/llt_estimator.hpp"

#include <cmath>

#include "scenery/error.hpp"
#include "scenery/walk_engine.hpp"

namespace scenery {

namespace {

constexpr std::uint64_t kSampleBlock = 8192;
constexpr std::uint64_t kReplicaBlock = 16;
constexpr std::uint64_t kBootstrapStream = std::uint64_t{1} << 63;

const StableParams& attraction_of(const DistributionSpec& d, const char* role) {
    if (!d.attraction)
        throw Error(Errc::invalid_argument, std::string(role) + " " + d.name + " has no stable attraction");
    return *d.attraction;
}

std::uint64_t completed(std::size_t blocks, std::uint64_t samples, std::uint64_t block) {
    return std::min<std::uint64_t>(samples, static_cast<std::uint64_t>(blocks) * block);
}

MCEstimate finish(std::uint64_t hits, std::uint64_t done) {
    if (done == 0) return exact_zero(0);
    return wilson_estimate(hits, done);
}

}  // namespace

double delta_exponent(double alpha, double beta) { return 1.0 - (1.0 - 1.0 / beta) / alpha; }

Exponents make_exponents(const StableParams& walk, const StableParams& scenery) {
    walk.validate();
    scenery.validate();
    if (walk.index == 1.0) throw Error(Errc::invalid_argument, "walk attraction index 1 is excluded");
    Exponents e;
    e.walk_attraction = walk;
    e.scenery_attraction = scenery;
    e.delta = delta_exponent(walk.index, scenery.index);
    e.scaling = walk.index < 1.0 ? 1.0 / scenery.index : e.delta;
    e.oriented_exponent = 1.0 + 1.0 / (walk.index * scenery.index);
    return e;
}

Exponents make_exponents(const DistributionSpec& step, const SceneryModel& scenery) {
    return make_exponents(attraction_of(step, "step"), attraction_of(scenery.dist, "scenery"));
}

MCEstimate simulate_point_prob(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n,
                               wide_int target, std::uint64_t samples, const RngStream& stream,
                               const ExecPolicy& policy) {
    if (n == 0 || samples == 0) throw Error(Errc::invalid_argument, "n and samples must be >= 1");
    if (!scenery.dist.is_lattice()) throw Error(Errc::not_lattice, "point probabilities need a lattice scenery");
    auto parts = run_blocks<std::uint64_t>(block_count(samples, kSampleBlock), policy, [&](std::size_t b) {
        RngStream rng = stream.split(b);
        RwrsKernel kernel(step, scenery, n);
        std::uint64_t hits = 0;
        const auto len = block_length(b, samples, kSampleBlock);
        for (std::uint64_t i = 0; i < len; ++i) hits += kernel.sample_lattice(n, rng) == target;
        return hits;
    });
    std::uint64_t hits = 0;
    for (auto h : parts) hits += h;
    return finish(hits, completed(parts.size(), samples, kSampleBlock));
}

MCEstimate estimate_point_prob(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n,
                               wide_int target, std::uint64_t samples, const RngStream& stream,
                               const ExecPolicy& policy) {
    if (!support_condition(n, target, scenery)) return exact_zero(samples);
    return simulate_point_prob(step, scenery, n, target, samples, stream, policy);
}

MCEstimate estimate_interval_prob(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n,
                                  double x, double a, double b, std::uint64_t samples, const RngStream& stream,
                                  const ExecPolicy& policy) {
    if (n == 0 || samples == 0) throw Error(Errc::invalid_argument, "n and samples must be >= 1");
    if (!(a < b)) throw Error(Errc::invalid_argument, "interval needs a < b");
    const auto ex = make_exponents(step, scenery);
    const double centre = std::pow(static_cast<double>(n), ex.scaling) * x;
    const double lo = centre + a, hi = centre + b;
    auto parts = run_blocks<std::uint64_t>(block_count(samples, kSampleBlock), policy, [&](std::size_t blk) {
        RngStream rng = stream.split(blk);
        RwrsKernel kernel(step, scenery, n);
        std::uint64_t hits = 0;
        const auto len = block_length(blk, samples, kSampleBlock);
        for (std::uint64_t i = 0; i < len; ++i) {
            double z = kernel.lattice() ? static_cast<double>(kernel.sample_lattice(n, rng))
                                        : kernel.sample_real(n, rng);
            hits += z >= lo && z <= hi;
        }
        return hits;
    });
    std::uint64_t hits = 0;
    for (auto h : parts) hits += h;
    return finish(hits, completed(parts.size(), samples, kSampleBlock));
}

LimitConstants estimate_C(double x, const DistributionSpec& step, const StableParams& scenery_attraction,
                          std::uint64_t m, std::uint64_t replicas, const RngStream& stream,
                          const ExecPolicy& policy, std::size_t bootstrap_resamples) {
    if (m == 0 || replicas == 0) throw Error(Errc::invalid_argument, "m and replicas must be >= 1");
    const auto& walk = attraction_of(step, "step");
    if (!(walk.index > 1.0)) throw Error(Errc::invalid_argument, "estimate_C needs a walk index above 1");
    scenery_attraction.validate();
    const double beta = scenery_attraction.index;
    const double delta = delta_exponent(walk.index, beta);
    const double m_pow = std::pow(static_cast<double>(m), delta * beta);
    const double f_at_zero = x == 0.0 ? stable_density(0.0, scenery_attraction) : 0.0;
    LatticeSampler sampler(step);

    auto parts = run_blocks<std::vector<double>>(block_count(replicas, kReplicaBlock), policy, [&](std::size_t b) {
        RngStream rng = stream.split(b);
        LocalTimeWorkspace ws(sampler, m);
        std::vector<double> out;
        const auto len = block_length(b, replicas, kReplicaBlock);
        for (std::uint64_t i = 0; i < len; ++i) {
            ws.run(sampler, m, rng);
            double v = 0.0;
            ws.for_each([&](wide_int, std::uint64_t c) { v += beta_energy_term(c, beta); });
            // W^beta = m^(delta beta) / V; exact W = 1 when beta = 1.
            double w = std::pow(m_pow / v, 1.0 / beta);
            out.push_back(x == 0.0 ? w * f_at_zero : w * stable_density(w * x, scenery_attraction));
        }
        return out;
    });
    std::vector<double> values;
    for (auto& p : parts) values.insert(values.end(), p.begin(), p.end());
    if (values.empty()) throw Error(Errc::invalid_argument, "estimate_C cancelled before any replica");
    LimitConstants out;
    out.x = x;
    out.m_used = m;
    out.replicas = values.size();
    auto mean = mean_estimate(values);
    out.c_of_x = ValueWithError{mean.mean,
                                bootstrap_mean_std_error(values, bootstrap_resamples, stream.split(kBootstrapStream))};
    return out;
}

LimitConstants estimate_D(double x, const DistributionSpec& step, const StableParams& scenery_attraction,
                          const MCEstimate& p0_est) {
    const auto& walk = attraction_of(step, "step");
    if (!(walk.index < 1.0)) throw Error(Errc::invalid_argument, "estimate_D needs a walk index below 1");
    scenery_attraction.validate();
    const double beta = scenery_attraction.index;
    auto d_at = [&](double p0, double& r) {
        r = ntilde_moment(p0, beta).r;
        return r * stable_density(r * x, scenery_attraction);
    };
    LimitConstants out;
    out.x = x;
    double r_low = 1, r_high = 1;
    double d = d_at(p0_est.estimate, out.r);
    out.d_at_p0_low = d_at(p0_est.ci_low, r_low);
    out.d_at_p0_high = d_at(std::min(p0_est.ci_high, 1.0 - 1e-15), r_high);
    double half_width = std::abs(out.d_at_p0_high - out.d_at_p0_low) / 2.0;
    // Half-width of the propagated 95% interval, expressed as one sigma.
    out.d_of_x = ValueWithError{d, half_width / kZ95};
    return out;
}

SlopeFit slope_fit(const ScalingSeries& series) {
    for (std::size_t i = 1; i < series.points.size(); ++i)
        if (series.points[i].n <= series.points[i - 1].n)
            throw Error(Errc::invalid_argument, "series n must be strictly increasing");
    std::vector<double> xs, ys, ws;
    bool unit = false;
    for (const auto& p : series.points) {
        if (p.estimate.hits < kMinHitsForFit || !(p.estimate.estimate > 0.0)) continue;
        xs.push_back(std::log(static_cast<double>(p.n)));
        ys.push_back(std::log(p.estimate.estimate));
        double rel = p.estimate.std_error / p.estimate.estimate;
        if (rel == 0.0) unit = true;
        ws.push_back(rel == 0.0 ? 1.0 : 1.0 / (rel * rel));
    }
    if (xs.size() < 3)
        throw Error(Errc::insufficient_points,
                    "slope fit needs 3 points with >= 30 hits, have " + std::to_string(xs.size()));
    if (unit) std::fill(ws.begin(), ws.end(), 1.0);
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sw += ws[i];
        sx += ws[i] * xs[i];
        sy += ws[i] * ys[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
        sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
    }
    SlopeFit fit;
    fit.used_points = xs.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - fit.intercept - fit.slope * xs[i];
        rss += ws[i] * r * r;
    }
    fit.std_error = std::sqrt(rss / static_cast<double>(xs.size() - 2) / sxx);
    return fit;
}

ScalingSeries point_prob_series(const DistributionSpec& step, const SceneryModel& scenery,
                                const std::vector<std::uint64_t>& ns, double x, std::uint64_t samples,
                                const RngStream& stream, const ExecPolicy& policy) {
    const auto ex = make_exponents(step, scenery);
    ScalingSeries series;
    for (auto n : ns) {
        if (cancellation_requested()) break;
        auto target = static_cast<wide_int>(std::floor(std::pow(static_cast<double>(n), ex.scaling) * x));
        series.points.push_back({n, estimate_point_prob(step, scenery, n, target, samples, stream.split(n), policy)});
    }
    try {
        auto fit = slope_fit(series);
        series.slope = fit.slope;
        series.slope_std_error = fit.std_error;
    } catch (const Error& e) {
        if (e.code() != Errc::insufficient_points) throw;
        series.slope = std::nan("");
        series.slope_std_error = std::nan("");
    }
    return series;
}

}  // namespace scenery
