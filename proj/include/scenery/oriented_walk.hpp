#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "scenery/estimate.hpp"
#include "scenery/exact_oracle.hpp"
#include "scenery/llt_estimator.hpp"
#include "scenery/parallel.hpp"
#include "scenery/rng.hpp"
#include "scenery/scenery_engine.hpp"
#include "scenery/stable_law.hpp"

namespace scenery {

inline constexpr std::uint64_t kD1SearchLimit = 64;
inline constexpr std::uint64_t kD1Stabilization = 16;

struct OrientedParams {
    double p = 1.0 / 3.0;
    std::optional<ExactProb> p_exact;
    DistributionSpec mu_X;
    DistributionSpec mu_xi;
    wide_int d = 0;
    wide_int witness = 0;
    wide_int d0 = 0;
    wide_int d1 = 0;
    bool hypothesis_ok = false;
    std::uint64_t d1_searched = 0;  // largest m examined for d1
};

// Validates the laws and fills d, d0, d1. p_exact, when given, must equal p.
OrientedParams make_oriented_params(double p, DistributionSpec mu_X, DistributionSpec mu_xi,
                                    std::optional<ExactProb> p_exact = std::nullopt);

struct D0D1 {
    wide_int d0 = 0;
    wide_int d1 = 0;
    bool hypothesis_ok = false;
    std::uint64_t searched = 0;
};

// d0 = d / gcd(b mod d, d); d1 = gcd of the m <= 64 with 0 reachable in m
// steps of mu_X, stopping once the gcd has been unchanged for 16 values of m.
D0D1 compute_d0_d1(const DistributionSpec& mu_X, const DistributionSpec& mu_xi);

using Point2 = std::pair<wide_int, wide_int>;

struct OrientedSample {
    Point2 position{0, 0};
    wide_int z_tilde = 0;
    wide_int s_n = 0;
    std::map<wide_int, std::uint64_t> horizontal;   // N~_n(y)
    std::map<wide_int, std::uint64_t> local_times;  // N_n(y) of S over k = 0..n-1
    std::uint64_t vertical_moves = 0;
};

// The Markov chain M on a lazily revealed scenery. Only position is filled.
OrientedSample simulate_direct(const OrientedParams& params, std::uint64_t n, RngStream& stream);

// (Z~, S) built from eps, X and the scenery.
OrientedSample simulate_repr(const OrientedParams& params, std::uint64_t n, RngStream& stream);

// Representation with every input forced. eps and X have length n; scenery
// must cover the sites with horizontal visits.
OrientedSample repr_from_inputs(const std::vector<int>& eps, const std::vector<wide_int>& X,
                                const std::map<wide_int, wide_int>& scenery);

// Hit frequency of M_n = (0,0) through the representation. Exactly 0 without
// simulation when n is not a multiple of d0 (and d0 | d1 holds).
MCEstimate estimate_return_prob(const OrientedParams& params, std::uint64_t n, std::uint64_t samples,
                                const RngStream& stream, const ExecPolicy& policy = {});

// Same estimator without the short-circuit.
MCEstimate simulate_return_prob(const OrientedParams& params, std::uint64_t n, std::uint64_t samples,
                                const RngStream& stream, const ExecPolicy& policy = {});

// Law of the Y-steps, Y = X (1 - eps).
DistributionSpec vertical_law(const OrientedParams& params);

struct EEstimate {
    double E = 0.0;
    double std_error = 0.0;
    double d = 0.0;
    double p = 0.0;
    double f_alpha0 = 0.0;  // m^(1/alpha) P(S_m = 0), from the bridge acceptance rate
    double f_alpha0_std_error = 0.0;
    double f_beta0 = 0.0;
    double inv_local_time = 0.0;  // mean of m^delta V_m^(-1/beta) over bridges
    double inv_local_time_std_error = 0.0;
    std::uint64_t m = 0;
    std::uint64_t replicas = 0;
    std::uint64_t attempts = 0;
    double exponent = 0.0;  // 1 + 1/(alpha beta)
};

// E = d p^-1 f_alpha(0) f_beta(0) E|L^0|_beta^-1 at horizon m.
EEstimate estimate_E(const OrientedParams& params, std::uint64_t m, std::uint64_t replicas, const RngStream& stream,
                     const ExecPolicy& policy = {}, std::uint64_t max_attempts_per_bridge = 0);

// Exact laws of M_n from each construction, by total enumeration over eps, X
// and the scenery revealed on demand. Needs finite supports and exact masses.
std::map<Point2, Rational> exact_direct_law(const OrientedParams& params, std::uint64_t n);
std::map<Point2, Rational> exact_repr_law(const OrientedParams& params, std::uint64_t n);

struct ChiSquareResult {
    double statistic = 0.0;
    std::uint64_t dof = 0;
    double p_value = 1.0;
    std::size_t cells = 0;
};

// Two-sample homogeneity test; cells with expected count below 5 are pooled.
ChiSquareResult chi_square_two_sample(const std::map<Point2, std::uint64_t>& a,
                                      const std::map<Point2, std::uint64_t>& b);

// Histogram of M_n from either simulator.
std::map<Point2, std::uint64_t> position_histogram(const OrientedParams& params, std::uint64_t n,
                                                  std::uint64_t samples, bool direct, const RngStream& stream,
                                                  const ExecPolicy& policy = {});

}  // namespace scenery
