#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scenery/rng.hpp"
#include "scenery/wide_int.hpp"

namespace scenery {

// Strictly stable law with characteristic function
// exp(-|u|^index (A1 + i A2 sgn u)).
struct StableParams {
    double index = 2.0;
    double A1 = 0.5;
    double A2 = 0.0;

    // Throws Errc::invalid_argument unless index in (0,2], A1 > 0 and
    // |A2/A1| <= |tan(pi index / 2)| (A2 == 0 at index 1).
    void validate() const;
    bool symmetric() const noexcept { return A2 == 0.0; }
};

std::complex<double> stable_cf(double u, const StableParams& params);

// Density by Fourier inversion, absolute error <= tol.
double stable_density(double x, const StableParams& params, double tol = 1e-10);

// Upper limit T of the inversion integral: the discarded tail of
// (1/pi) int_T^inf exp(-A1 t^index) dt is below tol / 10.
double stable_inversion_cutoff(const StableParams& params, double tol);

// Symmetric stable variate (Chambers-Mallows-Stuck); Errc::unsupported_skew if A2 != 0.
double stable_sample(const StableParams& params, RngStream& stream);

enum class DistKind { lattice_pmf, continuous };

struct ExactProb {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

struct PmfAtom {
    wide_int value = 0;
    double probability = 0.0;
    std::optional<ExactProb> exact;  // present when the mass is a known rational
};

// Symmetric P(X = +-k) proportional to k^(-1-index), k = 1..truncation.
struct PowerTail {
    double index = 0.5;
    wide_int truncation = 0;
    double omitted_mass = 0.0;  // certified upper bound on the dropped tail mass
    double normalizer = 0.0;    // sum_{k=1}^{truncation} k^(-1-index)
};

struct DistributionSpec {
    std::string name;
    DistKind kind = DistKind::lattice_pmf;
    std::vector<PmfAtom> atoms;          // finite support, ascending values
    std::optional<PowerTail> tail;       // parametric support (atoms empty)
    double gaussian_sd = 0.0;            // continuous: N(0, sd^2)
    wide_int declared_span = 0;          // lattice only
    std::optional<StableParams> attraction;

    bool is_lattice() const noexcept { return kind == DistKind::lattice_pmf; }
    bool finite_support() const noexcept { return is_lattice() && !tail; }
    bool all_exact() const noexcept;
    double probability(wide_int value) const;
    // Largest |value| with positive mass.
    wide_int max_abs_value() const;
};

// Built-ins: rademacher, lazy-uniform, zeta-tail(index), centered-geometric[(q)],
// gaussian, plus pmf(v:p,...) for an explicit finite lattice law.
DistributionSpec catalog(const std::string& name);

// Finite lattice law from atoms (merged, sorted, checked to sum to 1).
DistributionSpec make_finite_pmf(const std::string& name, std::vector<PmfAtom> atoms);

}  // namespace scenery
