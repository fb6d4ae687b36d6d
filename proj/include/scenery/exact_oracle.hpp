#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scenery/scenery_engine.hpp"
#include "scenery/stable_law.hpp"

namespace scenery {

using Rational = boost::multiprecision::cpp_rational;

enum class PmfMode { rational, real };
const char* to_string(PmfMode mode);

// Exact finite law on the integers.
struct IntegerPmf {
    std::uint64_t n = 0;
    PmfMode mode = PmfMode::real;
    std::map<wide_int, double> probability;  // positive masses only
    std::map<wide_int, Rational> exact;      // rational mode only
    std::string model;

    double at(wide_int value) const;
    double total() const;
    Rational exact_total() const;
};

inline constexpr std::uint64_t kEnumerationBudget = 10'000'000;

// Step paths grouped by the sorted multiset of their local times. The law of
// Z_n given the walk only depends on that multiset.
struct ProfileGroup {
    std::vector<std::uint64_t> counts;  // ascending
    double weight = 0.0;
    Rational exact_weight;
};

struct ProfileGroups {
    std::uint64_t n = 0;
    bool exact = false;
    std::uint64_t paths = 0;
    std::vector<ProfileGroup> groups;
};

// Errc::budget_exceeded unless |support|^n <= kEnumerationBudget.
ProfileGroups group_profiles(const DistributionSpec& step, std::uint64_t n);

IntegerPmf exact_pmf(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n);
IntegerPmf exact_pmf(const ProfileGroups& groups, const SceneryModel& scenery);

std::complex<double> scenery_cf(const SceneryModel& scenery, double t);
std::complex<double> exact_cf(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n, double t);
std::complex<double> exact_cf(const ProfileGroups& groups, const SceneryModel& scenery, double t);

// Inversion of phi_n over one period [-pi/d, pi/d].
//   integral      (d / 2pi) int exp(-itx) phi_n(t) dt
//   root_factor   sum_{k<d} exp(-2 pi i k x / d) phi_xi(2 pi / d)^(k n)
//   identity      (1 / 2pi) root_factor int exp(-itx) phi_n(t) dt
// identity equals P(Z_n = x) for every x; integral equals it when the support
// condition holds (root_factor is then d, otherwise 0).
struct InversionReport {
    std::uint64_t n = 0;
    wide_int x = 0;
    wide_int span = 0;
    bool support_condition = false;
    double integral = 0.0;
    double root_factor = 0.0;
    double identity = 0.0;
    double pmf = 0.0;
    double difference = 0.0;  // |identity - pmf|
    double quadrature_change = 0.0;
};

InversionReport inversion_check(const DistributionSpec& step, const SceneryModel& scenery, std::uint64_t n,
                                wide_int x);
InversionReport inversion_check(const ProfileGroups& groups, const SceneryModel& scenery, const IntegerPmf& pmf,
                                wide_int x);

// Law of R_n = #{S_0, ..., S_{n-1}}.
IntegerPmf exact_range_pmf(const DistributionSpec& step, std::uint64_t n);

// "# key: value" header lines, then value,probability[,exact].
std::string to_csv(const IntegerPmf& pmf);

}  // namespace scenery
