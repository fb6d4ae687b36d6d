#include "scenery/sampler.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "scenery/error.hpp"

namespace scenery {

EqualMassSampler::EqualMassSampler(std::vector<wide_int> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error(Errc::invalid_argument, "empty support");
    bits_ = values_.size() == 1 ? 0 : static_cast<unsigned>(std::bit_width(values_.size() - 1));
}

AliasSampler::AliasSampler(std::vector<wide_int> values, const std::vector<double>& probabilities)
    : values_(std::move(values)) {
    const std::size_t k = values_.size();
    if (k == 0 || k != probabilities.size()) throw Error(Errc::invalid_argument, "alias table size mismatch");
    long double total = 0;
    for (double p : probabilities) total += p;
    std::vector<long double> scaled(k);
    for (std::size_t i = 0; i < k; ++i) scaled[i] = probabilities[i] * static_cast<long double>(k) / total;
    threshold_.assign(k, std::numeric_limits<std::uint64_t>::max());
    alias_.resize(k);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < k; ++i) {
        alias_[i] = static_cast<std::uint32_t>(i);
        (scaled[i] < 1.0L ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        std::size_t s = small.back();
        small.pop_back();
        std::size_t l = large.back();
        threshold_[s] = static_cast<std::uint64_t>(scaled[s] * 0x1.0p64L);
        alias_[s] = static_cast<std::uint32_t>(l);
        scaled[l] -= 1.0L - scaled[s];
        if (scaled[l] < 1.0L) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers are 1 up to rounding and keep the saturated threshold.
}

namespace {

constexpr std::int64_t kPowerTailHead = 4096;

// Magnitudes 1..head plus the marker 0 carrying the mass beyond head.
AliasSampler magnitude_table(double s, wide_int head, double tail_weight) {
    std::vector<wide_int> values;
    std::vector<double> probs;
    for (wide_int k = 1; k <= head; ++k) {
        values.push_back(k);
        probs.push_back(std::pow(static_cast<double>(k), -s));
    }
    if (tail_weight > 0) {
        values.push_back(0);
        probs.push_back(tail_weight);
    }
    return AliasSampler(std::move(values), probs);
}

wide_int head_of(const PowerTail& tail) {
    return tail.truncation < kPowerTailHead ? tail.truncation : wide_int{kPowerTailHead};
}

double head_sum(double s, wide_int head) {
    long double sum = 0;
    for (wide_int k = head; k >= 1; --k) sum += std::pow(static_cast<long double>(k), -s);
    return static_cast<double>(sum);
}

}  // namespace

PowerTailSampler::PowerTailSampler(const PowerTail& tail)
    : tail_(tail),
      s_(1.0 + tail.index),
      head_(head_of(tail)),
      head_mass_(head_ == tail.truncation ? 1.0 : head_sum(s_, head_) / tail.normalizer),
      magnitude_(magnitude_table(s_, head_, head_ == tail.truncation ? 0.0 : tail.normalizer - head_sum(s_, head_))) {}

wide_int PowerTailSampler::draw_tail(RngStream& rng) const {
    const double h = static_cast<double>(head_);
    const double K = static_cast<double>(tail_.truncation);
    const double e = 1.0 - s_;
    const double hp = std::pow(h, e);
    const double kp = std::pow(K, e);
    for (;;) {
        double x = std::pow(hp - rng.uniform() * (hp - kp), 1.0 / e);
        wide_int k;
        if (x < 0x1.0p53) {
            k = static_cast<wide_int>(std::floor(x)) + 1;
        } else {
            // Below double resolution the mass is flat across one ulp; fill the
            // low bits uniformly.
            int exp2 = std::ilogb(x) - 52;
            k = static_cast<wide_int>(x) + static_cast<wide_int>(rng.below(std::uint64_t{1} << exp2)) + 1;
        }
        if (k <= head_ || k > tail_.truncation) continue;
        double kd = static_cast<double>(k);
        // Proposal mass int_{k-1}^k x^-s dx relative to k^-s.
        double ratio = kd * std::expm1(e * std::log1p(-1.0 / kd)) / (s_ - 1.0);
        if (rng.uniform() * ratio < 1.0) return k;
    }
}

wide_int PowerTailSampler::operator()(RngStream& rng) const {
    wide_int magnitude = magnitude_(rng);
    if (magnitude == 0) magnitude = draw_tail(rng);
    return rng.bits(1) ? magnitude : -magnitude;
}

namespace {

bool equal_masses(const std::vector<PmfAtom>& atoms) {
    for (const auto& a : atoms) {
        double ref = atoms.front().probability;
        if (std::abs(a.probability - ref) > 4 * std::numeric_limits<double>::epsilon() * ref) return false;
    }
    return true;
}

}  // namespace

LatticeSampler::LatticeSampler(const DistributionSpec& spec)
    : impl_(EqualMassSampler({0})) {
    if (!spec.is_lattice()) throw Error(Errc::not_lattice, spec.name + " is not a lattice law");
    max_abs_ = spec.max_abs_value();
    if (spec.tail) {
        impl_ = PowerTailSampler(*spec.tail);
        return;
    }
    std::vector<wide_int> values;
    std::vector<double> probs;
    for (const auto& a : spec.atoms) {
        values.push_back(a.value);
        probs.push_back(a.probability);
    }
    if (equal_masses(spec.atoms) && values.size() <= (std::size_t{1} << 16))
        impl_ = EqualMassSampler(std::move(values));
    else
        impl_ = AliasSampler(std::move(values), probs);
}

}  // namespace scenery
