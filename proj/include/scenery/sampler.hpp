#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "scenery/rng.hpp"
#include "scenery/stable_law.hpp"
#include "scenery/wide_int.hpp"

namespace scenery {

// Equal masses on k values: ceil(log2 k) reservoir bits with rejection.
class EqualMassSampler {
public:
    explicit EqualMassSampler(std::vector<wide_int> values);
    wide_int operator()(RngStream& rng) const noexcept {
        for (;;) {
            std::uint32_t r = bits_ == 0 ? 0 : rng.bits(bits_);
            if (r < values_.size()) return values_[r];
        }
    }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<wide_int> values_;
    unsigned bits_ = 0;
};

// Walker alias table; one 64-bit word per draw (index from the high product,
// coin from the low product).
class AliasSampler {
public:
    AliasSampler(std::vector<wide_int> values, const std::vector<double>& probabilities);
    wide_int operator()(RngStream& rng) const noexcept {
        std::uint64_t u = rng.next_u64();
        auto prod = static_cast<unsigned __int128>(u) * values_.size();
        auto idx = static_cast<std::size_t>(prod >> 64);
        auto coin = static_cast<std::uint64_t>(prod);
        return coin < threshold_[idx] ? values_[idx] : values_[alias_[idx]];
    }

private:
    std::vector<wide_int> values_;
    std::vector<std::uint64_t> threshold_;
    std::vector<std::uint32_t> alias_;
};

// Symmetric truncated power tail: alias table over |k| <= head, Pareto
// rejection beyond it, independent sign.
class PowerTailSampler {
public:
    explicit PowerTailSampler(const PowerTail& tail);
    wide_int operator()(RngStream& rng) const;

private:
    wide_int draw_tail(RngStream& rng) const;

    PowerTail tail_;
    double s_ = 0.0;
    wide_int head_ = 0;
    double head_mass_ = 0.0;  // P(|X| <= head)
    AliasSampler magnitude_;
};

// Sampler for any lattice DistributionSpec. Dispatch happens once per walk via
// visit(); the inner loops see the concrete sampler type.
class LatticeSampler {
public:
    explicit LatticeSampler(const DistributionSpec& spec);

    wide_int operator()(RngStream& rng) const {
        return std::visit([&](const auto& s) { return s(rng); }, impl_);
    }
    template <class F>
    decltype(auto) visit(F&& f) const {
        return std::visit(std::forward<F>(f), impl_);
    }
    // Bound on |value|; used to size dense local-time windows.
    wide_int max_abs() const noexcept { return max_abs_; }
    bool bounded_small() const noexcept { return max_abs_ <= 64; }
    const std::variant<EqualMassSampler, AliasSampler, PowerTailSampler>& impl() const noexcept { return impl_; }

private:
    std::variant<EqualMassSampler, AliasSampler, PowerTailSampler> impl_;
    wide_int max_abs_ = 0;
};

}  // namespace scenery
