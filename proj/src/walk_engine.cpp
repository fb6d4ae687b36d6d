#include "scenery/walk_engine.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>

#include "scenery/error.hpp"

namespace scenery {

namespace {

constexpr std::int64_t kMaxDenseRadius = std::int64_t{1} << 22;

void check_conservation([[maybe_unused]] const LocalTimeProfile& p) {
#ifndef NDEBUG
    std::uint64_t total = 0;
    for (const auto& [site, c] : p.counts) total += c;
    assert(total == p.n);
#endif
}

}  // namespace

LocalTimeWorkspace::LocalTimeWorkspace(const LatticeSampler& sampler, std::uint64_t max_n) {
    wide_int reach = sampler.max_abs() * static_cast<wide_int>(max_n);
    dense_ = reach <= kMaxDenseRadius;
    if (dense_) {
        radius_ = static_cast<std::int64_t>(reach);
        dense_counts_.assign(static_cast<std::size_t>(2 * radius_ + 1), 0);
    } else {
        std::size_t cap = std::bit_ceil(static_cast<std::size_t>(2 * max_n + 16));
        keys_.assign(cap, 0);
        values_.assign(cap, 0);
        mask_ = cap - 1;
        order_.reserve(max_n);
    }
}

void LocalTimeWorkspace::clear() {
    if (dense_) {
        if (hi_ >= lo_)
            std::fill(dense_counts_.begin() + (lo_ + radius_), dense_counts_.begin() + (hi_ + radius_ + 1), 0u);
        lo_ = 0;
        hi_ = -1;
    } else {
        for (std::uint32_t slot : order_) values_[slot] = 0;
        order_.clear();
    }
}

void LocalTimeWorkspace::table_add(wide_int site) {
    std::size_t slot = WideIntHash{}(site) & mask_;
    for (;;) {
        if (values_[slot] == 0) {
            keys_[slot] = site;
            values_[slot] = 1;
            order_.push_back(static_cast<std::uint32_t>(slot));
            return;
        }
        if (keys_[slot] == site) {
            ++values_[slot];
            return;
        }
        slot = (slot + 1) & mask_;
    }
}

wide_int LocalTimeWorkspace::run(const LatticeSampler& sampler, std::uint64_t n, RngStream& rng) {
    clear();
    if (dense_) {
        if (sampler.max_abs() * static_cast<wide_int>(n) > radius_)
            throw Error(Errc::invalid_argument, "walk longer than the workspace window");
        std::int64_t end = 0, lo = 0, hi = 0;
        std::uint32_t* counts = dense_counts_.data() + radius_;
        sampler.visit([&](const auto& draw) {
            std::int64_t pos = 0;
            for (std::uint64_t k = 0; k < n; ++k) {
                ++counts[pos];
                pos += static_cast<std::int64_t>(draw(rng));
                lo = std::min(lo, pos);
                hi = std::max(hi, pos);
            }
            end = pos;
        });
        lo_ = lo;
        hi_ = hi;
        return end;
    }
    if (2 * n + 16 > keys_.size()) throw Error(Errc::invalid_argument, "walk longer than the workspace table");
    wide_int end = 0;
    sampler.visit([&](const auto& draw) {
        wide_int pos = 0;
        for (std::uint64_t k = 0; k < n; ++k) {
            table_add(pos);
            pos += draw(rng);
        }
        end = pos;
    });
    return end;
}

std::uint64_t LocalTimeWorkspace::range() const {
    if (!dense_) return order_.size();
    std::uint64_t r = 0;
    for_each([&](wide_int, std::uint64_t) { ++r; });
    return r;
}

std::uint64_t LocalTimeWorkspace::count_at(wide_int site) const {
    if (dense_) {
        if (site < lo_ || site > hi_) return 0;
        return dense_counts_[static_cast<std::size_t>(static_cast<std::int64_t>(site) + radius_)];
    }
    std::size_t slot = WideIntHash{}(site) & mask_;
    while (values_[slot] != 0) {
        if (keys_[slot] == site) return values_[slot];
        slot = (slot + 1) & mask_;
    }
    return 0;
}

LocalTimeProfile LocalTimeWorkspace::to_profile(std::uint64_t n, wide_int endpoint) const {
    LocalTimeProfile p;
    p.n = n;
    p.endpoint = endpoint;
    for_each([&](wide_int site, std::uint64_t c) { p.counts.emplace(site, c); });
    check_conservation(p);
    return p;
}

LocalTimeProfile profile_from_steps(std::span<const wide_int> steps) {
    LocalTimeProfile p;
    p.n = steps.size();
    wide_int pos = 0;
    for (wide_int s : steps) {
        ++p.counts[pos];
        pos += s;
    }
    p.endpoint = pos;
    return p;
}

LocalTimeProfile simulate_path(const DistributionSpec& step, std::uint64_t n, RngStream& stream) {
    if (n == 0) throw Error(Errc::invalid_argument, "simulate_path needs n >= 1");
    LatticeSampler sampler(step);
    LocalTimeWorkspace ws(sampler, n);
    wide_int end = ws.run(sampler, n, stream);
    return ws.to_profile(n, end);
}

double beta_energy_term(std::uint64_t count, double beta) {
    if (beta == 1.0) return static_cast<double>(count);
    if (beta == 2.0) return static_cast<double>(count) * static_cast<double>(count);
    return std::pow(static_cast<double>(count), beta);
}

WalkStats stats(const LocalTimeProfile& profile, double beta) {
    if (!(beta > 0.0 && beta <= 2.0)) throw Error(Errc::invalid_argument, "beta must lie in (0,2]");
    WalkStats s;
    s.horizon = profile.n;
    s.range = profile.counts.size();
    if (beta == 1.0 || beta == 2.0) {
        // Exact integer accumulation.
        unsigned __int128 total = 0;
        for (const auto& [site, c] : profile.counts) {
            total += beta == 1.0 ? c : static_cast<unsigned __int128>(c) * c;
            s.max_local = std::max(s.max_local, c);
        }
        s.beta_energy = static_cast<double>(total);
        return s;
    }
    double total = 0.0;
    for (const auto& [site, c] : profile.counts) {
        total += std::pow(static_cast<double>(c), beta);
        s.max_local = std::max(s.max_local, c);
    }
    s.beta_energy = total;
    return s;
}

bool bridge_feasible(const DistributionSpec& step, std::uint64_t n) {
    if (!step.is_lattice()) throw Error(Errc::not_lattice, step.name + " is not a lattice law");
    if (step.tail) return true;  // symmetric, span 1
    const auto nn = static_cast<wide_int>(n);
    wide_int lo = step.atoms.front().value, hi = step.atoms.back().value;
    if (nn * lo > 0 || nn * hi < 0) return false;
    wide_int d = step.declared_span;
    if (d == 0) return nn * lo == 0;
    return wide_mod(nn * lo, d) == 0;
}

std::uint64_t default_bridge_budget(const DistributionSpec& step, std::uint64_t n) {
    double alpha = step.attraction ? step.attraction->index : 2.0;
    return static_cast<std::uint64_t>(1e4 * std::ceil(std::pow(static_cast<double>(n), 1.0 / alpha)));
}

BridgeSample simulate_bridge(const DistributionSpec& step, std::uint64_t n, RngStream& stream,
                             std::uint64_t max_attempts) {
    if (n == 0 || max_attempts == 0) throw Error(Errc::invalid_argument, "simulate_bridge needs n, max_attempts >= 1");
    if (!bridge_feasible(step, n))
        throw Error(Errc::bridge_rejection_exhausted,
                    "no bridge exists: S_" + std::to_string(n) + " = 0 is impossible for " + step.name);
    LatticeSampler sampler(step);
    LocalTimeWorkspace ws(sampler, n);
    for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        wide_int end = ws.run(sampler, n, stream);
        if (end == 0) return {ws.to_profile(n, end), attempt};
    }
    throw Error(Errc::bridge_rejection_exhausted,
                "no bridge accepted within " + std::to_string(max_attempts) + " attempts");
}

ReturnEstimate estimate_p0(const DistributionSpec& step, std::uint64_t horizon, std::uint64_t samples,
                           const RngStream& stream, const ExecPolicy& policy) {
    if (horizon == 0 || samples == 0) throw Error(Errc::invalid_argument, "estimate_p0 needs horizon, samples >= 1");
    LatticeSampler sampler(step);
    constexpr std::uint64_t kBlock = 256;
    auto parts = run_blocks<std::uint64_t>(block_count(samples, kBlock), policy, [&](std::size_t b) {
        RngStream rng = stream.split(b);
        std::uint64_t hits = 0;
        const std::uint64_t len = block_length(b, samples, kBlock);
        sampler.visit([&](const auto& draw) {
            for (std::uint64_t i = 0; i < len; ++i) {
                wide_int pos = 0;
                for (std::uint64_t k = 1; k <= horizon; ++k) {
                    pos += draw(rng);
                    if (pos == 0) {
                        ++hits;
                        break;
                    }
                }
            }
        });
        return hits;
    });
    std::uint64_t hits = 0;
    for (auto h : parts) hits += h;
    std::uint64_t done = std::min<std::uint64_t>(samples, parts.size() * kBlock);
    return {wilson_estimate(hits, std::max<std::uint64_t>(done, 1)), horizon};
}

NtildeMoment ntilde_moment(double p0, double beta) {
    if (!(p0 >= 0.0 && p0 < 1.0)) throw Error(Errc::invalid_p0, "p0 must lie in [0,1)");
    if (!(beta > 0.0 && beta <= 2.0)) throw Error(Errc::invalid_argument, "beta must lie in (0,2]");
    NtildeMoment out;
    if (p0 == 0.0 || beta == 1.0) return out;
    // T = G1 + G2: P(T = k) = (k+1)(1-p0)^2 p0^k, P(T >= k) = p0^k (1 + k(1-p0)).
    const double q = 1.0 - p0;
    double moment = 0.0;
    double pk = 1.0;  // p0^k
    for (std::uint64_t k = 0;; ++k) {
        double mass = static_cast<double>(k + 1) * q * q * pk;
        moment += mass * std::pow(static_cast<double>(k + 1), beta - 1.0);
        double tail = pk * p0 * (1.0 + static_cast<double>(k + 1) * q);  // P(T >= k+1)
        out.terms = k + 1;
        if (tail < 1e-12) break;
        pk *= p0;
    }
    out.moment = moment;
    out.r = std::pow(moment, -1.0 / beta);
    return out;
}

MeanEstimate estimate_two_sided_occupation(const DistributionSpec& step, std::uint64_t horizon,
                                           std::uint64_t replicas, const RngStream& stream,
                                           const ExecPolicy& policy) {
    if (horizon == 0 || replicas == 0) throw Error(Errc::invalid_argument, "needs horizon, replicas >= 1");
    LatticeSampler sampler(step);
    constexpr std::uint64_t kBlock = 64;
    auto parts = run_blocks<std::vector<double>>(block_count(replicas, kBlock), policy, [&](std::size_t b) {
        RngStream rng = stream.split(b);
        std::vector<double> out;
        const std::uint64_t len = block_length(b, replicas, kBlock);
        sampler.visit([&](const auto& draw) {
            for (std::uint64_t i = 0; i < len; ++i) {
                std::uint64_t visits = 1;
                for (int side = 0; side < 2; ++side) {
                    wide_int pos = 0;
                    for (std::uint64_t k = 1; k <= horizon; ++k) {
                        pos += draw(rng);
                        visits += pos == 0;
                    }
                }
                out.push_back(static_cast<double>(visits));
            }
        });
        return out;
    });
    std::vector<double> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return mean_estimate(all);
}

}  // namespace scenery
