#include "scenery/oriented_walk.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "scenery/error.hpp"
#include "scenery/walk_engine.hpp"

namespace scenery {

namespace {

constexpr std::uint64_t kSampleBlock = 8192;
constexpr std::uint64_t kReplicaBlock = 16;
constexpr std::uint64_t kBootstrapStream = std::uint64_t{1} << 63;

void require_finite(const DistributionSpec& d, const char* role) {
    if (!d.finite_support())
        throw Error(Errc::invalid_argument, std::string(role) + " " + d.name + " must be a finite lattice law");
}

ExactProb reduce(std::int64_t num, std::int64_t den) {
    auto g = std::gcd(num, den);
    return {num / g, den / g};
}

Rational exact_of(const PmfAtom& a) {
    if (!a.exact) throw Error(Errc::invalid_argument, "exact enumeration needs rational masses");
    return Rational(a.exact->num, a.exact->den);
}

Rational exact_p(const OrientedParams& params) {
    if (!params.p_exact) throw Error(Errc::invalid_argument, "exact enumeration needs a rational p");
    return Rational(params.p_exact->num, params.p_exact->den);
}

// Combined step law: code 1 is a horizontal move, code 2x a vertical jump by x.
DistributionSpec combined_law(const OrientedParams& params) {
    std::vector<PmfAtom> atoms;
    atoms.push_back({1, params.p, std::nullopt});
    for (const auto& a : params.mu_X.atoms) atoms.push_back({2 * a.value, (1.0 - params.p) * a.probability, std::nullopt});
    return make_finite_pmf("combined", std::move(atoms));
}

// Repeated M_n = (0,0) checks through the representation.
class ReturnKernel {
public:
    ReturnKernel(const OrientedParams& params, std::uint64_t n)
        : combined_(combined_law(params)), scenery_model_(make_scenery_model(params.mu_xi)),
          scenery_(scenery_model_) {
        wide_int reach = params.mu_X.max_abs_value() * static_cast<wide_int>(n);
        if (reach > (wide_int{1} << 24)) throw Error(Errc::invalid_argument, "vertical reach too large");
        radius_ = static_cast<std::int64_t>(reach);
        counts_.assign(static_cast<std::size_t>(2 * radius_ + 1), 0);
        auto law = combined_law(params);
        uniform3_ = law.atoms.size() == 3 && std::holds_alternative<EqualMassSampler>(combined_.impl());
        if (uniform3_) {
            for (int i = 0; i < 3; ++i) {
                auto code = static_cast<std::int64_t>(law.atoms[static_cast<std::size_t>(i)].value);
                horizontal_[i] = code & 1 ? 1u : 0u;
                shift_[i] = code & 1 ? 0 : code / 2;
            }
        }
    }

    bool hit(std::uint64_t n, RngStream& rng) {
        std::int64_t pos = 0, lo = 0, hi = 0;
        std::uint32_t* c = counts_.data() + radius_;
        if (uniform3_) {
            // 40 base-3 digits per accepted word, uniform because the word is
            // uniform on [0, 3^40).
            constexpr std::uint64_t kPow3_40 = 12157665459056928801ULL;
            for (std::uint64_t k = 0; k < n;) {
                std::uint64_t u;
                do u = rng.next_u64();
                while (u >= kPow3_40);
                const std::uint64_t len = std::min<std::uint64_t>(40, n - k);
                for (std::uint64_t j = 0; j < len; ++j) {
                    const auto t = static_cast<unsigned>(u % 3);
                    u /= 3;
                    c[pos] += horizontal_[t];
                    pos += shift_[t];
                    lo = std::min(lo, pos);
                    hi = std::max(hi, pos);
                }
                k += len;
            }
        } else combined_.visit([&](const auto& draw) {
            for (std::uint64_t k = 0; k < n; ++k) {
                auto code = static_cast<std::int64_t>(draw(rng));
                if (code & 1) {
                    ++c[pos];
                } else {
                    pos += code / 2;
                    lo = std::min(lo, pos);
                    hi = std::max(hi, pos);
                }
            }
        });
        bool out = false;
        if (pos == 0) {
            wide_int z = 0;
            scenery_.lattice_sampler().visit([&](const auto& draw) {
                for (std::int64_t s = lo; s <= hi; ++s)
                    if (c[s] != 0) z += draw(rng) * static_cast<wide_int>(c[s]);
            });
            out = z == 0;
        }
        std::fill(c + lo, c + hi + 1, 0u);
        return out;
    }

private:
    LatticeSampler combined_;
    SceneryModel scenery_model_;
    ScenerySampler scenery_;
    std::int64_t radius_ = 0;
    std::vector<std::uint32_t> counts_;
    bool uniform3_ = false;
    std::uint32_t horizontal_[3] = {0, 0, 0};
    std::int64_t shift_[3] = {0, 0, 0};
};

}  // namespace

D0D1 compute_d0_d1(const DistributionSpec& mu_X, const DistributionSpec& mu_xi) {
    require_finite(mu_X, "mu_X");
    auto model = make_scenery_model(mu_xi);
    D0D1 out;
    out.d0 = model.span / wide_gcd(wide_mod(model.witness, model.span), model.span);
    std::set<wide_int> reach{0};
    wide_int g = 0;
    std::uint64_t unchanged = 0;
    for (std::uint64_t m = 1; m <= kD1SearchLimit; ++m) {
        std::set<wide_int> next;
        for (auto s : reach)
            for (const auto& a : mu_X.atoms) next.insert(s + a.value);
        reach.swap(next);
        out.searched = m;
        if (reach.count(0)) {
            wide_int ng = wide_gcd(g, static_cast<wide_int>(m));
            unchanged = ng == g ? unchanged + 1 : 0;
            g = ng;
        } else if (g != 0) {
            ++unchanged;
        }
        if (g != 0 && unchanged >= kD1Stabilization) break;
    }
    out.d1 = g;
    out.hypothesis_ok = g != 0 && wide_mod(g, out.d0) == 0;
    return out;
}

OrientedParams make_oriented_params(double p, DistributionSpec mu_X, DistributionSpec mu_xi,
                                    std::optional<ExactProb> p_exact) {
    if (!(p > 0.0 && p < 1.0)) throw Error(Errc::invalid_argument, "p must lie in (0,1)");
    if (p_exact && std::abs(static_cast<double>(p_exact->num) / static_cast<double>(p_exact->den) - p) > 1e-15)
        throw Error(Errc::invalid_argument, "exact p disagrees with p");
    require_finite(mu_X, "mu_X");
    OrientedParams out;
    out.p = p;
    out.p_exact = p_exact;
    auto dd = compute_d0_d1(mu_X, mu_xi);
    auto model = make_scenery_model(mu_xi);
    out.d = model.span;
    out.witness = model.witness;
    out.d0 = dd.d0;
    out.d1 = dd.d1;
    out.hypothesis_ok = dd.hypothesis_ok;
    out.d1_searched = dd.searched;
    out.mu_X = std::move(mu_X);
    out.mu_xi = std::move(mu_xi);
    return out;
}

DistributionSpec vertical_law(const OrientedParams& params) {
    std::vector<PmfAtom> atoms;
    PmfAtom stay{0, params.p, std::nullopt};
    if (params.p_exact) stay.exact = *params.p_exact;
    atoms.push_back(stay);
    for (const auto& a : params.mu_X.atoms) {
        PmfAtom v{a.value, (1.0 - params.p) * a.probability, std::nullopt};
        if (params.p_exact && a.exact) {
            const auto& q = *params.p_exact;
            v.exact = reduce((q.den - q.num) * a.exact->num, q.den * a.exact->den);
        }
        atoms.push_back(v);
    }
    auto law = make_finite_pmf("Y[" + params.mu_X.name + "]", std::move(atoms));
    if (params.mu_X.attraction && !law.attraction) {
        auto a = *params.mu_X.attraction;
        a.A1 *= 1.0 - params.p;
        law.attraction = a;
    }
    return law;
}

OrientedSample simulate_direct(const OrientedParams& params, std::uint64_t n, RngStream& stream) {
    LatticeSampler x_sampler(params.mu_X);
    LatticeSampler xi_sampler(params.mu_xi);
    std::unordered_map<wide_int, wide_int, WideIntHash> scenery;
    OrientedSample out;
    wide_int m1 = 0, m2 = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        auto it = scenery.find(m2);
        if (it == scenery.end()) it = scenery.emplace(m2, xi_sampler(stream)).first;
        const wide_int xi = it->second;
        if (stream.uniform() < params.p) {
            m1 += xi;  // xi = 0: the horizontal rule is a self-loop
        } else {
            m2 += x_sampler(stream);  // X = 0 stays as well
        }
    }
    out.position = {m1, m2};
    return out;
}

OrientedSample repr_from_inputs(const std::vector<int>& eps, const std::vector<wide_int>& X,
                                const std::map<wide_int, wide_int>& scenery) {
    if (eps.size() != X.size()) throw Error(Errc::invalid_argument, "eps and X lengths differ");
    OrientedSample out;
    wide_int s = 0;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        ++out.local_times[s];
        if (eps[k]) {
            ++out.horizontal[s];
        } else {
            ++out.vertical_moves;
            s += X[k];
        }
    }
    out.s_n = s;
    for (const auto& [y, c] : out.horizontal) {
        auto it = scenery.find(y);
        if (it == scenery.end()) throw Error(Errc::invalid_argument, "no scenery value for line " + to_string(y));
        out.z_tilde += it->second * static_cast<wide_int>(c);
    }
    out.position = {out.z_tilde, out.s_n};
    return out;
}

OrientedSample simulate_repr(const OrientedParams& params, std::uint64_t n, RngStream& stream) {
    LatticeSampler x_sampler(params.mu_X);
    LatticeSampler xi_sampler(params.mu_xi);
    OrientedSample out;
    wide_int s = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        ++out.local_times[s];
        if (stream.uniform() < params.p) {
            ++out.horizontal[s];
        } else {
            ++out.vertical_moves;
            s += x_sampler(stream);
        }
    }
    out.s_n = s;
    for (const auto& [y, c] : out.horizontal) out.z_tilde += xi_sampler(stream) * static_cast<wide_int>(c);
    out.position = {out.z_tilde, out.s_n};
    return out;
}

MCEstimate simulate_return_prob(const OrientedParams& params, std::uint64_t n, std::uint64_t samples,
                                const RngStream& stream, const ExecPolicy& policy) {
    if (n == 0 || samples == 0) throw Error(Errc::invalid_argument, "n and samples must be >= 1");
    auto parts = run_blocks<std::uint64_t>(block_count(samples, kSampleBlock), policy, [&](std::size_t b) {
        RngStream rng = stream.split(b);
        ReturnKernel kernel(params, n);
        std::uint64_t hits = 0;
        const auto len = block_length(b, samples, kSampleBlock);
        for (std::uint64_t i = 0; i < len; ++i) hits += kernel.hit(n, rng);
        return hits;
    });
    std::uint64_t hits = 0;
    for (auto h : parts) hits += h;
    auto done = std::min<std::uint64_t>(samples, parts.size() * kSampleBlock);
    return done == 0 ? exact_zero(0) : wilson_estimate(hits, done);
}

MCEstimate estimate_return_prob(const OrientedParams& params, std::uint64_t n, std::uint64_t samples,
                                const RngStream& stream, const ExecPolicy& policy) {
    if (params.hypothesis_ok && wide_mod(static_cast<wide_int>(n), params.d0) != 0) return exact_zero(samples);
    return simulate_return_prob(params, n, samples, stream, policy);
}

EEstimate estimate_E(const OrientedParams& params, std::uint64_t m, std::uint64_t replicas, const RngStream& stream,
                     const ExecPolicy& policy, std::uint64_t max_attempts_per_bridge) {
    if (m == 0 || replicas == 0) throw Error(Errc::invalid_argument, "m and replicas must be >= 1");
    if (!params.mu_X.attraction || !params.mu_xi.attraction)
        throw Error(Errc::invalid_argument, "estimate_E needs stable attractions for mu_X and mu_xi");
    const auto& walk = *params.mu_X.attraction;
    const auto& scen = *params.mu_xi.attraction;
    if (!(walk.index > 1.0 && scen.index > 1.0))
        throw Error(Errc::invalid_argument, "estimate_E needs alpha > 1 and beta > 1");
    auto Y = vertical_law(params);
    if (!bridge_feasible(Y, m))
        throw Error(Errc::bridge_rejection_exhausted, "S_m = 0 is impossible for m = " + std::to_string(m));
    const std::uint64_t budget = max_attempts_per_bridge ? max_attempts_per_bridge : default_bridge_budget(Y, m);
    const double beta = scen.index;
    const double delta = delta_exponent(walk.index, beta);
    const double m_pow = std::pow(static_cast<double>(m), delta * beta);
    LatticeSampler sampler(Y);

    struct Part {
        std::vector<double> w;
        std::uint64_t attempts = 0;
    };
    auto parts = run_blocks<Part>(block_count(replicas, kReplicaBlock), policy, [&](std::size_t b) {
        RngStream rng = stream.split(b);
        LocalTimeWorkspace ws(sampler, m);
        Part part;
        const auto len = block_length(b, replicas, kReplicaBlock);
        for (std::uint64_t i = 0; i < len; ++i) {
            std::uint64_t tries = 0;
            for (;;) {
                if (++tries > budget)
                    throw Error(Errc::bridge_rejection_exhausted,
                                "no bridge accepted within " + std::to_string(budget) + " attempts");
                if (ws.run(sampler, m, rng) == 0) break;
            }
            part.attempts += tries;
            double v = 0.0;
            ws.for_each([&](wide_int, std::uint64_t c) { v += beta_energy_term(c, beta); });
            part.w.push_back(std::pow(m_pow / v, 1.0 / beta));
        }
        return part;
    });
    std::vector<double> w;
    std::uint64_t attempts = 0;
    for (auto& p : parts) {
        w.insert(w.end(), p.w.begin(), p.w.end());
        attempts += p.attempts;
    }
    if (w.empty()) throw Error(Errc::invalid_argument, "estimate_E cancelled before any bridge");

    EEstimate e;
    e.m = m;
    e.replicas = w.size();
    e.attempts = attempts;
    e.d = static_cast<double>(params.d);
    e.p = params.p;
    e.exponent = 1.0 + 1.0 / (walk.index * beta);
    const double accept = static_cast<double>(w.size()) / static_cast<double>(attempts);
    const double scale = std::pow(static_cast<double>(m), 1.0 / walk.index);
    e.f_alpha0 = scale * accept;
    e.f_alpha0_std_error = scale * accept * std::sqrt((1.0 - accept) / static_cast<double>(w.size()));
    e.f_beta0 = stable_density(0.0, scen);
    auto mean = mean_estimate(w);
    e.inv_local_time = mean.mean;
    e.inv_local_time_std_error = bootstrap_mean_std_error(w, 1000, stream.split(kBootstrapStream));
    e.E = e.d / e.p * e.f_alpha0 * e.f_beta0 * e.inv_local_time;
    e.std_error = e.E * std::hypot(e.f_alpha0_std_error / e.f_alpha0, e.inv_local_time_std_error / e.inv_local_time);
    return e;
}

std::map<Point2, Rational> exact_direct_law(const OrientedParams& params, std::uint64_t n) {
    const Rational p = exact_p(params);
    const Rational q = 1 - p;
    std::vector<std::pair<wide_int, Rational>> xs, xis;
    Rational x0(0);
    for (const auto& a : params.mu_X.atoms) {
        if (a.value == 0) x0 = exact_of(a);
        else xs.emplace_back(a.value, exact_of(a));
    }
    for (const auto& a : params.mu_xi.atoms) xis.emplace_back(a.value, exact_of(a));
    std::map<Point2, Rational> law;
    std::map<wide_int, wide_int> scenery;
    auto rec = [&](auto&& self, std::uint64_t k, wide_int m1, wide_int m2, const Rational& w) -> void {
        if (k == n) {
            law[{m1, m2}] += w;
            return;
        }
        auto it = scenery.find(m2);
        if (it == scenery.end()) {
            for (const auto& [v, pv] : xis) {
                scenery[m2] = v;
                self(self, k, m1, m2, w * pv);
            }
            scenery.erase(m2);
            return;
        }
        const wide_int xi = it->second;
        if (xi != 0) self(self, k + 1, m1 + xi, m2, w * p);
        for (const auto& [x, px] : xs) self(self, k + 1, m1, m2 + x, w * q * px);
        Rational stay = q * x0;
        if (xi == 0) stay += p;
        if (stay != 0) self(self, k + 1, m1, m2, w * stay);
    };
    rec(rec, 0, 0, 0, Rational(1));
    return law;
}

std::map<Point2, Rational> exact_repr_law(const OrientedParams& params, std::uint64_t n) {
    const Rational p = exact_p(params);
    const Rational q = 1 - p;
    std::vector<std::pair<wide_int, Rational>> xs, xis;
    for (const auto& a : params.mu_X.atoms) xs.emplace_back(a.value, exact_of(a));
    for (const auto& a : params.mu_xi.atoms) xis.emplace_back(a.value, exact_of(a));
    std::map<Point2, Rational> law;
    std::map<wide_int, std::uint64_t> horizontal;

    auto scenery_sum = [&](wide_int s_n, const Rational& w) {
        std::vector<std::uint64_t> counts;
        for (const auto& [y, c] : horizontal) counts.push_back(c);
        auto rec = [&](auto&& self, std::size_t i, wide_int z, const Rational& ww) -> void {
            if (i == counts.size()) {
                law[{z, s_n}] += ww;
                return;
            }
            for (const auto& [v, pv] : xis) self(self, i + 1, z + v * static_cast<wide_int>(counts[i]), ww * pv);
        };
        rec(rec, 0, 0, w);
    };
    auto rec = [&](auto&& self, std::uint64_t k, wide_int s, const Rational& w) -> void {
        if (k == n) {
            scenery_sum(s, w);
            return;
        }
        // eps_k = 1: X_k is drawn but unused, so its law sums out.
        ++horizontal[s];
        self(self, k + 1, s, w * p);
        if (--horizontal[s] == 0) horizontal.erase(s);
        for (const auto& [x, px] : xs) self(self, k + 1, s + x, w * q * px);
    };
    rec(rec, 0, 0, Rational(1));
    return law;
}

ChiSquareResult chi_square_two_sample(const std::map<Point2, std::uint64_t>& a,
                                      const std::map<Point2, std::uint64_t>& b) {
    double na = 0, nb = 0;
    for (const auto& [k, v] : a) na += static_cast<double>(v);
    for (const auto& [k, v] : b) nb += static_cast<double>(v);
    if (na == 0 || nb == 0) throw Error(Errc::invalid_argument, "empty histogram");
    std::map<Point2, std::pair<double, double>> cells;
    for (const auto& [k, v] : a) cells[k].first += static_cast<double>(v);
    for (const auto& [k, v] : b) cells[k].second += static_cast<double>(v);
    const double fa = na / (na + nb), fb = nb / (na + nb);
    std::vector<std::pair<double, double>> used;
    std::pair<double, double> pooled{0, 0};
    for (const auto& [k, c] : cells) {
        double tot = c.first + c.second;
        if (std::min(tot * fa, tot * fb) < 5.0) {
            pooled.first += c.first;
            pooled.second += c.second;
        } else {
            used.push_back(c);
        }
    }
    if (pooled.first + pooled.second > 0) used.push_back(pooled);
    ChiSquareResult r;
    r.cells = used.size();
    for (const auto& [ca, cb] : used) {
        double tot = ca + cb;
        double ea = tot * fa, eb = tot * fb;
        r.statistic += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
    }
    if (used.size() < 2) return r;
    r.dof = used.size() - 1;
    boost::math::chi_squared dist(static_cast<double>(r.dof));
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

std::map<Point2, std::uint64_t> position_histogram(const OrientedParams& params, std::uint64_t n,
                                                  std::uint64_t samples, bool direct, const RngStream& stream,
                                                  const ExecPolicy& policy) {
    using Hist = std::map<Point2, std::uint64_t>;
    auto parts = run_blocks<Hist>(block_count(samples, kSampleBlock), policy, [&](std::size_t b) {
        RngStream rng = stream.split(b);
        Hist h;
        const auto len = block_length(b, samples, kSampleBlock);
        for (std::uint64_t i = 0; i < len; ++i)
            ++h[(direct ? simulate_direct(params, n, rng) : simulate_repr(params, n, rng)).position];
        return h;
    });
    Hist out;
    for (const auto& h : parts)
        for (const auto& [k, v] : h) out[k] += v;
    return out;
}

}  // namespace scenery
