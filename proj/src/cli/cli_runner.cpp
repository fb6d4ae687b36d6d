#include "scenery/cli_runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "scenery/error.hpp"
#include "scenery/estimate.hpp"
#include "scenery/exact_oracle.hpp"
#include "scenery/llt_estimator.hpp"
#include "scenery/oriented_walk.hpp"
#include "scenery/parallel.hpp"
#include "scenery/scenery_engine.hpp"
#include "scenery/stable_law.hpp"
#include "scenery/walk_engine.hpp"

namespace scenery::cli {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::uint64_t samples = 0;  // 0: command default
    std::string out;
    std::string format = "csv";

    std::string preset, step, scenery;
    std::optional<double> alpha, beta;

    std::uint64_t n = 0;
    std::string n_grid;
    std::string x;  // comma list
    double a = -1.0, b = 1.0;
    std::string t;

    double index = 2.0, A1 = 0.5, A2 = 0.0, tol = 1e-10;
    double energy_beta = 2.0;

    std::uint64_t m = 0, replicas = 0, horizon = 100000;
    std::string p, mu_x, mu_xi;
    std::string method = "repr";
    bool raw = false;
    std::string from;
};

struct Artifact {
    std::string csv;
    json summary = json::object();
};

using Handler = std::function<Artifact(const Options&)>;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_header(const std::string& command, const std::string& model, const Options& o) {
    return "# schema_version: 1\n# command: " + command + "\n# model: " + model + "\n# seed: " +
           std::to_string(o.seed) + "\n";
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw UsageError("bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw UsageError("bad number '" + s + "'");
    }
}

std::uint64_t parse_u64(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw UsageError("bad count '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::logic_error&) {
        throw UsageError("bad count '" + s + "'");
    }
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split(text, ',')) out.push_back(parse_double(s));
    if (out.empty()) throw UsageError("empty list");
    return out;
}

// "64,256,1024", "even:A..B" (A, 2A, 4A, ... up to B, all even) or "A..B[:step]".
std::vector<std::uint64_t> parse_grid(const std::string& text) {
    std::vector<std::uint64_t> ns;
    auto dots = text.find("..");
    if (text.rfind("even:", 0) == 0) {
        auto body = text.substr(5);
        auto d = body.find("..");
        if (d == std::string::npos) throw UsageError("even grid needs A..B");
        std::uint64_t lo = parse_u64(body.substr(0, d)), hi = parse_u64(body.substr(d + 2));
        if (lo == 0 || lo % 2 != 0) throw UsageError("even grid must start at a positive even n");
        for (std::uint64_t n = lo; n <= hi; n *= 2) ns.push_back(n);
    } else if (dots != std::string::npos) {
        std::uint64_t step = 1;
        auto rest = text.substr(dots + 2);
        if (auto c = rest.find(':'); c != std::string::npos) {
            step = parse_u64(rest.substr(c + 1));
            rest = rest.substr(0, c);
        }
        std::uint64_t lo = parse_u64(text.substr(0, dots)), hi = parse_u64(rest);
        if (step == 0) throw UsageError("grid step must be positive");
        for (std::uint64_t n = lo; n <= hi; n += step) ns.push_back(n);
    } else {
        for (const auto& s : split(text, ',')) ns.push_back(parse_u64(s));
    }
    if (ns.empty()) throw UsageError("empty n grid '" + text + "'");
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] == 0) throw UsageError("n must be positive");
        if (i > 0 && ns[i] <= ns[i - 1]) throw UsageError("n grid must be strictly increasing");
    }
    return ns;
}

std::vector<std::uint64_t> grid_or_n(const Options& o, const char* fallback) {
    if (!o.n_grid.empty()) return parse_grid(o.n_grid);
    if (o.n > 0) return {o.n};
    return parse_grid(fallback);
}

std::uint64_t need_n(const Options& o) {
    if (o.n == 0) throw UsageError("--n is required");
    return o.n;
}

std::uint64_t samples_or(const Options& o, std::uint64_t fallback) { return o.samples ? o.samples : fallback; }

double single_x(const Options& o) {
    if (o.x.empty()) return 0.0;
    auto xs = parse_doubles(o.x);
    if (xs.size() != 1) throw UsageError("--x takes a single value here");
    return xs.front();
}

DistributionSpec law(const std::string& name) {
    try {
        return catalog(name);
    } catch (const Error& e) {
        if (e.code() == Errc::unknown_name) throw UsageError(e.what());
        throw;
    }
}

std::string index_law(double index) {
    if (index == 2.0) return "rademacher";
    if (!(index > 0.0 && index < 2.0)) throw UsageError("index must lie in (0,2]");
    std::ostringstream os;
    os << "zeta-tail(" << index << ")";
    return os.str();
}

// Step law plus scenery law (or, for beta = 1 without a named law, only the
// standard Cauchy attraction).
struct Model {
    std::string label;
    DistributionSpec step;
    std::optional<SceneryModel> scenery;
    StableParams scenery_attraction;
};

Model resolve_model(const Options& o, const std::string& fallback_preset) {
    std::string step_name = "rademacher", scenery_name = "rademacher";
    std::string preset = o.preset;
    bool named = !o.step.empty() || !o.scenery.empty() || o.alpha || o.beta;
    if (preset.empty() && !named) preset = fallback_preset;
    if (!preset.empty()) {
        if (named) throw UsageError("--preset cannot be combined with --step/--scenery/--alpha/--beta");
        if (preset == "ks-classic") {
        } else if (preset == "transient") {
            step_name = "zeta-tail(0.5)";
        } else if (preset == "nonlattice") {
            scenery_name = "gaussian";
        } else {
            throw UsageError("unknown preset '" + preset + "' for this command");
        }
    } else {
        if (o.alpha && !o.step.empty()) throw UsageError("give --alpha or --step, not both");
        if (o.beta && !o.scenery.empty()) throw UsageError("give --beta or --scenery, not both");
        if (o.alpha) step_name = index_law(*o.alpha);
        if (!o.step.empty()) step_name = o.step;
        if (o.beta) scenery_name = *o.beta == 1.0 ? "" : index_law(*o.beta);
        if (!o.scenery.empty()) scenery_name = o.scenery;
    }
    Model m;
    m.step = law(step_name);
    if (scenery_name.empty()) {
        m.scenery_attraction = StableParams{1.0, 1.0, 0.0};
        scenery_name = "cauchy-attraction";
    } else {
        auto dist = law(scenery_name);
        m.scenery = make_scenery_model(std::move(dist));
        if (!m.scenery->dist.attraction)
            throw Error(Errc::invalid_argument, scenery_name + " has no catalogued stable attraction");
        m.scenery_attraction = *m.scenery->dist.attraction;
    }
    m.label = (preset.empty() ? std::string() : preset + ": ") + "step=" + step_name + " scenery=" + scenery_name;
    return m;
}

const SceneryModel& need_scenery(const Model& m) {
    if (!m.scenery) throw UsageError("this command needs a scenery law; pass --scenery");
    return *m.scenery;
}

json model_json(const Model& m) {
    json j;
    j["label"] = m.label;
    j["step"] = m.step.name;
    j["scenery"] = m.scenery ? m.scenery->dist.name : "cauchy-attraction";
    if (m.scenery && m.scenery->dist.is_lattice()) {
        j["span"] = static_cast<long long>(m.scenery->span);
        j["witness"] = static_cast<long long>(m.scenery->witness);
    }
    return j;
}

json exponents_json(const Exponents& ex) {
    return json{{"alpha", ex.walk_attraction.index},
                {"beta", ex.scenery_attraction.index},
                {"delta", ex.delta},
                {"scaling", ex.scaling},
                {"oriented_exponent", ex.oriented_exponent}};
}

json estimate_json(const MCEstimate& e) {
    return json{{"estimate", e.estimate}, {"std_error", e.std_error},   {"hits", e.hits},
                {"samples", e.samples},   {"ci_low", e.ci_low},         {"ci_high", e.ci_high}};
}

std::optional<ExactProb> parse_fraction(const std::string& s, double& value) {
    if (auto slash = s.find('/'); slash != std::string::npos) {
        std::uint64_t num = parse_u64(s.substr(0, slash)), den = parse_u64(s.substr(slash + 1));
        if (den == 0) throw UsageError("zero denominator in '" + s + "'");
        value = static_cast<double>(num) / static_cast<double>(den);
        return ExactProb{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
    }
    value = parse_double(s);
    return std::nullopt;
}

struct Oriented {
    std::string label;
    OrientedParams params;
};

Oriented resolve_oriented(const Options& o) {
    bool custom = !o.p.empty() || !o.mu_x.empty() || !o.mu_xi.empty();
    if (!o.preset.empty() && o.preset != "cp") throw UsageError("oriented commands take --preset cp");
    if (!o.preset.empty() && custom) throw UsageError("--preset cannot be combined with --p/--mu-x/--mu-xi");
    std::string p_text = o.p.empty() ? "1/3" : o.p;
    std::string x_name = o.mu_x.empty() ? "rademacher" : o.mu_x;
    std::string xi_name = o.mu_xi.empty() ? "rademacher" : o.mu_xi;
    double p = 0.0;
    auto exact = parse_fraction(p_text, p);
    Oriented out{(custom ? std::string() : "cp: ") + "p=" + p_text + " mu_X=" + x_name + " mu_xi=" + xi_name,
                 make_oriented_params(p, law(x_name), law(xi_name), exact)};
    return out;
}

json oriented_json(const Oriented& o) {
    const auto& q = o.params;
    return json{{"label", o.label},
                {"p", q.p},
                {"mu_X", q.mu_X.name},
                {"mu_xi", q.mu_xi.name},
                {"d", static_cast<long long>(q.d)},
                {"witness", static_cast<long long>(q.witness)},
                {"d0", static_cast<long long>(q.d0)},
                {"d1", static_cast<long long>(q.d1)},
                {"d0_divides_d1", q.hypothesis_ok}};
}

Exponents oriented_exponents(const OrientedParams& q) {
    if (!q.mu_X.attraction || !q.mu_xi.attraction)
        throw Error(Errc::invalid_argument, "oriented laws need catalogued attractions");
    return make_exponents(*q.mu_X.attraction, *q.mu_xi.attraction);
}

// ---- stable ----

StableParams stable_params(const Options& o) {
    StableParams sp{o.index, o.A1, o.A2};
    sp.validate();
    return sp;
}

Artifact stable_density_cmd(const Options& o) {
    auto sp = stable_params(o);
    std::vector<double> xs;
    if (o.x.empty()) {
        for (int k = -12; k <= 12; ++k) xs.push_back(0.25 * k);
    } else {
        xs = parse_doubles(o.x);
    }
    std::ostringstream label;
    label << "stable(index=" << fmt(sp.index) << ", A1=" << fmt(sp.A1) << ", A2=" << fmt(sp.A2) << ")";
    Artifact a;
    a.csv = csv_header("stable density", label.str(), o) + "x,density\n";
    for (double x : xs) a.csv += fmt(x) + "," + fmt(stable_density(x, sp, o.tol)) + "\n";
    a.summary["model"] = label.str();
    a.summary["tol"] = o.tol;
    a.summary["cutoff"] = stable_inversion_cutoff(sp, o.tol);
    a.summary["points"] = xs.size();
    return a;
}

Artifact stable_sample_cmd(const Options& o) {
    auto sp = stable_params(o);
    const std::uint64_t total = samples_or(o, 10000);
    constexpr std::uint64_t kBlock = 8192;
    RngStream root(o.seed, 0);
    auto parts = run_blocks<std::vector<double>>(block_count(total, kBlock), {o.workers}, [&](std::size_t b) {
        RngStream rng = root.split(b);
        std::vector<double> v(block_length(b, total, kBlock));
        for (auto& s : v) s = stable_sample(sp, rng);
        return v;
    });
    std::vector<double> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    std::ostringstream label;
    label << "stable(index=" << fmt(sp.index) << ", A1=" << fmt(sp.A1) << ", A2=0)";
    Artifact a;
    a.csv = csv_header("stable sample", label.str(), o) + "i,value\n";
    for (std::size_t i = 0; i < all.size(); ++i) a.csv += std::to_string(i) + "," + fmt(all[i]) + "\n";
    auto sorted = all;
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
        return sorted.empty() ? 0.0 : sorted[static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1))];
    };
    a.summary["model"] = label.str();
    a.summary["samples"] = all.size();
    a.summary["quartiles"] = {quantile(0.25), quantile(0.5), quantile(0.75)};
    return a;
}

// ---- exact ----

struct ExactInputs {
    Model model;
    std::uint64_t n;
};

ExactInputs exact_inputs(const Options& o) { return {resolve_model(o, "ks-classic"), need_n(o)}; }

json pmf_json(const IntegerPmf& pmf) {
    json j;
    j["mode"] = to_string(pmf.mode);
    j["atoms"] = pmf.probability.size();
    j["total"] = pmf.total();
    if (pmf.mode == PmfMode::rational) j["exact_total"] = pmf.exact_total().str();
    return j;
}

Artifact exact_pmf_cmd(const Options& o) {
    auto in = exact_inputs(o);
    auto pmf = exact_pmf(in.model.step, need_scenery(in.model), in.n);
    pmf.model = in.model.label;
    Artifact a;
    a.csv = to_csv(pmf);
    a.summary["model"] = model_json(in.model);
    a.summary["n"] = in.n;
    a.summary["pmf"] = pmf_json(pmf);
    return a;
}

Artifact exact_cf_cmd(const Options& o) {
    auto in = exact_inputs(o);
    const auto& scen = need_scenery(in.model);
    std::vector<double> ts;
    if (o.t.empty()) {
        for (int k = 0; k <= 8; ++k) ts.push_back(std::numbers::pi * k / 8.0);
    } else {
        ts = parse_doubles(o.t);
    }
    auto groups = group_profiles(in.model.step, in.n);
    Artifact a;
    a.csv = csv_header("exact cf", in.model.label, o) + "# n: " + std::to_string(in.n) + "\nt,re,im\n";
    for (double t : ts) {
        auto z = exact_cf(groups, scen, t);
        a.csv += fmt(t) + "," + fmt(z.real()) + "," + fmt(z.imag()) + "\n";
    }
    a.summary["model"] = model_json(in.model);
    a.summary["n"] = in.n;
    a.summary["points"] = ts.size();
    return a;
}

Artifact exact_inversion_cmd(const Options& o) {
    auto in = exact_inputs(o);
    const auto& scen = need_scenery(in.model);
    auto groups = group_profiles(in.model.step, in.n);
    auto pmf = exact_pmf(groups, scen);
    std::vector<wide_int> xs;
    if (!o.x.empty()) {
        for (const auto& s : split(o.x, ',')) {
            try {
                xs.push_back(parse_wide_int(s));
            } catch (const std::exception&) {
                throw UsageError("bad integer target '" + s + "'");
            }
        }
    } else {
        if (pmf.probability.empty()) throw Error(Errc::invalid_argument, "empty law");
        for (wide_int x = pmf.probability.begin()->first; x <= pmf.probability.rbegin()->first; ++x) xs.push_back(x);
    }
    Artifact a;
    a.csv = csv_header("exact inversion", in.model.label, o) + "# n: " + std::to_string(in.n) +
            "\nx,support_condition,integral,root_factor,identity,pmf,difference,quadrature_change\n";
    double worst = 0.0;
    for (auto x : xs) {
        auto r = inversion_check(groups, scen, pmf, x);
        worst = std::max(worst, r.difference);
        a.csv += to_string(x) + "," + (r.support_condition ? "1" : "0") + "," + fmt(r.integral) + "," +
                 fmt(r.root_factor) + "," + fmt(r.identity) + "," + fmt(r.pmf) + "," + fmt(r.difference) + "," +
                 fmt(r.quadrature_change) + "\n";
    }
    a.summary["model"] = model_json(in.model);
    a.summary["n"] = in.n;
    a.summary["targets"] = xs.size();
    a.summary["max_difference"] = worst;
    return a;
}

Artifact exact_range_cmd(const Options& o) {
    auto step = law(o.step.empty() ? "rademacher" : o.step);
    auto n = need_n(o);
    auto pmf = exact_range_pmf(step, n);
    pmf.model = "step=" + step.name;
    double mean = 0.0;
    for (const auto& [v, p] : pmf.probability) mean += static_cast<double>(v) * p;
    Artifact a;
    a.csv = to_csv(pmf);
    a.summary["model"] = pmf.model;
    a.summary["n"] = n;
    a.summary["pmf"] = pmf_json(pmf);
    a.summary["mean_range"] = mean;
    return a;
}

// ---- simulate ----

Artifact simulate_walk_cmd(const Options& o) {
    auto step = law(o.step.empty() ? "rademacher" : o.step);
    auto n = need_n(o);
    const std::uint64_t total = samples_or(o, 1000);
    if (!(o.energy_beta > 0.0 && o.energy_beta <= 2.0)) throw UsageError("--energy-beta must lie in (0,2]");
    LatticeSampler sampler(step);
    RngStream root(o.seed, 0);
    constexpr std::uint64_t kBlock = 64;
    auto parts = run_blocks<std::string>(block_count(total, kBlock), {o.workers}, [&](std::size_t b) {
        RngStream rng = root.split(b);
        LocalTimeWorkspace ws(sampler, n);
        std::string rows;
        const std::uint64_t len = block_length(b, total, kBlock);
        for (std::uint64_t i = 0; i < len; ++i) {
            wide_int end = ws.run(sampler, n, rng);
            std::uint64_t range = 0, max_local = 0;
            double energy = 0.0;
            ws.for_each([&](wide_int, std::uint64_t c) {
                ++range;
                max_local = std::max(max_local, c);
                energy += beta_energy_term(c, o.energy_beta);
            });
            rows += std::to_string(b * kBlock + i) + "," + to_string(end) + "," + std::to_string(range) + "," +
                    std::to_string(max_local) + "," + fmt(energy) + "\n";
        }
        return rows;
    });
    Artifact a;
    a.csv = csv_header("simulate walk", "step=" + step.name, o) + "# n: " + std::to_string(n) +
            "\nreplica,endpoint,range,max_local,beta_energy\n";
    std::vector<double> ranges;
    for (auto& p : parts) {
        a.csv += p;
        std::istringstream is(p);
        std::string line;
        while (std::getline(is, line)) ranges.push_back(parse_double(split(line, ',')[2]));
    }
    auto m = mean_estimate(ranges);
    a.summary["model"] = "step=" + step.name;
    a.summary["n"] = n;
    a.summary["replicas"] = ranges.size();
    a.summary["energy_beta"] = o.energy_beta;
    a.summary["mean_range"] = {{"mean", m.mean}, {"std_error", m.std_error}};
    return a;
}

Artifact simulate_rwrs_cmd(const Options& o) {
    auto model = resolve_model(o, "ks-classic");
    const auto& scen = need_scenery(model);
    auto n = need_n(o);
    const std::uint64_t total = samples_or(o, 1000);
    RngStream root(o.seed, 0);
    constexpr std::uint64_t kBlock = 8192;
    struct Part {
        std::string rows;
        std::vector<double> z;
    };
    auto parts = run_blocks<Part>(block_count(total, kBlock), {o.workers}, [&](std::size_t b) {
        RngStream rng = root.split(b);
        RwrsKernel kernel(model.step, scen, n);
        Part part;
        const std::uint64_t len = block_length(b, total, kBlock);
        for (std::uint64_t i = 0; i < len; ++i) {
            std::string id = std::to_string(b * kBlock + i);
            if (kernel.lattice()) {
                wide_int z = kernel.sample_lattice(n, rng);
                part.rows += id + "," + to_string(z) + "\n";
                part.z.push_back(static_cast<double>(z));
            } else {
                double z = kernel.sample_real(n, rng);
                part.rows += id + "," + fmt(z) + "\n";
                part.z.push_back(z);
            }
        }
        return part;
    });
    Artifact a;
    a.csv = csv_header("simulate rwrs", model.label, o) + "# n: " + std::to_string(n) + "\nreplica,z\n";
    std::vector<double> all, sq;
    for (auto& p : parts) {
        a.csv += p.rows;
        all.insert(all.end(), p.z.begin(), p.z.end());
    }
    for (double z : all) sq.push_back(z * z);
    auto mean = mean_estimate(all), second = mean_estimate(sq);
    a.summary["model"] = model_json(model);
    a.summary["n"] = n;
    a.summary["samples"] = all.size();
    a.summary["mean"] = mean.mean;
    a.summary["second_moment"] = second.mean;
    try {
        a.summary["exponents"] = exponents_json(make_exponents(model.step, scen));
    } catch (const Error&) {
    }
    return a;
}

Artifact simulate_oriented_cmd(const Options& o) {
    auto ori = resolve_oriented(o);
    auto n = need_n(o);
    if (o.method != "direct" && o.method != "repr") throw UsageError("--method is direct or repr");
    const std::uint64_t total = samples_or(o, 10000);
    auto hist = position_histogram(ori.params, n, total, o.method == "direct", RngStream(o.seed, 0), {o.workers});
    Artifact a;
    a.csv = csv_header("simulate oriented", ori.label, o) + "# n: " + std::to_string(n) + "\n# method: " + o.method +
            "\nx,y,count\n";
    std::uint64_t origin = 0, done = 0;
    for (const auto& [pt, c] : hist) {
        a.csv += to_string(pt.first) + "," + to_string(pt.second) + "," + std::to_string(c) + "\n";
        done += c;
        if (pt == Point2{0, 0}) origin = c;
    }
    a.summary["model"] = oriented_json(ori);
    a.summary["n"] = n;
    a.summary["method"] = o.method;
    a.summary["samples"] = done;
    if (done) a.summary["origin"] = estimate_json(wilson_estimate(origin, done));
    return a;
}

// ---- llt ----

std::string series_rows(const ScalingSeries& s, double exponent, const std::vector<std::string>& lead) {
    std::string rows;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const auto& [n, e] = s.points[i];
        double scaled = std::pow(static_cast<double>(n), exponent) * e.estimate;
        rows += std::to_string(n) + "," + lead[i] + fmt(e.estimate) + "," + fmt(e.std_error) + "," +
                std::to_string(e.hits) + "," + std::to_string(e.samples) + "," + fmt(e.ci_low) + "," +
                fmt(e.ci_high) + "," + fmt(scaled) + "\n";
    }
    return rows;
}

void add_fit(json& summary, const ScalingSeries& series) {
    try {
        auto fit = slope_fit(series);
        summary["slope"] = fit.slope;
        summary["slope_std_error"] = fit.std_error;
        summary["intercept"] = fit.intercept;
        summary["fit_points"] = fit.used_points;
    } catch (const Error& e) {
        if (e.code() != Errc::insufficient_points) throw;
        summary["slope"] = nullptr;
        summary["slope_note"] = e.what();
    }
}

Artifact llt_point_cmd(const Options& o, const std::string& command) {
    auto model = resolve_model(o, "ks-classic");
    const auto& scen = need_scenery(model);
    if (!scen.dist.is_lattice()) throw Error(Errc::not_lattice, "point probabilities need a lattice scenery");
    auto ex = make_exponents(model.step, scen);
    double x = single_x(o);
    auto ns = grid_or_n(o, "64,256,1024,4096");
    auto series = point_prob_series(model.step, scen, ns, x, samples_or(o, 100000), RngStream(o.seed, 0), {o.workers});
    std::vector<std::string> lead;
    for (const auto& pt : series.points) {
        auto target = static_cast<wide_int>(std::floor(std::pow(static_cast<double>(pt.n), ex.scaling) * x));
        lead.push_back(to_string(target) + "," + (support_condition(pt.n, target, scen) ? "1" : "0") + ",");
    }
    Artifact a;
    a.csv = csv_header(command, model.label, o) + "# x: " + fmt(x) +
            "\nn,target,support_condition,estimate,std_error,hits,samples,ci_low,ci_high,scaled\n" +
            series_rows(series, ex.scaling, lead);
    a.summary["model"] = model_json(model);
    a.summary["exponents"] = exponents_json(ex);
    a.summary["delta"] = ex.delta;
    a.summary["x"] = x;
    a.summary["points"] = series.points.size();
    add_fit(a.summary, series);
    return a;
}

Artifact llt_interval_cmd(const Options& o) {
    auto model = resolve_model(o, "nonlattice");
    const auto& scen = need_scenery(model);
    auto ex = make_exponents(model.step, scen);
    double x = single_x(o);
    if (!(o.a <= o.b)) throw UsageError("need a <= b");
    auto ns = grid_or_n(o, "256,1024,4096");
    const auto samples = samples_or(o, 100000);
    RngStream root(o.seed, 0);
    ScalingSeries series;
    std::vector<std::string> lead;
    for (auto n : ns) {
        if (cancellation_requested()) break;
        series.points.push_back(
            {n, estimate_interval_prob(model.step, scen, n, x, o.a, o.b, samples, root.split(n), {o.workers})});
        double centre = std::pow(static_cast<double>(n), ex.scaling) * x;
        lead.push_back(fmt(centre + o.a) + "," + fmt(centre + o.b) + ",");
    }
    Artifact a;
    a.csv = csv_header("llt interval", model.label, o) + "# x: " + fmt(x) + "\n# a: " + fmt(o.a) + "\n# b: " +
            fmt(o.b) + "\nn,lo,hi,estimate,std_error,hits,samples,ci_low,ci_high,scaled\n" +
            series_rows(series, ex.scaling, lead);
    a.summary["model"] = model_json(model);
    a.summary["exponents"] = exponents_json(ex);
    a.summary["delta"] = ex.delta;
    a.summary["x"] = x;
    a.summary["interval"] = {o.a, o.b};
    add_fit(a.summary, series);
    return a;
}

// Reads n, estimate, std_error, hits, samples columns from a series CSV.
ScalingSeries read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::string line;
    std::vector<std::string> cols;
    ScalingSeries s;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line, ',');
        if (cols.empty()) {
            cols = cells;
            continue;
        }
        auto get = [&](const char* name) -> const std::string& {
            auto it = std::find(cols.begin(), cols.end(), name);
            if (it == cols.end() || static_cast<std::size_t>(it - cols.begin()) >= cells.size())
                throw UsageError(path + " lacks column " + name);
            return cells[static_cast<std::size_t>(it - cols.begin())];
        };
        ScalingPoint pt;
        pt.n = parse_u64(get("n"));
        pt.estimate.estimate = parse_double(get("estimate"));
        pt.estimate.std_error = parse_double(get("std_error"));
        pt.estimate.hits = parse_u64(get("hits"));
        pt.estimate.samples = parse_u64(get("samples"));
        s.points.push_back(pt);
    }
    return s;
}

Artifact llt_slope_cmd(const Options& o) {
    if (o.from.empty()) {
        auto a = llt_point_cmd(o, "llt slope");
        if (a.summary["slope"].is_null() && !cancellation_requested())
            throw Error(Errc::insufficient_points, a.summary["slope_note"].get<std::string>());
        return a;
    }
    auto series = read_series(o.from);
    auto fit = slope_fit(series);
    Artifact a;
    a.csv = csv_header("llt slope", "from " + std::filesystem::path(o.from).filename().string(), o) +
            "n,estimate,std_error,hits,log_n,log_estimate,used\n";
    for (const auto& [n, e] : series.points) {
        bool used = e.hits >= kMinHitsForFit;
        a.csv += std::to_string(n) + "," + fmt(e.estimate) + "," + fmt(e.std_error) + "," + std::to_string(e.hits) +
                 "," + fmt(std::log(static_cast<double>(n))) + "," + (e.estimate > 0 ? fmt(std::log(e.estimate)) : "") +
                 "," + (used ? "1" : "0") + "\n";
    }
    a.summary["source"] = o.from;
    a.summary["slope"] = fit.slope;
    a.summary["slope_std_error"] = fit.std_error;
    a.summary["intercept"] = fit.intercept;
    a.summary["fit_points"] = fit.used_points;
    return a;
}

// ---- constants ----

Artifact constants_C_cmd(const Options& o) {
    auto model = resolve_model(o, "ks-classic");
    double x = single_x(o);
    const std::uint64_t m = o.m ? o.m : (std::uint64_t{1} << 14);
    const std::uint64_t replicas = o.replicas ? o.replicas : samples_or(o, 2000);
    auto c = estimate_C(x, model.step, model.scenery_attraction, m, replicas, RngStream(o.seed, 0), {o.workers});
    double d = model.scenery && model.scenery->dist.is_lattice() ? static_cast<double>(model.scenery->span) : 1.0;
    Artifact a;
    a.csv = csv_header("constants C", model.label, o) + "x,C,std_error,m,replicas,d,d_times_C\n" + fmt(x) + "," +
            fmt(c.c_of_x->value) + "," + fmt(c.c_of_x->std_error) + "," + std::to_string(c.m_used) + "," +
            std::to_string(c.replicas) + "," + fmt(d) + "," + fmt(d * c.c_of_x->value) + "\n";
    a.summary["model"] = model_json(model);
    a.summary["x"] = x;
    a.summary["C"] = {{"value", c.c_of_x->value}, {"std_error", c.c_of_x->std_error}};
    a.summary["d_times_C"] = d * c.c_of_x->value;
    a.summary["m"] = c.m_used;
    a.summary["replicas"] = c.replicas;
    a.summary["scenery_attraction"] = {{"index", model.scenery_attraction.index}, {"A1", model.scenery_attraction.A1}};
    if (model.scenery_attraction.index == 1.0) a.summary["f_beta_x"] = stable_density(x, model.scenery_attraction);
    return a;
}

Artifact constants_D_cmd(const Options& o) {
    auto model = resolve_model(o, "transient");
    double x = single_x(o);
    const std::uint64_t p0_samples = samples_or(o, 20000);
    RngStream root(o.seed, 0);
    auto p0 = estimate_p0(model.step, o.horizon, p0_samples, root.split(0), {o.workers});
    auto dres = estimate_D(x, model.step, model.scenery_attraction, p0.estimate);
    auto nt = ntilde_moment(p0.estimate.estimate, model.scenery_attraction.index);
    double d = model.scenery && model.scenery->dist.is_lattice() ? static_cast<double>(model.scenery->span) : 1.0;
    Artifact a;
    a.csv = csv_header("constants D", model.label, o) +
            "x,D,std_error,r,p0,p0_std_error,horizon,d_at_p0_low,d_at_p0_high,d,d_times_D\n" + fmt(x) + "," +
            fmt(dres.d_of_x->value) + "," + fmt(dres.d_of_x->std_error) + "," + fmt(dres.r) + "," +
            fmt(p0.estimate.estimate) + "," + fmt(p0.estimate.std_error) + "," + std::to_string(o.horizon) + "," +
            fmt(dres.d_at_p0_low) + "," + fmt(dres.d_at_p0_high) + "," + fmt(d) + "," +
            fmt(d * dres.d_of_x->value) + "\n";
    a.summary["model"] = model_json(model);
    a.summary["x"] = x;
    a.summary["D"] = {{"value", dres.d_of_x->value}, {"std_error", dres.d_of_x->std_error}};
    a.summary["d_times_D"] = d * dres.d_of_x->value;
    a.summary["p0"] = estimate_json(p0.estimate);
    a.summary["p0_horizon"] = o.horizon;
    a.summary["ntilde_moment"] = {{"moment", nt.moment}, {"r", nt.r}, {"terms", nt.terms}};
    a.summary["note"] = "p0 is the return frequency within the horizon, a lower bound of the return probability";
    return a;
}

Artifact constants_E_cmd(const Options& o) {
    auto ori = resolve_oriented(o);
    const std::uint64_t m = o.m ? o.m : 2048;
    const std::uint64_t replicas = o.replicas ? o.replicas : samples_or(o, 4000);
    auto e = estimate_E(ori.params, m, replicas, RngStream(o.seed, 0), {o.workers});
    Artifact a;
    a.csv = csv_header("constants E", ori.label, o) +
            "E,std_error,d,p,f_alpha0,f_alpha0_std_error,f_beta0,inv_local_time,inv_local_time_std_error,m,replicas,"
            "attempts,exponent\n" +
            fmt(e.E) + "," + fmt(e.std_error) + "," + fmt(e.d) + "," + fmt(e.p) + "," + fmt(e.f_alpha0) + "," +
            fmt(e.f_alpha0_std_error) + "," + fmt(e.f_beta0) + "," + fmt(e.inv_local_time) + "," +
            fmt(e.inv_local_time_std_error) + "," + std::to_string(e.m) + "," + std::to_string(e.replicas) + "," +
            std::to_string(e.attempts) + "," + fmt(e.exponent) + "\n";
    a.summary["model"] = oriented_json(ori);
    a.summary["E"] = {{"value", e.E}, {"std_error", e.std_error}};
    a.summary["exponent"] = e.exponent;
    a.summary["m"] = e.m;
    a.summary["replicas"] = e.replicas;
    a.summary["bridge_attempts"] = e.attempts;
    a.summary["f_alpha0_reading"] =
        "operational: m^(1/alpha) P(S_m = 0) for the vertical walk with lazy steps Y = X (1 - eps), so the "
        "(1-p) time change is inside f_alpha(0); d/p and the bridge functional are applied on top";
    return a;
}

// ---- oriented ----

Artifact oriented_series_cmd(const Options& o, bool fit) {
    auto ori = resolve_oriented(o);
    auto ex = oriented_exponents(ori.params);
    auto ns = grid_or_n(o, "even:64..2048");
    const auto samples = samples_or(o, 100000);
    RngStream root(o.seed, 0);
    ScalingSeries series;
    std::vector<std::string> lead;
    for (auto n : ns) {
        if (cancellation_requested()) break;
        auto est = o.raw ? simulate_return_prob(ori.params, n, samples, root.split(n), {o.workers})
                         : estimate_return_prob(ori.params, n, samples, root.split(n), {o.workers});
        series.points.push_back({n, est});
        lead.push_back("");
    }
    std::string command = fit ? "oriented slope" : "oriented return";
    Artifact a;
    a.csv = csv_header(command, ori.label, o) + "# short_circuit: " + (o.raw ? "off" : "on") +
            "\nn,estimate,std_error,hits,samples,ci_low,ci_high,scaled\n" +
            series_rows(series, ex.oriented_exponent, lead);
    a.summary["model"] = oriented_json(ori);
    a.summary["exponents"] = exponents_json(ex);
    a.summary["expected_slope"] = -ex.oriented_exponent;
    a.summary["short_circuit"] = !o.raw;
    std::uint64_t off_lattice_hits = 0;
    for (const auto& pt : series.points)
        if (wide_mod(static_cast<wide_int>(pt.n), ori.params.d0) != 0) off_lattice_hits += pt.estimate.hits;
    a.summary["hits_off_d0_lattice"] = off_lattice_hits;
    if (fit) {
        // An interrupted run keeps its prefix even when it is too short to fit.
        if (cancellation_requested()) {
            add_fit(a.summary, series);
        } else {
            auto f = slope_fit(series);
            a.summary["slope"] = f.slope;
            a.summary["slope_std_error"] = f.std_error;
            a.summary["intercept"] = f.intercept;
            a.summary["fit_points"] = f.used_points;
        }
    }
    return a;
}

Artifact oriented_d0d1_cmd(const Options& o) {
    auto ori = resolve_oriented(o);
    const auto& q = ori.params;
    Artifact a;
    a.csv = csv_header("oriented d0d1", ori.label, o) + "d,witness,d0,d1,d0_divides_d1,d1_searched\n" +
            to_string(q.d) + "," + to_string(q.witness) + "," + to_string(q.d0) + "," + to_string(q.d1) + "," +
            (q.hypothesis_ok ? "1" : "0") + "," + std::to_string(q.d1_searched) + "\n";
    a.summary["model"] = oriented_json(ori);
    a.summary["d1_searched"] = q.d1_searched;
    return a;
}

// ---- plumbing ----

struct Command {
    const char* group;
    const char* name;
    const char* exercises;
    Handler handler;
};

const std::vector<Command>& commands() {
    static const std::vector<Command> table = {
        {"stable", "density", "strictly stable density by Fourier inversion of exp(-|u|^a (A1 + i A2 sgn u))",
         stable_density_cmd},
        {"stable", "sample", "symmetric stable variates by the Chambers-Mallows-Stuck transform", stable_sample_cmd},
        {"exact", "pmf", "exact law of Z_n = sum_y xi_y N_n(y) by local-time profile enumeration", exact_pmf_cmd},
        {"exact", "cf", "characteristic function E prod_y phi_xi(t N_n(y)) of Z_n", exact_cf_cmd},
        {"exact", "inversion",
         "lattice inversion P(Z_n = x) = (1/2pi) sum_{k<d} exp(-2 pi i k x/d) phi_xi(2pi/d)^(kn) "
         "int_{-pi/d}^{pi/d} exp(-itx) phi_n(t) dt",
         exact_inversion_cmd},
        {"exact", "range", "exact law of the range R_n and submultiplicativity of its tail", exact_range_cmd},
        {"simulate", "walk", "local times, range and beta-energy of a lattice walk", simulate_walk_cmd},
        {"simulate", "rwrs", "random walk in random scenery Z_n sampled through local times", simulate_rwrs_cmd},
        {"simulate", "oriented", "oriented lattice walk M_n, direct chain or (Z~, S) representation",
         simulate_oriented_cmd},
        {"llt", "point",
         "lattice local limit: n^delta P(Z_n = floor(n^delta x)) tends to d C(x) (recurrent walk) or d D(x) "
         "(transient walk) when the target meets the support condition, and is exactly 0 otherwise",
         [](const Options& o) { return llt_point_cmd(o, "llt point"); }},
        {"llt", "interval",
         "nonlattice local limit: n^delta P(Z_n in n^delta x + [a,b]) tends to C(x) (b - a)", llt_interval_cmd},
        {"llt", "slope", "log-log decay rate -delta of the point probabilities", llt_slope_cmd},
        {"constants", "C",
         "C(x) = E[|L|_beta^-1 f_beta(x |L|_beta^-1)] via W_m = m^delta V_m^(-1/beta); C = f_beta when beta = 1",
         constants_C_cmd},
        {"constants", "D", "D(x) = r f_beta(r x), r = E[(1 + G1 + G2)^(beta-1)]^(-1/beta) for a transient walk",
         constants_D_cmd},
        {"constants", "E", "P(M_n = (0,0)) ~ E n^-(1 + 1/(alpha beta)) along multiples of d0 when d0 | d1",
         constants_E_cmd},
        {"oriented", "slope", "oriented walk return decay n^-(1 + 1/(alpha beta)), n^-5/4 for cp",
         [](const Options& o) { return oriented_series_cmd(o, true); }},
        {"oriented", "return", "P(M_n = (0,0)), exactly 0 when d0 does not divide n",
         [](const Options& o) { return oriented_series_cmd(o, false); }},
        {"oriented", "d0d1", "lattice periods d0, d1 of the oriented walk and the hypothesis d0 | d1",
         oriented_d0d1_cmd},
    };
    return table;
}

void add_options(CLI::App* app, Options& o) {
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--samples", o.samples, "Monte Carlo samples (replicas for constants)");
    app->add_option("--out", o.out, "output stem: writes STEM.csv and STEM.json");
    app->add_option("--format", o.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--config", "JSON config file (handled before parsing)");

    app->add_option("--preset", o.preset, "cp, ks-classic, transient, nonlattice");
    app->add_option("--step", o.step, "step law name");
    app->add_option("--scenery", o.scenery, "scenery law name");
    app->add_option("--alpha", o.alpha, "step index (picks rademacher or zeta-tail)");
    app->add_option("--beta", o.beta, "scenery index (picks rademacher or zeta-tail; 1 = Cauchy attraction)");
    app->add_option("--n", o.n, "horizon");
    app->add_option("--n-grid", o.n_grid, "list, even:A..B (doubling) or A..B[:step]");
    app->add_option("--x", o.x, "evaluation point(s), comma separated");
    app->add_option("--a", o.a, "interval left end");
    app->add_option("--b", o.b, "interval right end");
    app->add_option("--t", o.t, "cf arguments, comma separated");
    app->add_option("--index", o.index, "stable index");
    app->add_option("--A1", o.A1, "stable scale term");
    app->add_option("--A2", o.A2, "stable skew term");
    app->add_option("--tol", o.tol, "density tolerance");
    app->add_option("--energy-beta", o.energy_beta, "exponent of the beta-energy");
    app->add_option("--m", o.m, "horizon of the constant estimators");
    app->add_option("--replicas", o.replicas, "replicas of the constant estimators");
    app->add_option("--horizon", o.horizon, "return-probability horizon for p0");
    app->add_option("--p", o.p, "horizontal move probability, decimal or a/b");
    app->add_option("--mu-x", o.mu_x, "vertical jump law");
    app->add_option("--mu-xi", o.mu_xi, "line speed law");
    app->add_option("--method", o.method, "direct or repr");
    app->add_flag("--raw", o.raw, "no lattice short-circuit");
    app->add_option("--from", o.from, "series CSV to fit");
}

// Turns a JSON object into arguments: "command" names the subcommand, every
// other key becomes --key value (arrays comma-joined, true becomes a flag).
// Keys already present on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config " + path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config must be a JSON object");
    auto present = [&](const std::string& key) {
        return std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
            return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
        });
    };
    auto scalar = [](const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
        if (v.is_number_float()) return fmt(v.get<double>());
        throw UsageError("unsupported config value " + v.dump());
    };
    std::vector<std::string> out;
    bool has_command = !rest.empty() && rest.front().rfind("--", 0) != 0;
    if (cfg.contains("command") && !has_command) {
        const auto& c = cfg["command"];
        if (c.is_string()) {
            for (const auto& w : split(c.get<std::string>(), ' '))
                if (!w.empty()) out.push_back(w);
        } else if (c.is_array()) {
            for (const auto& w : c) out.push_back(scalar(w));
        } else {
            throw UsageError("config command must be a string or array");
        }
    }
    out.insert(out.end(), rest.begin(), rest.end());
    for (const auto& [key, value] : cfg.items()) {
        if (key == "command" || present(key)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) out.push_back("--" + key);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
            out.push_back("--" + key);
            out.push_back(joined);
        } else {
            out.push_back("--" + key);
            out.push_back(scalar(value));
        }
    }
    return out;
}

bool wants_json(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--format=json") return true;
        if (args[i] == "--format" && i + 1 < args.size() && args[i + 1] == "json") return true;
    }
    return false;
}

void report(std::ostream& err, bool as_json, const char* kind, const std::string& code, const std::string& message) {
    if (as_json) {
        json j{{"schema_version", 1}, {"error", {{"kind", kind}, {"code", code}, {"message", message}}}};
        err << j.dump() << "\n";
    } else {
        err << "scenery-lab: " << kind << " (" << code << "): " << message << "\n";
    }
}

void write_atomic(const std::filesystem::path& target, const std::string& bytes) {
    auto tmp = target;
    tmp += ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        f.flush();
        if (!f) throw std::runtime_error("short write on " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

extern "C" void on_interrupt(int) { cancellation_flag().store(true, std::memory_order_relaxed); }

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

void install_interrupt_handler() {
    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    bool as_json = wants_json(raw_args);
    std::vector<std::string> args;
    try {
        args = expand_config(raw_args);
        as_json = wants_json(args);
    } catch (const UsageError& e) {
        report(err, as_json, "usage-error", "usage", e.what());
        return kExitUsage;
    }

    Options opts;
    CLI::App app{"Random walks in random scenery: exact laws, simulation, local limit constants", "scenery-lab"};
    app.require_subcommand(1);
    const Command* chosen = nullptr;
    std::map<std::string, CLI::App*> groups;
    for (const auto& c : commands()) {
        auto*& group = groups[c.group];
        if (!group) {
            group = app.add_subcommand(c.group, std::string(c.group) + " commands");
            group->require_subcommand(1);
        }
        auto* leaf = group->add_subcommand(c.name, c.exercises);
        add_options(leaf, opts);
        leaf->callback([&chosen, &c] { chosen = &c; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report(err, as_json, "usage-error", "usage", e.what());
        return kExitUsage;
    }
    if (!chosen) {
        report(err, as_json, "usage-error", "usage", "no command given");
        return kExitUsage;
    }

    const std::string command = std::string(chosen->group) + " " + chosen->name;
    Artifact art;
    try {
        art = chosen->handler(opts);
    } catch (const UsageError& e) {
        report(err, as_json, "usage-error", "usage", e.what());
        return kExitUsage;
    } catch (const Error& e) {
        report(err, as_json, "runtime-error", to_string(e.code()), e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        report(err, as_json, "runtime-error", "internal", e.what());
        return kExitRuntime;
    }

    const bool partial = cancellation_requested();
    json summary;
    summary["schema_version"] = 1;
    summary["command"] = command;
    summary["exercises"] = chosen->exercises;
    summary["partial"] = partial;
    summary["seed"] = opts.seed;
    summary["workers"] = opts.workers;
    if (opts.samples) summary["samples_requested"] = opts.samples;
    for (auto& [k, v] : art.summary.items()) summary[k] = v;
    summary["csv_sha256"] = sha256_hex(art.csv);

    try {
        if (!opts.out.empty()) {
            std::filesystem::path stem(opts.out);
            if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
            auto csv_path = stem, json_path = stem;
            csv_path += ".csv";
            json_path += ".json";
            summary["csv_file"] = csv_path.filename().string();
            write_atomic(csv_path, art.csv);
            write_atomic(json_path, summary.dump(2) + "\n");
            if (opts.format == "json") out << summary.dump(2) << "\n";
        } else if (opts.format == "json") {
            out << summary.dump(2) << "\n";
        } else {
            out << art.csv;
        }
    } catch (const std::exception& e) {
        report(err, as_json, "runtime-error", "io", e.what());
        return kExitRuntime;
    }
    return partial ? kExitInterrupted : kExitOk;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace scenery::cli
