#include "aic/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "aic/encode.hpp"

namespace aic {

using nlohmann::json;

std::vector<int> sweep_values(const SweepSpec& s) {
    if (s.count < 1 || s.m_min < 1 || s.m_max < s.m_min) throw ConfigError("sweep: bad endpoints or count");
    std::vector<int> out;
    if (s.count == 1) {
        out.push_back(s.m_min);
        return out;
    }
    const double la = std::log10(static_cast<double>(s.m_min));
    const double lb = std::log10(static_cast<double>(s.m_max));
    for (int i = 0; i < s.count; ++i) {
        const double t = la + (lb - la) * i / (s.count - 1);
        const int v = static_cast<int>(std::llround(std::pow(10.0, t)));
        if (out.empty() || v != out.back()) out.push_back(v);
    }
    return out;
}

namespace {

RngSpec rng_from_json(const json& j) {
    RngSpec r;
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("generator_id")) r.generator_id = j.at("generator_id").get<std::string>();
    return r;
}

json rng_to_json(const RngSpec& r) { return json{{"seed", r.seed}, {"generator_id", r.generator_id}}; }

template <typename E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> table,
             const char* what) {
    for (const auto& [name, val] : table)
        if (s == name) return val;
    throw ConfigError(std::string("unknown ") + what + ": " + s);
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    try {
        ExperimentConfig cfg;
        const json& je = j.at("ensemble");
        cfg.ensemble.n = je.at("n").get<int>();
        cfg.ensemble.m_max = je.at("m_max").get<int>();
        cfg.ensemble.l = je.at("l").get<int>();
        cfg.ensemble.phi_kind =
            parse_enum<MatrixKind>(je.value("phi_kind", "gaussian"),
                                   {{"gaussian", MatrixKind::gaussian}, {"bernoulli", MatrixKind::bernoulli}},
                                   "phi_kind");
        cfg.ensemble.phi_seed = rng_from_json(je.at("phi_seed"));
        cfg.ensemble.b_seed = rng_from_json(je.at("b_seed"));

        const json& js = j.at("sweep");
        cfg.sweep = {js.at("m_min").get<int>(), js.at("m_max").get<int>(), js.at("count").get<int>()};

        const json& jq = j.at("quantizer");
        cfg.quantizer.r = jq.at("r").get<int>();
        cfg.quantizer.delta = jq.at("delta").get<double>();
        cfg.quantizer.levels = jq.at("levels").get<int>();

        cfg.decoder = parse_enum<DecoderVariant>(j.at("decoder").get<std::string>(),
                                                 {{"noiseless", DecoderVariant::noiseless},
                                                  {"noisy", DecoderVariant::noisy},
                                                  {"first_order", DecoderVariant::first_order},
                                                  {"non_uniform", DecoderVariant::non_uniform},
                                                  {"msq_bpdn", DecoderVariant::msq_bpdn},
                                                  {"two_stage", DecoderVariant::two_stage}},
                                                 "decoder");

        const json& jsig = j.at("signal");
        const std::string kind = jsig.at("kind").get<std::string>();
        if (kind == "sparse") {
            cfg.signal.kind = SignalConfig::Kind::sparse;
            cfg.signal.sparse.n = jsig.at("n").get<int>();
            cfg.signal.sparse.k = jsig.at("k").get<int>();
            cfg.signal.sparse.nonzero_dist = parse_enum<NonzeroDist>(
                jsig.value("nonzero_dist", "standard_normal"),
                {{"standard_normal", NonzeroDist::standard_normal}, {"unit", NonzeroDist::unit}},
                "nonzero_dist");
        } else if (kind == "wlp") {
            cfg.signal.kind = SignalConfig::Kind::wlp;
            cfg.signal.wlp.n = jsig.at("n").get<int>();
            cfg.signal.wlp.p = jsig.at("p").get<double>();
            cfg.signal.wlp.radius = jsig.value("radius", 1.0);
        } else {
            throw ConfigError("unknown signal kind: " + kind);
        }

        const json& jm = j.at("measurement");
        cfg.measurement.mu = jm.at("mu").get<double>();
        cfg.measurement.epsilon = jm.value("epsilon", 0.0);
        cfg.measurement.noise_dist = parse_enum<NoiseDist>(
            jm.value("noise_dist", "none"),
            {{"none", NoiseDist::none}, {"uniform", NoiseDist::uniform}, {"gaussian", NoiseDist::gaussian}},
            "noise_dist");

        cfg.trials = j.value("trials", 50);
        cfg.aggregation = parse_enum<Aggregation>(j.value("aggregation", "mean"),
                                                  {{"mean", Aggregation::mean}, {"max", Aggregation::max}},
                                                  "aggregation");
        if (j.contains("l_policy")) {
            const json& jl = j.at("l_policy");
            cfg.l_policy.kind = parse_enum<LPolicy::Kind>(
                jl.at("kind").get<std::string>(),
                {{"fixed", LPolicy::Kind::fixed}, {"wlp_formula", LPolicy::Kind::wlp_formula}}, "l_policy");
            cfg.l_policy.c_rip = jl.value("c_rip", 4.0);
        }
        if (j.contains("solver")) {
            const json& so = j.at("solver");
            cfg.solver.max_iters = so.value("max_iters", cfg.solver.max_iters);
            cfg.solver.tol_feas = so.value("tol_feas", cfg.solver.tol_feas);
            cfg.solver.tol_gap = so.value("tol_gap", cfg.solver.tol_gap);
            cfg.solver.window = so.value("window", cfg.solver.window);
            cfg.solver.rho_measure = so.value("rho_measure", cfg.solver.rho_measure);
            cfg.solver.rho_consensus = so.value("rho_consensus", cfg.solver.rho_consensus);
            cfg.solver.over_relax = so.value("over_relax", cfg.solver.over_relax);
        }
        cfg.master_seed = j.value("master_seed", 1ull);

        // cross-field invariants
        const auto ms = sweep_values(cfg.sweep);
        if (cfg.sweep.m_max > cfg.ensemble.m_max) throw ConfigError("sweep exceeds ensemble m_max");
        if (cfg.l_policy.kind == LPolicy::Kind::fixed && cfg.ensemble.l > ms.front())
            throw ConfigError("ensemble l must not exceed the smallest sweep point");
        const int sig_n =
            cfg.signal.kind == SignalConfig::Kind::sparse ? cfg.signal.sparse.n : cfg.signal.wlp.n;
        if (sig_n != cfg.ensemble.n) throw ConfigError("signal dimension differs from ensemble n");
        if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
        if (cfg.quantizer.delta <= 0.0 || cfg.quantizer.levels < 1 || cfg.quantizer.r < 0)
            throw ConfigError("bad quantizer block");
        if (cfg.decoder == DecoderVariant::two_stage &&
            (cfg.signal.kind != SignalConfig::Kind::sparse || cfg.signal.sparse.k < 1))
            throw ConfigError("two_stage decoding needs a sparse signal with k >= 1");
        if (cfg.measurement.epsilon < 0.0 ||
            (cfg.measurement.epsilon > 0.0 && cfg.measurement.epsilon >= 1.0 - cfg.measurement.mu))
            throw ConfigError("need 0 <= epsilon < 1 - mu");
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }
    return parse_config(j);
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["ensemble"] = {{"n", cfg.ensemble.n},
                     {"m_max", cfg.ensemble.m_max},
                     {"l", cfg.ensemble.l},
                     {"phi_kind", cfg.ensemble.phi_kind == MatrixKind::gaussian ? "gaussian" : "bernoulli"},
                     {"phi_seed", rng_to_json(cfg.ensemble.phi_seed)},
                     {"b_seed", rng_to_json(cfg.ensemble.b_seed)}};
    j["sweep"] = {{"m_min", cfg.sweep.m_min}, {"m_max", cfg.sweep.m_max}, {"count", cfg.sweep.count}};
    j["quantizer"] = {{"r", cfg.quantizer.r}, {"delta", cfg.quantizer.delta}, {"levels", cfg.quantizer.levels}};
    static const char* dec_names[] = {"noiseless", "noisy", "first_order", "non_uniform", "msq_bpdn", "two_stage"};
    j["decoder"] = dec_names[static_cast<int>(cfg.decoder)];
    if (cfg.signal.kind == SignalConfig::Kind::sparse) {
        j["signal"] = {{"kind", "sparse"},
                       {"n", cfg.signal.sparse.n},
                       {"k", cfg.signal.sparse.k},
                       {"nonzero_dist",
                        cfg.signal.sparse.nonzero_dist == NonzeroDist::standard_normal ? "standard_normal" : "unit"}};
    } else {
        j["signal"] = {{"kind", "wlp"}, {"n", cfg.signal.wlp.n}, {"p", cfg.signal.wlp.p}, {"radius", cfg.signal.wlp.radius}};
    }
    static const char* noise_names[] = {"none", "uniform", "gaussian"};
    j["measurement"] = {{"mu", cfg.measurement.mu},
                        {"epsilon", cfg.measurement.epsilon},
                        {"noise_dist", noise_names[static_cast<int>(cfg.measurement.noise_dist)]}};
    j["trials"] = cfg.trials;
    j["aggregation"] = cfg.aggregation == Aggregation::mean ? "mean" : "max";
    j["l_policy"] = {{"kind", cfg.l_policy.kind == LPolicy::Kind::fixed ? "fixed" : "wlp_formula"},
                     {"c_rip", cfg.l_policy.c_rip}};
    j["solver"] = {{"max_iters", cfg.solver.max_iters},   {"tol_feas", cfg.solver.tol_feas},
                   {"tol_gap", cfg.solver.tol_gap},       {"window", cfg.solver.window},
                   {"rho_measure", cfg.solver.rho_measure}, {"rho_consensus", cfg.solver.rho_consensus},
                   {"over_relax", cfg.solver.over_relax}};
    j["master_seed"] = cfg.master_seed;
    return j;
}

std::optional<FitResult> fit_slope(std::span<const double> x, std::span<const double> y,
                                   AxisScale x_scale) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0)) continue;
        if (x_scale == AxisScale::log10 && !(x[i] > 0.0)) continue;
        xs.push_back(x_scale == AxisScale::log10 ? std::log10(x[i]) : x[i]);
        ys.push_back(std::log10(y[i]));
    }
    const std::size_t n = xs.size();
    if (n < 2) return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    FitResult f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double r2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - (f.intercept + f.slope * xs[i]);
        r2 += e * e;
    }
    f.residual = std::sqrt(r2 / n);
    return f;
}

double wlp_formula_m(double l, double p, int r, int n, double c_rip) {
    const double expo = r / 2.0 - 1.25 + 1.0 / p;
    const double denom = std::pow(2.0 * c_rip * std::log(static_cast<double>(n)), 1.0 / p - 0.5);
    return std::pow(std::pow(l, expo) / denom, 1.0 / (r / 2.0 - 0.75));
}

double wlp_formula_l(double m, double p, int r, int n, double c_rip) {
    const double num = std::pow(m, r / 2.0 - 0.75) *
                       std::pow(2.0 * c_rip * std::log(static_cast<double>(n)), 1.0 / p - 0.5);
    return std::pow(num, 1.0 / (r / 2.0 - 1.25 + 1.0 / p));
}

namespace {

struct TrialOutcome {
    double err = 0.0;
    double scale = 1.0;
    bool failed = false;
};

TrialOutcome run_trial(const ExperimentConfig& cfg, const Ensemble& ens, int m, int l,
                       std::uint64_t trial_seed) {
    const MatView phi = ens.phi_rows(m);
    const MatView bview = ens.b_block(l, m);
    const MidriseAlphabet alphabet{cfg.quantizer.levels, cfg.quantizer.delta};

    // the test set is drawn once per trial index and reused across the whole
    // sweep; only the measurement noise is redrawn per point
    std::vector<double> x;
    if (cfg.signal.kind == SignalConfig::Kind::sparse) {
        SparseSpec s = cfg.signal.sparse;
        s.seed = RngSpec{derive_seed(trial_seed, 1)};
        x = gen_sparse(s);
    } else {
        WlpSpec w = cfg.signal.wlp;
        w.seed = RngSpec{derive_seed(trial_seed, 1)};
        x = gen_wlp(w);
    }
    ScaledSignal scaled = scale_to_mu(phi, x, cfg.measurement.mu);

    MeasurementSpec mspec = cfg.measurement;
    mspec.seed = RngSpec{derive_seed(trial_seed, 2, static_cast<std::uint64_t>(m))};
    Measurement meas = measure(phi, scaled.x, mspec);

    QuantizationRun run;
    if (cfg.decoder == DecoderVariant::msq_bpdn)
        run = msq(meas.y, alphabet);
    else
        run = sd_greedy(meas.y, alphabet, std::max(cfg.quantizer.r, 1));

    // encode for the record; the rate column and lattice checks ride on it
    Codeword cw = encode_dense(bview, run.q, run.r, alphabet);
    (void)cw;

    DecodeResult dec;
    const double gamma = run.gamma;
    switch (cfg.decoder) {
        case DecoderVariant::noiseless:
            dec = decode_noiseless(phi, bview, run.q, run.r, gamma, cfg.solver);
            break;
        case DecoderVariant::noisy:
            dec = decode_noisy(phi, bview, run.q, run.r, gamma, cfg.measurement.epsilon,
                               NoisyTauPolicy::uniform, cfg.solver);
            break;
        case DecoderVariant::non_uniform:
            dec = decode_noisy(phi, bview, run.q, run.r, gamma, cfg.measurement.epsilon,
                               NoisyTauPolicy::non_uniform, cfg.solver);
            break;
        case DecoderVariant::first_order:
            dec = decode_first_order(phi, bview, run.q, run.r, gamma, 1.0, cfg.solver);
            break;
        case DecoderVariant::msq_bpdn:
            dec = decode_msq_bpdn(phi, run.q, cfg.quantizer.delta, cfg.solver);
            break;
        case DecoderVariant::two_stage:
            dec = decode_two_stage_sobolev(phi, run.q, run.r, cfg.signal.sparse.k,
                                           cfg.quantizer.delta, cfg.solver);
            break;
    }

    TrialOutcome out;
    double err2 = 0.0;
    for (std::size_t i = 0; i < scaled.x.size(); ++i) {
        const double d = scaled.x[i] - dec.x_hat[i];
        err2 += d * d;
    }
    out.err = std::sqrt(err2) / scaled.scale;  // original signal units
    out.scale = scaled.scale;
    out.failed = !dec.converged;
    return out;
}

int policy_l(const ExperimentConfig& cfg, int m) {
    if (cfg.l_policy.kind == LPolicy::Kind::fixed) return cfg.ensemble.l;
    const double p = cfg.signal.wlp.p;
    const double lf = wlp_formula_l(m, p, cfg.quantizer.r, cfg.ensemble.n, cfg.l_policy.c_rip);
    int l = static_cast<int>(std::llround(lf));
    l = std::clamp(l, 2, cfg.ensemble.l);
    if (l > m) throw ConfigError("wlp policy produced l > m; widen the sweep or lower c_rip");
    return l;
}

ExperimentResult run_sweep(const ExperimentConfig& cfg) {
    const Ensemble ens = make_ensemble(cfg.ensemble);
    const auto ms = sweep_values(cfg.sweep);
    ExperimentResult res;
    res.points.reserve(ms.size());

    for (std::size_t pi = 0; pi < ms.size(); ++pi) {
        const int m = ms[pi];
        const int l = policy_l(cfg, m);
        const auto t0 = std::chrono::steady_clock::now();

        std::vector<TrialOutcome> outs(cfg.trials);
        std::vector<std::uint64_t> seeds(cfg.trials);
        for (int t = 0; t < cfg.trials; ++t) seeds[t] = derive_seed(cfg.master_seed, 0, t);

        // trials are independent; reduction below is ordered by trial index
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < cfg.trials; ++t) {
            try {
                outs[t] = run_trial(cfg, ens, m, l, seeds[t]);
            } catch (const std::exception&) {
                outs[t].failed = true;
                outs[t].err = -1.0;  // excluded from the aggregates below
            }
        }

        RDPoint pt;
        pt.m = m;
        pt.l = l;
        const int rate_r = cfg.decoder == DecoderVariant::msq_bpdn ? 0 : std::max(cfg.quantizer.r, 1);
        pt.rate_bits = bitrate(l, m, rate_r, cfg.quantizer.levels);
        pt.trials = cfg.trials;
        double mean = 0, sq = 0, mx = 0, msc = 0;
        int used = 0;
        for (const auto& o : outs) {
            pt.fail_count += o.failed ? 1 : 0;
            if (o.err < 0.0) continue;  // trial aborted by an error
            mean += o.err;
            sq += o.err * o.err;
            mx = std::max(mx, o.err);
            msc += o.scale;
            ++used;
        }
        res.mean_scale.push_back(used ? msc / used : 1.0);
        pt.distortion_mean = used ? mean / used : 0.0;
        pt.distortion_sq_mean = used ? sq / used : 0.0;
        pt.distortion_max = mx;
        if (pt.fail_count * 10 > cfg.trials) res.flagged = true;
        res.points.push_back(pt);
        res.trial_seeds.push_back(std::move(seeds));
        res.point_ms.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    return res;
}

}  // namespace

ExperimentResult run_exp1(const ExperimentConfig& cfg) {
    ExperimentResult res = run_sweep(cfg);
    std::vector<double> xs, ys;
    for (const auto& p : res.points) {
        xs.push_back(p.rate_bits);
        ys.push_back(p.distortion_sq_mean);
    }
    res.fit = fit_slope(xs, ys, AxisScale::linear);
    return res;
}

ExperimentResult run_exp2(const ExperimentConfig& cfg) {
    if (cfg.l_policy.kind != LPolicy::Kind::wlp_formula)
        throw ConfigError("exp2 requires l_policy = wlp_formula");
    if (cfg.signal.kind != SignalConfig::Kind::wlp) throw ConfigError("exp2 requires a wlp signal");
    ExperimentResult res = run_sweep(cfg);
    std::vector<double> xs, ys;
    for (const auto& p : res.points) {
        xs.push_back(p.rate_bits);
        ys.push_back(p.distortion_mean);
    }
    res.fit = fit_slope(xs, ys, AxisScale::log10);
    return res;
}

ExperimentResult run_exp3(const ExperimentConfig& cfg) {
    ExperimentResult res = run_sweep(cfg);
    // plateau: first R from which every step changes the aggregate by < 10%
    const auto agg = [&](const RDPoint& p) {
        return cfg.aggregation == Aggregation::max ? p.distortion_max : p.distortion_mean;
    };
    for (std::size_t i = 0; i < res.points.size(); ++i) {
        bool flat = res.points.size() - i >= 2;
        for (std::size_t j = i + 1; j < res.points.size(); ++j) {
            const double prev = agg(res.points[j - 1]), cur = agg(res.points[j]);
            if (prev <= 0.0 || std::abs(cur - prev) / prev >= 0.10) {
                flat = false;
                break;
            }
        }
        if (flat) {
            res.plateau_rate = res.points[i].rate_bits;
            break;
        }
    }
    return res;
}

SigmaFloorReport verify_sigma_floor(const SigmaFloorConfig& cfg) {
    SigmaFloorReport rep;
    rep.m = cfg.m;
    rep.l = cfg.l;
    rep.seed_count = cfg.seed_count;
    for (int r : cfg.orders) {
        SigmaFloorReport::PerOrder po;
        po.r = r;
        po.floor = std::sqrt(static_cast<double>(cfg.m)) *
                   std::pow(static_cast<double>(cfg.m) / cfg.l, r / 2.0 - 0.25);
        for (int sidx = 0; sidx < cfg.seed_count; ++sidx) {
            RngSpec seed{derive_seed(cfg.master_seed, 7000 + r, sidx)};
            const DenseMatrix b = gen_matrix(MatrixKind::bernoulli, cfg.l, cfg.m, seed);
            const DenseMatrix w = encoder_matrix(b.view(), r);
            const double sig = smallest_singular_value(w.view());
            po.sigma_values.push_back(sig);
            if (sig >= po.floor) ++po.successes;
        }
        rep.per_order.push_back(std::move(po));
    }
    return rep;
}

std::string points_to_csv(const std::vector<RDPoint>& points) {
    std::string out = "m,L,rate_bits,distortion_mean,distortion_sq_mean,distortion_max,trials,fail_count\n";
    char buf[256];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g,%.10g,%.10g,%d,%d\n", p.m, p.l, p.rate_bits,
                      p.distortion_mean, p.distortion_sq_mean, p.distortion_max, p.trials, p.fail_count);
        out += buf;
    }
    return out;
}

json make_manifest(const ExperimentConfig& cfg, const ExperimentResult& res, double wall_ms) {
    json j;
    j["artifact_version"] = "aic 0.1.0";
    j["config"] = config_to_json(cfg);
    j["master_seed"] = cfg.master_seed;
    j["wall_clock_ms"] = wall_ms;
    j["point_ms"] = res.point_ms;
    j["trial_seeds"] = res.trial_seeds;
    j["flagged"] = res.flagged;
    if (res.fit) {
        j["fit"] = {{"slope", res.fit->slope}, {"intercept", res.fit->intercept}, {"residual", res.fit->residual}};
    }
    if (res.plateau_rate) j["plateau_rate"] = *res.plateau_rate;
    if (!res.mean_scale.empty()) j["mean_scale"] = res.mean_scale;
    return j;
}

}  // namespace aic
