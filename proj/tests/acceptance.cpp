// Acceptance gate: one pass/fail line per criterion, every tolerance pinned
// in code. Run everything or a single criterion with --criterion N.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aic/decode.hpp"
#include "aic/encode.hpp"
#include "aic/experiments.hpp"
#include "aic/quantize.hpp"
#include "aic/signals.hpp"
#include "support/oracles.hpp"

using namespace aic;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

char buf[512];

std::vector<double> random_box(int m, double beta, Rng& rng) {
    std::vector<double> y(m);
    for (auto& v : y) v = beta * (2.0 * rng.uniform01() - 1.0);
    return y;
}

// ---------------------------------------------------------------- criterion 1
Outcome quantizer_identity_suite() {
    Rng rng(RngSpec{1001});
    int identity_bad = 0, stability_bad = 0, stability_checked = 0;
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int r = 1 + static_cast<int>(rng.bounded(4));
        const int m = 2 + static_cast<int>(rng.bounded(96));
        const double delta = 0.05 + 0.6 * rng.uniform01();
        const double beta = 0.1 + 2.0 * rng.uniform01();
        const bool guaranteed = rng.bounded(2) == 0;
        const int k = guaranteed ? min_levels_for_stability(beta, delta, r)
                                 : 1 + static_cast<int>(rng.bounded(30));
        const MidriseAlphabet a{k, delta};
        const auto y = random_box(m, beta, rng);
        const QuantizationRun run = sd_greedy(y, a, r);
        const auto lhs = apply_D_r(run.u, r);
        double resid = 0.0;
        for (int i = 0; i < m; ++i) resid = std::max(resid, std::abs(y[i] - run.q[i] - lhs[i]));
        const double rel = resid / std::max(1.0, run.y_max);
        worst = std::max(worst, rel);
        if (rel > 1e-10) ++identity_bad;
        if (guaranteed) {
            ++stability_checked;
            if (!run.stable || kernels::norm_inf(run.u) > delta / 2.0 + 1e-12) ++stability_bad;
        }
    }
    Outcome o;
    o.pass = identity_bad == 0 && stability_bad == 0;
    std::snprintf(buf, sizeof buf,
                  "1000 runs, identity residual <= 1e-10 (worst %.2e), stability bound held on "
                  "%d/%d guaranteed configurations",
                  worst, stability_checked - stability_bad, stability_checked);
    o.detail = buf;
    return o;
}

// ---------------------------------------------------------------- criterion 2
Outcome encoder_equivalence() {
    Rng rng(RngSpec{1002});
    int mismatches = 0, lattice_bad = 0;
    for (int t = 0; t < 500; ++t) {
        const int m = 1 + static_cast<int>(rng.bounded(256));
        const int l = 2 + static_cast<int>(rng.bounded(24));
        const int r = 1 + static_cast<int>(rng.bounded(4));
        const int k = 1 + static_cast<int>(rng.bounded(12));
        const double delta = 0.05 + 0.5 * rng.uniform01();
        const MidriseAlphabet a{k, delta};
        const DenseMatrix b =
            gen_matrix(MatrixKind::bernoulli, l, m, RngSpec{20000 + static_cast<std::uint64_t>(t)});
        std::vector<double> q(m);
        for (auto& v : q)
            v = (rng.bounded(2) ? 1.0 : -1.0) * (static_cast<double>(rng.bounded(k)) + 0.5) * delta;

        const Codeword dense = encode_dense(b.view(), q, r, a);
        StreamEncoder enc(l, m, r, a);
        std::vector<double> col(l);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < l; ++j) col[j] = b(j, i);
            enc.step(col, q[i]);
        }
        const Codeword stream = enc.finalize();
        if (stream.lattice_ints != dense.lattice_ints) ++mismatches;
        for (int i = 0; i < l; ++i) {
            if (dense.values[i] != static_cast<double>(dense.lattice_ints[i]) * (delta / 2.0))
                ++lattice_bad;
            if (std::abs(dense.values[i] - stream.values[i]) > 1e-10) ++mismatches;
        }
    }
    Outcome o;
    o.pass = mismatches == 0 && lattice_bad == 0;
    std::snprintf(buf, sizeof buf,
                  "500 instances (m <= 256, r <= 4): streaming == dense with %d mismatches, "
                  "%d entries off the delta/2 lattice",
                  mismatches, lattice_bad);
    o.detail = buf;
    return o;
}

// ---------------------------------------------------------------- criterion 3
Outcome solver_oracle_equivalence() {
    Rng rng(RngSpec{1003});
    int bad = 0;
    double worst = 0.0;
    SolverOptions opts;
    opts.max_iters = 60000;
    opts.rho_consensus = 50.0;
    for (int t = 0; t < 100; ++t) {
        const int l = 2 + static_cast<int>(rng.bounded(7));           // <= 8
        const int n = l + 1 + static_cast<int>(rng.bounded(12 - l));  // <= 12
        const DenseMatrix a =
            gen_matrix(MatrixKind::gaussian, l, n, RngSpec{30000 + static_cast<std::uint64_t>(t)});
        std::vector<double> x0(n, 0.0);
        x0[rng.bounded(n)] = rng.gaussian();
        x0[rng.bounded(n)] = rng.gaussian();
        std::vector<double> b(l);
        kernels::matvec(a.view(), x0, b);
        for (auto& v : b) v += 0.05 * rng.gaussian();
        const double tau = 0.01 + 0.3 * rng.uniform01();

        const double oracle_obj = oracles::l1_ball_objective(a, b, tau);
        const DecodeResult res = solve_ball_l1(make_linop(a.view()), b, tau, opts);
        const double gap = std::abs(res.objective - oracle_obj);
        worst = std::max(worst, gap);
        if (gap > 1e-4) ++bad;
    }
    Outcome o;
    o.pass = bad == 0;
    std::snprintf(buf, sizeof buf,
                  "100 tiny instances (N <= 12, L <= 8): objective gap to the penalized-path "
                  "oracle <= 1e-4 on %d/100 (worst %.2e)",
                  100 - bad, worst);
    o.detail = buf;
    return o;
}

// ---------------------------------------------------------------- criterion 4
Outcome sigma_floor() {
    SigmaFloorConfig sc;
    sc.m = 512;
    sc.l = 64;
    sc.orders = {1, 2};
    sc.seed_count = 20;
    sc.master_seed = 1004;
    const SigmaFloorReport rep = verify_sigma_floor(sc);
    Outcome o;
    o.pass = true;
    std::string detail = "m=512, L=64:";
    for (const auto& po : rep.per_order) {
        if (po.successes < 19) o.pass = false;
        double med;
        {
            auto v = po.sigma_values;
            std::sort(v.begin(), v.end());
            med = v[v.size() / 2];
        }
        std::snprintf(buf, sizeof buf, " r=%d floor=%.2f successes=%d/20 (median sigma %.2f);",
                      po.r, po.floor, po.successes, med);
        detail += buf;
    }
    o.detail = detail;
    return o;
}

json desk_exp1_config(double mu, double eps, int trials, const char* aggregation,
                      const char* decoder, int sweep_count, int m_min, int m_max) {
    json j;
    j["ensemble"] = {{"n", 400},       {"m_max", 1000},          {"l", 120},
                     {"phi_kind", "gaussian"}, {"phi_seed", {{"seed", 4001}}}, {"b_seed", {{"seed", 4002}}}};
    j["sweep"] = {{"m_min", m_min}, {"m_max", m_max}, {"count", sweep_count}};
    j["quantizer"] = {{"r", 2}, {"delta", 0.1}, {"levels", 20}};
    j["decoder"] = decoder;
    j["signal"] = {{"kind", "sparse"}, {"n", 400}, {"k", 5}};
    j["measurement"] = {{"mu", mu},
                        {"epsilon", eps},
                        {"noise_dist", eps > 0 ? "uniform" : "none"}};
    j["trials"] = trials;
    j["aggregation"] = aggregation;
    j["l_policy"] = {{"kind", "fixed"}};
    j["solver"] = {{"tol_feas", 1e-5}, {"max_iters", 4000}};
    j["master_seed"] = 1;
    return j;
}

// ---------------------------------------------------------------- criterion 5
Outcome exp1_slope() {
    const ExperimentConfig cfg = parse_config(desk_exp1_config(0.7, 0.0, 10, "mean", "noisy", 8, 150, 1000));
    const ExperimentResult res = run_exp1(cfg);
    Outcome o;
    if (!res.fit) {
        o.detail = "fit absent";
        return o;
    }
    const double target = (2.0 / 2.0 - 0.75) * std::log10(2.0) / 120.0;
    const double mag = std::abs(res.fit->slope);
    o.pass = res.fit->slope < 0.0 && mag >= 0.5 * target && mag <= 2.0 * target;
    std::snprintf(buf, sizeof buf,
                  "log10(D^2) vs R slope %.4e (target %.4e, band [%.4e, %.4e], ratio %.2f)",
                  res.fit->slope, target, 0.5 * target, 2.0 * target, mag / target);
    o.detail = buf;
    return o;
}

// ---------------------------------------------------------------- criterion 6
Outcome exp2_slope() {
    json j;
    j["ensemble"] = {{"n", 400},       {"m_max", 2000},          {"l", 80},
                     {"phi_kind", "gaussian"}, {"phi_seed", {{"seed", 4003}}}, {"b_seed", {{"seed", 4004}}}};
    j["sweep"] = {{"m_min", 150}, {"m_max", 2000}, {"count", 6}};
    j["quantizer"] = {{"r", 2}, {"delta", 0.1}, {"levels", 20}};
    j["decoder"] = "noisy";
    j["signal"] = {{"kind", "wlp"}, {"n", 400}, {"p", 1.0 / 3.0}, {"radius", 1.0}};
    j["measurement"] = {{"mu", 0.7}, {"epsilon", 0.0}, {"noise_dist", "none"}};
    j["trials"] = 10;
    j["aggregation"] = "mean";
    j["l_policy"] = {{"kind", "wlp_formula"}, {"c_rip", 4.0}};
    j["solver"] = {{"tol_feas", 1e-5}, {"max_iters", 4000}};
    j["master_seed"] = 2;
    const ExperimentResult res = run_exp2(parse_config(j));
    Outcome o;
    if (!res.fit) {
        o.detail = "fit absent";
        return o;
    }
    const double target = 1.0 / (1.0 / 3.0) - 0.5;  // 2.5
    const double mag = std::abs(res.fit->slope);
    o.pass = res.fit->slope < 0.0 && mag >= 0.6 * target && mag <= 1.4 * target;
    std::snprintf(buf, sizeof buf, "log-log slope %.3f (target -%.1f, +-40%% band [%.2f, %.2f])",
                  res.fit->slope, target, 0.6 * target, 1.4 * target);
    o.detail = buf;
    return o;
}

// ---------------------------------------------------------------- criterion 7
Outcome exp3_plateau() {
    // noisy curve over the full sweep, max over 20 trials
    const ExperimentConfig noisy =
        parse_config(desk_exp1_config(0.65, 0.05, 20, "max", "noisy", 8, 150, 1000));
    const ExperimentResult rn = run_exp3(noisy);
    // noise-free companion at the three largest sweep points
    const int m6 = rn.points[rn.points.size() - 3].m;
    const int m8 = rn.points.back().m;
    const ExperimentConfig clean =
        parse_config(desk_exp1_config(0.65, 0.0, 20, "max", "noisy", 3, m6, m8));
    const ExperimentResult rc = run_exp3(clean);

    Outcome o;
    const auto& pts = rn.points;
    const std::size_t n = pts.size();
    const double d6 = pts[n - 3].distortion_max, d7 = pts[n - 2].distortion_max,
                 d8 = pts[n - 1].distortion_max;
    const double v1 = std::abs(d7 - d6) / d6, v2 = std::abs(d8 - d7) / d7;
    bool exceeds = true;
    std::string cmp;
    for (int i = 0; i < 3; ++i) {
        const double dn = pts[n - 3 + i].distortion_max;
        const double dc = rc.points[i].distortion_max;
        if (rc.points[i].m != pts[n - 3 + i].m || dn <= dc) exceeds = false;
        std::snprintf(buf, sizeof buf, " m=%d: %.3f vs %.3f;", pts[n - 3 + i].m, dn, dc);
        cmp += buf;
    }
    o.pass = v1 < 0.10 && v2 < 0.10 && exceeds;
    std::snprintf(buf, sizeof buf,
                  "plateau variation %.1f%% / %.1f%% (< 10%%), noisy-vs-clean max error:%s",
                  100 * v1, 100 * v2, cmp.c_str());
    o.detail = buf;
    return o;
}

// ---------------------------------------------------------------- criterion 8
Outcome comparator_separation() {
    const ExperimentConfig sd =
        parse_config(desk_exp1_config(0.7, 0.0, 10, "mean", "noisy", 8, 150, 1000));
    const ExperimentResult rs = run_exp1(sd);
    const ExperimentConfig ms =
        parse_config(desk_exp1_config(0.7, 0.0, 10, "mean", "msq_bpdn", 8, 150, 1000));
    const ExperimentResult rm = run_exp1(ms);

    const std::size_t n = rs.points.size();
    const double sd_first = rs.points.front().distortion_mean;
    const double sd_last = rs.points.back().distortion_mean;
    const double msq_mid = rm.points[n / 2].distortion_mean;
    const double msq_last = rm.points.back().distortion_mean;

    Outcome o;
    const bool msq_flat = msq_last >= 0.5 * msq_mid;
    const bool sd_drops = sd_first >= 2.0 * sd_last;
    o.pass = msq_flat && sd_drops;
    std::snprintf(buf, sizeof buf,
                  "msq: last %.4f vs mid %.4f (flat: %s); noise-shaped r=2: first %.4f vs last "
                  "%.4f (drop %.2fx, need >= 2x)",
                  msq_last, msq_mid, msq_flat ? "yes" : "no", sd_first, sd_last,
                  sd_last > 0 ? sd_first / sd_last : 0.0);
    o.detail = buf;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

    using Fn = Outcome (*)();
    const std::pair<const char*, Fn> criteria[] = {
        {"quantizer identity and stability", quantizer_identity_suite},
        {"streaming/dense encoder equivalence", encoder_equivalence},
        {"ball solver vs penalized-path oracle", solver_oracle_equivalence},
        {"empirical singular-value floor", sigma_floor},
        {"sparse sweep slope law", exp1_slope},
        {"compressible sweep slope law", exp2_slope},
        {"noise plateau", exp3_plateau},
        {"msq-vs-noise-shaping separation", comparator_separation},
    };

    bool all_pass = true;
    for (int i = 0; i < 8; ++i) {
        if (only != 0 && only != i + 1) continue;
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome o = criteria[i].second();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
