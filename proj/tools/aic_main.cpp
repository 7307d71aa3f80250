#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aic/decode.hpp"
#include "aic/encode.hpp"
#include "aic/experiments.hpp"
#include "aic/quantize.hpp"
#include "aic/signals.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw aic::ConfigError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw aic::ConfigError(path + ": " + e.what());
    }
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw aic::ConfigError("cannot write " + path.string());
    out << text;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw aic::ConfigError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw aic::ConfigError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

aic::ExperimentConfig load_cfg(const GlobalArgs& g) {
    if (g.config_path.empty()) throw aic::ConfigError("--config is required for this subcommand");
    aic::ExperimentConfig cfg = aic::load_config(g.config_path);
    if (g.seed_set) cfg.master_seed = g.seed;
    return cfg;
}

void run_experiment(const GlobalArgs& g, int which) {
    const aic::ExperimentConfig cfg = load_cfg(g);
    const auto t0 = std::chrono::steady_clock::now();
    aic::ExperimentResult res;
    const char* name = "";
    switch (which) {
        case 1: res = aic::run_exp1(cfg); name = "exp1"; break;
        case 2: res = aic::run_exp2(cfg); name = "exp2"; break;
        default: res = aic::run_exp3(cfg); name = "exp3"; break;
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const fs::path out(g.out_dir);
    write_text(out / (std::string(name) + ".csv"), aic::points_to_csv(res.points));
    write_text(out / "manifest.json", aic::make_manifest(cfg, res, ms).dump(2) + "\n");
    if (res.fit)
        std::cout << name << ": slope " << res.fit->slope << ", intercept " << res.fit->intercept << "\n";
    else
        std::cout << name << ": slope absent (fewer than two usable points)\n";
    if (res.plateau_rate) std::cout << name << ": plateau from rate " << *res.plateau_rate << " bits\n";
    std::cout << "wrote " << (out / (std::string(name) + ".csv")).string() << "\n";
    if (res.flagged) throw aic::NumericError("more than 10% of trials failed at some sweep point");
}

int dispatch(const GlobalArgs& g, CLI::App& app, CLI::App* gen, CLI::App* quant, CLI::App* enc,
             CLI::App* dec, CLI::App* e1, CLI::App* e2, CLI::App* e3, CLI::App* vs,
             const std::string& in_path, int gen_m, const std::string& dec_variant) {
    (void)app;
    if (gen->parsed()) {
        aic::ExperimentConfig cfg = load_cfg(g);
        const int m = gen_m > 0 ? gen_m : cfg.sweep.m_max;
        if (m > cfg.ensemble.m_max) throw aic::ConfigError("gen: m exceeds ensemble m_max");
        const aic::Ensemble ens = aic::make_ensemble(cfg.ensemble);
        const std::uint64_t tseed = aic::derive_seed(cfg.master_seed, 0, 0);
        std::vector<double> x;
        if (cfg.signal.kind == aic::SignalConfig::Kind::sparse) {
            aic::SparseSpec s = cfg.signal.sparse;
            s.seed = aic::RngSpec{aic::derive_seed(tseed, 1)};
            x = aic::gen_sparse(s);
        } else {
            aic::WlpSpec w = cfg.signal.wlp;
            w.seed = aic::RngSpec{aic::derive_seed(tseed, 1)};
            x = aic::gen_wlp(w);
        }
        const aic::MatView phi = ens.phi_rows(m);
        aic::ScaledSignal scaled = aic::scale_to_mu(phi, x, cfg.measurement.mu);
        aic::MeasurementSpec mspec = cfg.measurement;
        mspec.seed = aic::RngSpec{aic::derive_seed(tseed, 2)};
        aic::Measurement meas = aic::measure(phi, scaled.x, mspec);
        json out{{"m", m},       {"x", scaled.x}, {"scale", scaled.scale},
                 {"y", meas.y},  {"e", meas.e}};
        write_text(fs::path(g.out_dir) / "signal.json", out.dump() + "\n");
        std::cout << "wrote " << (fs::path(g.out_dir) / "signal.json").string() << "\n";
        return 0;
    }
    if (quant->parsed()) {
        aic::ExperimentConfig cfg = load_cfg(g);
        json in = read_json(in_path);
        std::vector<double> y = in.at("y").get<std::vector<double>>();
        const aic::MidriseAlphabet a{cfg.quantizer.levels, cfg.quantizer.delta};
        aic::QuantizationRun run = cfg.quantizer.r == 0 ? aic::msq(y, a)
                                                        : aic::sd_greedy(y, a, cfg.quantizer.r);
        json out{{"q", run.q},       {"u", run.u},         {"r", run.r},
                 {"y_max", run.y_max}, {"stable", run.stable}, {"gamma", run.gamma},
                 {"delta", a.delta},  {"levels", a.levels}};
        write_text(fs::path(g.out_dir) / "quantized.json", out.dump() + "\n");
        std::cout << "wrote " << (fs::path(g.out_dir) / "quantized.json").string()
                  << (run.stable ? " (stable)" : " (unstable)") << "\n";
        return 0;
    }
    if (enc->parsed()) {
        aic::ExperimentConfig cfg = load_cfg(g);
        json in = read_json(in_path);
        std::vector<double> q = in.at("q").get<std::vector<double>>();
        const int r = in.at("r").get<int>();
        const aic::MidriseAlphabet a{in.at("levels").get<int>(), in.at("delta").get<double>()};
        const int m = static_cast<int>(q.size());
        if (m > cfg.ensemble.m_max) throw aic::ConfigError("encode: q longer than ensemble m_max");
        const aic::Ensemble ens = aic::make_ensemble(cfg.ensemble);
        aic::Codeword cw = aic::encode_dense(ens.b_cols(m), q, r, a);
        cw.phi_seed = cfg.ensemble.phi_seed;
        cw.b_seed = cfg.ensemble.b_seed;
        write_bytes(fs::path(g.out_dir) / "codeword.aicc", aic::serialize_codeword(cw));
        std::cout << "wrote " << (fs::path(g.out_dir) / "codeword.aicc").string() << " (rate "
                  << cw.rate_bits << " bits)\n";
        return 0;
    }
    if (dec->parsed()) {
        aic::ExperimentConfig cfg = load_cfg(g);
        aic::Codeword cw = aic::deserialize_codeword(read_bytes(in_path));
        if (cw.phi_seed.seed != cfg.ensemble.phi_seed.seed || cw.b_seed.seed != cfg.ensemble.b_seed.seed)
            throw aic::ConfigError("decode: codeword seeds disagree with the config ensemble");
        const aic::Ensemble ens = aic::make_ensemble(cfg.ensemble);
        aic::CodewordDecoder which = aic::CodewordDecoder::noiseless;
        if (dec_variant == "noisy") which = aic::CodewordDecoder::noisy;
        else if (dec_variant == "first_order") which = aic::CodewordDecoder::first_order;
        else if (dec_variant == "non_uniform") which = aic::CodewordDecoder::non_uniform;
        else if (dec_variant != "noiseless") throw aic::ConfigError("decode: unknown variant " + dec_variant);
        const aic::MatView phi = ens.phi_rows(cw.m);
        aic::DecodeResult res = aic::decode_codeword(phi, ens.b.view(), cw, which, cw.delta / 2.0,
                                                     cfg.measurement.epsilon, cfg.solver);
        json out{{"x_hat", res.x_hat},
                 {"objective", res.objective},
                 {"feas_residual", res.feas_residual},
                 {"iterations", res.iterations},
                 {"converged", res.converged}};
        write_text(fs::path(g.out_dir) / "decoded.json", out.dump() + "\n");
        std::cout << "wrote " << (fs::path(g.out_dir) / "decoded.json").string() << " (objective "
                  << res.objective << ")\n";
        return 0;
    }
    if (e1->parsed()) { run_experiment(g, 1); return 0; }
    if (e2->parsed()) { run_experiment(g, 2); return 0; }
    if (e3->parsed()) { run_experiment(g, 3); return 0; }
    if (vs->parsed()) {
        if (g.config_path.empty()) throw aic::ConfigError("--config is required");
        json j = read_json(g.config_path);
        aic::SigmaFloorConfig sc;
        if (j.contains("sigma")) {
            const json& js = j.at("sigma");
            sc.m = js.value("m", sc.m);
            sc.l = js.value("l", sc.l);
            if (js.contains("orders")) sc.orders = js.at("orders").get<std::vector<int>>();
            sc.seed_count = js.value("seeds", sc.seed_count);
        }
        sc.master_seed = g.seed_set ? g.seed : j.value("master_seed", 1ull);
        aic::SigmaFloorReport rep = aic::verify_sigma_floor(sc);
        json out{{"m", rep.m}, {"l", rep.l}, {"seed_count", rep.seed_count}};
        for (const auto& po : rep.per_order) {
            out["orders"].push_back({{"r", po.r},
                                     {"floor", po.floor},
                                     {"successes", po.successes},
                                     {"sigma_values", po.sigma_values}});
            std::cout << "r=" << po.r << ": " << po.successes << "/" << rep.seed_count
                      << " draws at or above floor " << po.floor << "\n";
        }
        write_text(fs::path(g.out_dir) / "sigma_report.json", out.dump(2) + "\n");
        return 0;
    }
    std::cout << "no subcommand given; try --help\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analog-to-information converter: quantize, encode, decode, reproduce rate-distortion sweeps"};
    app.require_subcommand(0, 1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "JSON config path")->expected(1);
    app.add_option("--out", g.out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", g.seed, "override the master seed");
    app.add_option("--threads", g.threads, "worker thread count");

    std::string in_path, dec_variant = "noiseless";
    int gen_m = 0;

    auto* gen = app.add_subcommand("gen", "draw a signal and its measurements");
    gen->add_option("--m", gen_m, "measurement count (default: sweep m_max)");
    auto* quant = app.add_subcommand("quantize", "noise-shape a measurement vector");
    quant->add_option("--in", in_path, "signal.json from gen")->required();
    auto* enc = app.add_subcommand("encode", "compress a quantized vector into a codeword file");
    enc->add_option("--in", in_path, "quantized.json from quantize")->required();
    auto* dec = app.add_subcommand("decode", "reconstruct a signal from a codeword file");
    dec->add_option("--in", in_path, "codeword.aicc from encode")->required();
    dec->add_option("--variant", dec_variant, "noiseless | first_order | noisy | non_uniform");
    auto* e1 = app.add_subcommand("exp1", "sparse rate-distortion sweep");
    auto* e2 = app.add_subcommand("exp2", "compressible-signal sweep");
    auto* e3 = app.add_subcommand("exp3", "noisy-measurement sweep");
    auto* vs = app.add_subcommand("verify-sigma", "empirical singular-value floor check");

    CLI11_PARSE(app, argc, argv);
    g.seed_set = seed_opt->count() > 0;
#ifdef _OPENMP
    if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

    try {
        return dispatch(g, app, gen, quant, enc, dec, e1, e2, e3, vs, in_path, gen_m, dec_variant);
    } catch (const aic::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const aic::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const aic::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
