#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aic/decode.hpp"
#include "aic/linalg.hpp"
#include "aic/quantize.hpp"
#include "aic/signals.hpp"

namespace aic {

struct SweepSpec {
    int m_min = 0;
    int m_max = 0;
    int count = 0;  // log-spaced values between the endpoints, deduplicated
};
std::vector<int> sweep_values(const SweepSpec& s);

struct QuantizerSpec {
    int r = 1;
    double delta = 0.1;
    int levels = 20;  // K; one-bit runs use levels=1, delta=2
};

enum class DecoderVariant { noiseless, noisy, first_order, non_uniform, msq_bpdn, two_stage };
enum class Aggregation { mean, max };

struct LPolicy {
    enum class Kind { fixed, wlp_formula };
    Kind kind = Kind::fixed;
    double c_rip = 4.0;  // heuristic constant for the wlp formula, config-set
};

struct SignalConfig {
    enum class Kind { sparse, wlp };
    Kind kind = Kind::sparse;
    SparseSpec sparse;
    WlpSpec wlp;
};

struct ExperimentConfig {
    EnsembleSpec ensemble;
    SweepSpec sweep;
    QuantizerSpec quantizer;
    DecoderVariant decoder = DecoderVariant::noisy;
    SignalConfig signal;
    MeasurementSpec measurement;
    int trials = 50;
    Aggregation aggregation = Aggregation::mean;
    LPolicy l_policy;
    SolverOptions solver;
    std::uint64_t master_seed = 1;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct RDPoint {
    int m = 0;
    int l = 0;
    double rate_bits = 0.0;
    double distortion_mean = 0.0;
    double distortion_sq_mean = 0.0;
    double distortion_max = 0.0;
    int trials = 0;
    int fail_count = 0;
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms residual of the fit
};

enum class AxisScale { linear, log10 };

// OLS of log10(y) against x (or log10(x)); y must be positive.
std::optional<FitResult> fit_slope(std::span<const double> x, std::span<const double> y,
                                   AxisScale x_scale);

struct ExperimentResult {
    std::vector<RDPoint> points;
    std::optional<FitResult> fit;
    bool flagged = false;                // some point had > 10% trial failures
    std::optional<double> plateau_rate;  // exp3: R beyond which D moves < 10% per point
    std::vector<std::vector<std::uint64_t>> trial_seeds;  // per point
    std::vector<double> point_ms;
    std::vector<double> mean_scale;  // mean mu-rescale factor per point
};

// Sparse rate-distortion sweep. Distortions are reported in original signal
// units (per-trial errors divided by the recorded mu-rescale factor). The
// fitted line is log10(distortion_sq_mean) against rate_bits.
ExperimentResult run_exp1(const ExperimentConfig& cfg);

// Compressible sweep; l per point from the wlp formula. Fit is
// log10(distortion_mean) against log10(rate_bits).
ExperimentResult run_exp2(const ExperimentConfig& cfg);

// Noisy sweep with max aggregation and a plateau detector; no fit.
ExperimentResult run_exp3(const ExperimentConfig& cfg);

// Measurement count balancing the two error terms for the wlp formula.
double wlp_formula_m(double l, double p, int r, int n, double c_rip);
// Inverse: l for a given m (rounded and clamped by callers).
double wlp_formula_l(double m, double p, int r, int n, double c_rip);

struct SigmaFloorConfig {
    int m = 512;
    int l = 64;
    std::vector<int> orders = {1, 2};
    int seed_count = 20;
    std::uint64_t master_seed = 1;
};

struct SigmaFloorReport {
    struct PerOrder {
        int r = 0;
        double floor = 0.0;
        int successes = 0;
        std::vector<double> sigma_values;
    };
    int m = 0, l = 0, seed_count = 0;
    std::vector<PerOrder> per_order;
};

// Empirical success rate of sigma_L(B D^{-r}) >= sqrt(m) (m/L)^{r/2 - 1/4}.
SigmaFloorReport verify_sigma_floor(const SigmaFloorConfig& cfg);

std::string points_to_csv(const std::vector<RDPoint>& points);
nlohmann::json make_manifest(const ExperimentConfig& cfg, const ExperimentResult& res,
                             double wall_ms);

}  // namespace aic
