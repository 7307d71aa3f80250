#pragma once

#include <vector>

#include "aic/linalg.hpp"

namespace aic {

enum class NonzeroDist { standard_normal, unit };

struct SparseSpec {
    int n = 0;
    int k = 0;
    NonzeroDist nonzero_dist = NonzeroDist::standard_normal;
    RngSpec seed;
};

// Exactly k nonzeros on a uniformly random support.
std::vector<double> gen_sparse(const SparseSpec& spec);

struct WlpSpec {
    int n = 0;
    double p = 0.5;      // in (0, 2)
    double radius = 1.0;
    RngSpec seed;
};

// Draw on the boundary of the weak-lp ball: sorted magnitudes are exactly
// radius * j^{-1/p}, signs equiprobable, positions uniformly permuted.
std::vector<double> gen_wlp(const WlpSpec& spec);

// Sum of the n-k smallest magnitudes.
double best_kterm_error_l1(std::span<const double> x, int k);

struct ScaledSignal {
    std::vector<double> x;
    double scale = 1.0;  // factor applied to the input; 1 when already in range
};

// Rescale x so that ||phi x||_inf <= mu; identity when already within the
// bound or when phi x == 0. The factor is kept for error rescaling in reports.
ScaledSignal scale_to_mu(MatView phi, std::span<const double> x, double mu);

enum class NoiseDist { none, uniform, gaussian };

struct MeasurementSpec {
    double mu = 1.0;
    double epsilon = 0.0;
    NoiseDist noise_dist = NoiseDist::none;
    RngSpec seed;
};

struct Measurement {
    std::vector<double> y;
    std::vector<double> e;
};

// y = phi x + e with ||e||_inf <= epsilon (uniform on [-eps, eps]; the
// gaussian flavor draws sd = eps/3 and clamps to the box).
Measurement measure(MatView phi, std::span<const double> x, const MeasurementSpec& spec);

}  // namespace aic
