#pragma once

#include <span>
#include <vector>

namespace aic {

// The 2K-level grid { +-(j - 1/2) * delta : j = 1..K }. Every level is an odd
// multiple of delta/2, so the whole alphabet lives on the (delta/2) lattice.
struct MidriseAlphabet {
    int levels = 1;       // K, levels per side
    double delta = 2.0;   // step size

    double max_level() const { return (levels - 0.5) * delta; }
};

// One-bit alphabet {-1, +1}.
inline MidriseAlphabet one_bit_alphabet() { return MidriseAlphabet{1, 2.0}; }

// Nearest alphabet level, ties broken toward the larger level, saturating
// outside the grid.
double scalar_quantize(double z, const MidriseAlphabet& a);

struct QuantizationRun {
    std::vector<double> q;  // entries in the alphabet
    std::vector<double> u;  // state vector; y - q = D^r u
    int r = 0;
    double y_max = 0.0;     // observed ||y||_inf
    bool stable = false;
    double gamma = 0.0;     // stability constant, = delta/2 for greedy schemes
};

// Memoryless scalar quantization: componentwise rounding, u = y - q, r = 0.
// Stable when ||y||_inf <= K * delta.
QuantizationRun msq(std::span<const double> y, const MidriseAlphabet& a);

// Greedy r-th order noise-shaping run. State recursion
//   u_i = y_i - q_i + sum_{j=1..r} (-1)^{j-1} C(r,j) u_{i-j},
// with q_i the quantization of the same feedback sum plus y_i, and zero
// initialization for indices <= 0. The run reports stable when
// ||u||_inf <= delta/2; instability is reported, never thrown.
QuantizationRun sd_greedy(std::span<const double> y, const MidriseAlphabet& a, int r);

// Smallest K with K >= 2*ceil(beta/delta) + 2^r + 1.
int min_levels_for_stability(double beta, double delta, int r);

}  // namespace aic
