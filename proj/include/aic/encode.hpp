#pragma once

#include <cstdint>
#include <vector>

#include "aic/linalg.hpp"
#include "aic/quantize.hpp"

namespace aic {

// Encoded vector c = B D^{-r} q. Entries of an alphabet-valued q are odd
// integers times delta/2, and D^{-r} and B act integrally, so the codeword is
// carried exactly as signed 64-bit lattice coordinates with
// value_i = lattice_ints[i] * delta / 2.
struct Codeword {
    std::vector<double> values;
    std::vector<std::int64_t> lattice_ints;
    int l = 0;
    int m = 0;
    int r = 0;
    int levels = 0;   // K
    double delta = 0.0;
    double rate_bits = 0.0;
    RngSpec phi_seed;  // provenance only; matrices are regenerated from seeds
    RngSpec b_seed;
};

// Bits to index the codeword range: L (r+1) log2(m) + L log2(2K).
double bitrate(int l, int m, int r, int levels);

// Dense encode: values = B * D^{-r} q, computed on the integer lattice.
// q entries must round to odd lattice integers within 1e-6 of delta/2 units
// and lie inside the alphabet; anything else throws FormatError (the vector
// was not alphabet-valued). r = 0 encodes plain B q.
Codeword encode_dense(MatView b, std::span<const double> q, int r, const MidriseAlphabet& a);

// Accumulate c += B_i q_i where the running sums carry D^{-r} implicitly:
// after consuming q_1..q_m the finalized codeword equals B D^{-r} q exactly.
// plain_bq mode skips the running sums and accumulates B q literally.
class StreamEncoder {
  public:
    enum class Mode { noise_shaped, plain_bq };

    StreamEncoder(int l, int m, int r, const MidriseAlphabet& a, Mode mode = Mode::noise_shaped);

    void step(std::span<const double> b_col, double q_i);
    int consumed() const { return i_; }
    Codeword finalize() const;

  private:
    int l_, m_, r_, i_ = 0;
    MidriseAlphabet alphabet_;
    Mode mode_;
    std::vector<std::int64_t> sums_;       // nested running sums s^(1)..s^(r)
    std::vector<std::int64_t> partial_c_;  // length l
};

// The L x m matrix of the map q -> B D^{-r} q (rows are r-fold suffix sums of
// the rows of B). Test and verification paths only; pipeline encoders stay on
// the running-sum form.
DenseMatrix encoder_matrix(MatView b, int r);

std::vector<std::uint8_t> serialize_codeword(const Codeword& c);
Codeword deserialize_codeword(std::span<const std::uint8_t> bytes);

}  // namespace aic
