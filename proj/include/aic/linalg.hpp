#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "aic/errors.hpp"
#include "aic/kernels.hpp"

namespace aic {

using kernels::MatView;

struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;  // row-major

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    MatView view() const { return {a.data(), rows, cols, cols}; }
    // first r rows (rows are contiguous in row-major storage)
    MatView top_rows(int r) const { return {a.data(), r, cols, cols}; }
    // first c columns of the first r rows
    MatView block(int r, int c) const { return {a.data(), r, c, cols}; }
};

// Pinned, versioned random stream. "mt19937_64-bm-v1" means: std::mt19937_64
// seeded directly with `seed`; uniforms are (u >> 11) * 2^-53; Gaussians are
// one Box-Muller cosine draw per two uniforms; signs take the top bit.
// Identical spec + dimensions reproduce matrices bit-for-bit.
struct RngSpec {
    std::uint64_t seed = 0;
    std::string generator_id = kDefaultGenerator;

    static constexpr const char* kDefaultGenerator = "mt19937_64-bm-v1";
};

class Rng {
  public:
    explicit Rng(const RngSpec& spec);

    std::uint64_t next_u64() { return eng_(); }
    double uniform01();            // [0, 1)
    double gaussian();             // N(0, 1)
    double sign_pm1();             // +1 or -1 equiprobably
    std::uint64_t bounded(std::uint64_t n);  // [0, n)

  private:
    std::mt19937_64 eng_;
};

// Deterministic seed derivation for independent sub-streams (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

enum class MatrixKind { gaussian, bernoulli };

DenseMatrix gen_matrix(MatrixKind kind, int rows, int cols, const RngSpec& rng);

// v -> D^r v with (Dv)_i = v_i - v_{i-1}, v_0 := 0.  O(r m), no matrix formed.
std::vector<double> apply_D_r(std::vector<double> v, int r);
// v -> D^{-r} v via r nested running sums; exact inverse of apply_D_r.
std::vector<double> apply_Dinv_r(std::vector<double> v, int r);

struct SigmaOptions {
    double rel_tol = 1e-9;  // on the Gram eigenvalue, so sigma is good to ~1e-8 relative
    int max_iters = 200000;
};

// Largest singular value by power iteration on the Gram operator (matrix-free
// products only). Throws NumericError with the iteration count on stagnation
// past max_iters.
double operator_norm(MatView m, const SigmaOptions& opts = {});

// Smallest singular value over the full-rank dimension min(rows, cols):
// the small-side Gram matrix is assembled once, then inverse iteration with
// its Cholesky factor (shifted on breakdown).
double smallest_singular_value(MatView m, const SigmaOptions& opts = {});

// Row-space factorization of a wide matrix W (L x m, L <= m): returns
// orthonormal V (m x L') and singular values s so that ||W g|| = ||diag(s) V^T g||.
// One-sided Jacobi on W^T, so V stays orthonormal even when s spans many
// orders of magnitude. Columns with s_i <= s_max * drop_tol are dropped.
struct RowSpaceFactor {
    DenseMatrix v;          // m x L', columns orthonormal
    std::vector<double> s;  // L' positive singular values, descending
};
RowSpaceFactor row_space_factor(MatView w, double drop_tol = 1e-13);

// Seeded matrix ensemble with prefix-nesting semantics: the m-row sensing
// matrix is the first m rows of the m_max-row draw, and the m-column encoder
// is the first m columns (first l rows) of the L x m_max draw.
struct EnsembleSpec {
    int n = 0;      // signal dimension
    int m_max = 0;  // largest measurement count
    int l = 0;      // encoding dimension
    MatrixKind phi_kind = MatrixKind::gaussian;
    RngSpec phi_seed;
    RngSpec b_seed;
};

struct Ensemble {
    EnsembleSpec spec;
    DenseMatrix phi;  // m_max x n
    DenseMatrix b;    // l x m_max

    MatView phi_rows(int m) const { return phi.top_rows(m); }
    MatView b_cols(int m) const { return b.block(spec.l, m); }
    MatView b_block(int l, int m) const { return b.block(l, m); }
};

Ensemble make_ensemble(const EnsembleSpec& spec);

}  // namespace aic
