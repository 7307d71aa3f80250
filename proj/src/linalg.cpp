#include "aic/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace aic {

Rng::Rng(const RngSpec& spec) : eng_(spec.seed) {
    if (spec.generator_id != RngSpec::kDefaultGenerator)
        throw ConfigError("unknown generator id: " + spec.generator_id);
}

double Rng::uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Rng::gaussian() {
    // Box-Muller, cosine branch only: one value per pair of uniforms keeps the
    // stream independent of the caller's draw pattern.
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::sign_pm1() { return (eng_() >> 63) ? 1.0 : -1.0; }

std::uint64_t Rng::bounded(std::uint64_t n) { return n ? eng_() % n : 0; }

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(base ^ splitmix64(a + 0x100)) ^ splitmix64(b + 0x9E37));
}

DenseMatrix gen_matrix(MatrixKind kind, int rows, int cols, const RngSpec& spec) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("gen_matrix: dimensions must be >= 1");
    Rng rng(spec);
    DenseMatrix m(rows, cols);
    if (kind == MatrixKind::gaussian) {
        for (double& v : m.a) v = rng.gaussian();
    } else {
        for (double& v : m.a) v = rng.sign_pm1();
    }
    return m;
}

std::vector<double> apply_D_r(std::vector<double> v, int r) {
    if (r < 1) throw std::invalid_argument("apply_D_r: order must be >= 1");
    kernels::first_differences(v, r);
    return v;
}

std::vector<double> apply_Dinv_r(std::vector<double> v, int r) {
    if (r < 1) throw std::invalid_argument("apply_Dinv_r: order must be >= 1");
    kernels::prefix_sums(v, r);
    return v;
}

namespace {

// Gram of the smaller side: rows >= cols -> M^T M (cols x cols), else M M^T.
std::vector<double> small_gram(MatView m, int& d) {
    std::vector<double> g;
    if (m.rows >= m.cols) {
        d = m.cols;
        kernels::gram_tt(m, g);
    } else {
        d = m.rows;
        g.assign(static_cast<std::size_t>(d) * d, 0.0);
        for (int i = 0; i < d; ++i) {
            const double* ri = m.row(i);
            for (int j = i; j < d; ++j) {
                const double* rj = m.row(j);
                double s = 0.0;
                for (int k = 0; k < m.cols; ++k) s += ri[k] * rj[k];
                g[static_cast<std::size_t>(i) * d + j] = s;
                g[static_cast<std::size_t>(j) * d + i] = s;
            }
        }
    }
    return g;
}

double symvec_rayleigh(const std::vector<double>& g, int d, const std::vector<double>& v) {
    double r = 0.0;
    for (int i = 0; i < d; ++i) {
        const double* gi = g.data() + static_cast<std::size_t>(i) * d;
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += gi[j] * v[j];
        r += v[i] * s;
    }
    return r;
}

}  // namespace

double operator_norm(MatView m, const SigmaOptions& opts) {
    std::vector<double> v(m.cols), av(m.rows), w(m.cols);
    for (int j = 0; j < m.cols; ++j) v[j] = 1.0 + 1e-3 * (j % 7);
    double nv = kernels::nrm2(v);
    for (double& x : v) x /= nv;
    double lam = 0.0, lam_prev = -1.0;
    int stall = 0;
    for (int it = 1; it <= opts.max_iters; ++it) {
        kernels::matvec(m, v, av);
        kernels::matvec_t(m, av, w);
        const double nw = kernels::nrm2(w);
        if (nw == 0.0) return 0.0;
        lam = kernels::dot(v, w);  // Rayleigh quotient of M^T M
        for (int j = 0; j < m.cols; ++j) v[j] = w[j] / nw;
        if (std::abs(lam - lam_prev) <= opts.rel_tol * std::max(lam, 1e-300)) {
            if (++stall >= 3) return std::sqrt(std::max(lam, 0.0));
        } else {
            stall = 0;
        }
        lam_prev = lam;
    }
    throw NumericError("operator_norm: power iteration did not converge after " +
                           std::to_string(opts.max_iters) + " iterations",
                       opts.max_iters);
}

double smallest_singular_value(MatView m, const SigmaOptions& opts) {
    int d = 0;
    std::vector<double> g = small_gram(m, d);
    double gmax = 0.0;
    for (int i = 0; i < d; ++i) gmax = std::max(gmax, g[static_cast<std::size_t>(i) * d + i]);
    if (gmax == 0.0) return 0.0;

    // Cholesky, shifting up on breakdown (numerically rank-deficient Gram).
    std::vector<double> chol = g;
    double shift = 0.0;
    while (!kernels::cholesky(chol, d)) {
        shift = (shift == 0.0) ? gmax * 1e-15 : shift * 32.0;
        if (shift > gmax) return 0.0;
        chol = g;
        for (int i = 0; i < d; ++i) chol[static_cast<std::size_t>(i) * d + i] += shift;
    }

    std::vector<double> v(d);
    for (int i = 0; i < d; ++i) v[i] = 1.0 + 1e-3 * (i % 5);
    double nv = kernels::nrm2(v);
    for (double& x : v) x /= nv;
    double lam = 0.0, lam_prev = -1.0;
    int stall = 0;
    for (int it = 1; it <= opts.max_iters; ++it) {
        kernels::cholesky_solve(chol, d, v);
        const double nw = kernels::nrm2(v);
        for (double& x : v) x /= nw;
        lam = symvec_rayleigh(g, d, v);
        if (std::abs(lam - lam_prev) <= opts.rel_tol * std::max(std::abs(lam), 1e-300)) {
            if (++stall >= 3) return std::sqrt(std::max(lam, 0.0));
        } else {
            stall = 0;
        }
        lam_prev = lam;
    }
    throw NumericError("smallest_singular_value: inverse iteration did not converge after " +
                           std::to_string(opts.max_iters) + " iterations",
                       opts.max_iters);
}

RowSpaceFactor row_space_factor(MatView w, double drop_tol) {
    const int l = w.rows, m = w.cols;
    // Work on X = W^T (m x l, column-major as l contiguous columns of length m).
    std::vector<std::vector<double>> col(l, std::vector<double>(m));
    for (int i = 0; i < l; ++i) {
        const double* ri = w.row(i);
        for (int j = 0; j < m; ++j) col[i][j] = ri[j];
    }

    // One-sided Jacobi: rotate column pairs until all are mutually orthogonal.
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < l - 1; ++p) {
            for (int q = p + 1; q < l; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (int k = 0; k < m; ++k) {
                    app += col[p][k] * col[p][k];
                    aqq += col[q][k] * col[q][k];
                    apq += col[p][k] * col[q][k];
                }
                if (std::abs(apq) <= 1e-28 * std::sqrt(app * aqq) || apq == 0.0) continue;
                off = std::max(off, std::abs(apq) / std::sqrt(std::max(app * aqq, 1e-300)));
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int k = 0; k < m; ++k) {
                    const double xp = col[p][k], xq = col[q][k];
                    col[p][k] = c * xp - s * xq;
                    col[q][k] = s * xp + c * xq;
                }
            }
        }
        if (off < 1e-15) break;
    }

    std::vector<std::pair<double, int>> order(l);
    for (int i = 0; i < l; ++i) order[i] = {kernels::nrm2(col[i]), i};
    std::sort(order.begin(), order.end(), [](auto& a, auto& b) { return a.first > b.first; });
    const double smax = order.empty() ? 0.0 : order[0].first;

    RowSpaceFactor f;
    int keep = 0;
    for (int i = 0; i < l; ++i)
        if (order[i].first > smax * drop_tol) ++keep;
    f.v = DenseMatrix(m, keep);
    f.s.resize(keep);
    for (int i = 0; i < keep; ++i) {
        const double si = order[i].first;
        const auto& ci = col[order[i].second];
        f.s[i] = si;
        for (int k = 0; k < m; ++k) f.v(k, i) = ci[k] / si;
    }
    return f;
}

Ensemble make_ensemble(const EnsembleSpec& spec) {
    if (spec.n < 1 || spec.m_max < 1 || spec.l < 1)
        throw ConfigError("ensemble: n, m_max and l must be >= 1");
    if (spec.l > spec.m_max) throw ConfigError("ensemble: l must not exceed m_max");
    Ensemble e;
    e.spec = spec;
    e.phi = gen_matrix(spec.phi_kind, spec.m_max, spec.n, spec.phi_seed);
    e.b = gen_matrix(MatrixKind::bernoulli, spec.l, spec.m_max, spec.b_seed);
    return e;
}

}  // namespace aic
