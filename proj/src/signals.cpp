#include "aic/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aic {

std::vector<double> gen_sparse(const SparseSpec& spec) {
    if (spec.n < 0 || spec.k < 0 || spec.k > spec.n)
        throw std::invalid_argument("gen_sparse: need 0 <= k <= n");
    Rng rng(spec.seed);
    // partial Fisher-Yates picks the support uniformly
    std::vector<int> idx(spec.n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < spec.k; ++i) {
        const int j = i + static_cast<int>(rng.bounded(spec.n - i));
        std::swap(idx[i], idx[j]);
    }
    std::vector<double> x(spec.n, 0.0);
    for (int i = 0; i < spec.k; ++i)
        x[idx[i]] = spec.nonzero_dist == NonzeroDist::standard_normal ? rng.gaussian() : 1.0;
    return x;
}

std::vector<double> gen_wlp(const WlpSpec& spec) {
    if (!(spec.p > 0.0 && spec.p < 2.0)) throw std::invalid_argument("gen_wlp: need p in (0, 2)");
    if (spec.n < 0 || spec.radius <= 0.0) throw std::invalid_argument("gen_wlp: bad n or radius");
    Rng rng(spec.seed);
    std::vector<double> x(spec.n);
    for (int j = 0; j < spec.n; ++j)
        x[j] = rng.sign_pm1() * spec.radius * std::pow(static_cast<double>(j + 1), -1.0 / spec.p);
    for (int i = spec.n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(i) + 1));
        std::swap(x[i], x[j]);
    }
    return x;
}

double best_kterm_error_l1(std::span<const double> x, int k) {
    const int n = static_cast<int>(x.size());
    if (k < 0 || k > n) throw std::invalid_argument("best_kterm_error_l1: need 0 <= k <= n");
    if (k == n) return 0.0;
    std::vector<double> mags(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mags[i] = std::abs(x[i]);
    std::nth_element(mags.begin(), mags.begin() + (n - k), mags.end());
    double s = 0.0;
    for (int i = 0; i < n - k; ++i) s += mags[i];
    return s;
}

ScaledSignal scale_to_mu(MatView phi, std::span<const double> x, double mu) {
    std::vector<double> y(phi.rows);
    kernels::matvec(phi, x, y);
    const double ymax = kernels::norm_inf(y);
    ScaledSignal out;
    out.x.assign(x.begin(), x.end());
    if (ymax > mu && ymax > 0.0) {
        out.scale = mu / ymax;
        for (double& v : out.x) v *= out.scale;
    }
    return out;
}

Measurement measure(MatView phi, std::span<const double> x, const MeasurementSpec& spec) {
    if (spec.epsilon < 0.0) throw std::invalid_argument("measure: epsilon must be >= 0");
    Measurement out;
    out.y.resize(phi.rows);
    kernels::matvec(phi, x, out.y);
    out.e.assign(phi.rows, 0.0);
    if (spec.noise_dist != NoiseDist::none && spec.epsilon > 0.0) {
        Rng rng(spec.seed);
        for (double& ei : out.e) {
            if (spec.noise_dist == NoiseDist::uniform) {
                ei = spec.epsilon * (2.0 * rng.uniform01() - 1.0);
            } else {
                ei = std::clamp(rng.gaussian() * spec.epsilon / 3.0, -spec.epsilon, spec.epsilon);
            }
        }
        for (std::size_t i = 0; i < out.y.size(); ++i) out.y[i] += out.e[i];
    }
    return out;
}

}  // namespace aic
