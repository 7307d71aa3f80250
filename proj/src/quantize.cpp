#include "aic/quantize.hpp"

#include <cmath>
#include <stdexcept>

#include "aic/kernels.hpp"

namespace aic {

double scalar_quantize(double z, const MidriseAlphabet& a) {
    // Cells are [n*delta, (n+1)*delta) with level (n + 1/2)*delta, so a cell
    // boundary (tie) falls to the upper level via floor.
    double n = std::floor(z / a.delta);
    const double lo = -static_cast<double>(a.levels);
    const double hi = static_cast<double>(a.levels) - 1.0;
    if (n < lo) n = lo;
    if (n > hi) n = hi;
    return (n + 0.5) * a.delta;
}

QuantizationRun msq(std::span<const double> y, const MidriseAlphabet& a) {
    QuantizationRun run;
    run.r = 0;
    run.gamma = a.delta / 2.0;
    run.q.resize(y.size());
    run.u.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        run.q[i] = scalar_quantize(y[i], a);
        run.u[i] = y[i] - run.q[i];
    }
    run.y_max = kernels::norm_inf(y);
    run.stable = run.y_max <= a.levels * a.delta;
    return run;
}

QuantizationRun sd_greedy(std::span<const double> y, const MidriseAlphabet& a, int r) {
    if (r < 1) throw std::invalid_argument("sd_greedy: order must be >= 1");
    QuantizationRun run;
    run.r = r;
    run.gamma = a.delta / 2.0;
    const std::size_t m = y.size();
    run.q.resize(m);
    run.u.assign(m + r, 0.0);  // leading r zeros stand in for u_i, i <= 0

    std::vector<double> coeff(r);  // (-1)^{j-1} C(r, j)
    double binom = 1.0;
    for (int j = 1; j <= r; ++j) {
        binom = binom * (r - j + 1) / j;
        coeff[j - 1] = (j % 2 == 1 ? binom : -binom);
    }

    for (std::size_t i = 0; i < m; ++i) {
        double w = y[i];
        for (int j = 1; j <= r; ++j) w += coeff[j - 1] * run.u[i + r - j];
        run.q[i] = scalar_quantize(w, a);
        run.u[i + r] = w - run.q[i];
    }
    run.u.erase(run.u.begin(), run.u.begin() + r);
    run.y_max = kernels::norm_inf(y);
    run.stable = kernels::norm_inf(run.u) <= a.delta / 2.0;
    return run;
}

int min_levels_for_stability(double beta, double delta, int r) {
    if (beta < 0.0 || delta <= 0.0) throw std::invalid_argument("min_levels_for_stability: need beta >= 0 and delta > 0");
    if (r < 1) throw std::invalid_argument("min_levels_for_stability: order must be >= 1");
    return 2 * static_cast<int>(std::ceil(beta / delta)) + (1 << r) + 1;
}

}  // namespace aic
