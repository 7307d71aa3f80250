#include "aic/kernels.hpp"

#include <cassert>
#include <cmath>

namespace aic::kernels {

namespace serial {

void matvec(MatView a, std::span<const double> x, std::span<double> y) {
    assert(static_cast<int>(x.size()) == a.cols && static_cast<int>(y.size()) == a.rows);
    for (int i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += ai[j] * x[j];
        y[i] = s;
    }
}

void matvec_t(MatView a, std::span<const double> x, std::span<double> y) {
    assert(static_cast<int>(x.size()) == a.rows && static_cast<int>(y.size()) == a.cols);
    for (int j = 0; j < a.cols; ++j) y[j] = 0.0;
    for (int i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        const double xi = x[i];
        for (int j = 0; j < a.cols; ++j) y[j] += ai[j] * xi;
    }
}

void gram_tt(MatView a, std::vector<double>& g) {
    const int n = a.cols;
    g.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        for (int j = 0; j < n; ++j) {
            const double aij = ai[j];
            if (aij == 0.0) continue;
            double* gj = g.data() + static_cast<std::size_t>(j) * n;
            for (int k = j; k < n; ++k) gj[k] += aij * ai[k];
        }
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < j; ++k) g[static_cast<std::size_t>(j) * n + k] = g[static_cast<std::size_t>(k) * n + j];
}

}  // namespace serial

void matvec(MatView a, std::span<const double> x, std::span<double> y) {
    assert(static_cast<int>(x.size()) == a.cols && static_cast<int>(y.size()) == a.rows);
#pragma omp parallel for schedule(static) if (a.rows * a.cols > 16384)
    for (int i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += ai[j] * x[j];
        y[i] = s;
    }
}

void matvec_t(MatView a, std::span<const double> x, std::span<double> y) {
    assert(static_cast<int>(x.size()) == a.rows && static_cast<int>(y.size()) == a.cols);
#pragma omp parallel for schedule(static) if (a.rows * a.cols > 16384)
    for (int j = 0; j < a.cols; ++j) {
        double s = 0.0;
        const double* col = a.data + j;
        for (int i = 0; i < a.rows; ++i) s += col[static_cast<std::size_t>(i) * a.stride] * x[i];
        y[j] = s;
    }
}

void gram_tt(MatView a, std::vector<double>& g) {
    const int n = a.cols;
    g.assign(static_cast<std::size_t>(n) * n, 0.0);
#pragma omp parallel for schedule(dynamic, 8) if (n > 64)
    for (int j = 0; j < n; ++j) {
        double* gj = g.data() + static_cast<std::size_t>(j) * n;
        for (int i = 0; i < a.rows; ++i) {
            const double* ai = a.row(i);
            const double aij = ai[j];
            if (aij == 0.0) continue;
            for (int k = j; k < n; ++k) gj[k] += aij * ai[k];
        }
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < j; ++k) g[static_cast<std::size_t>(j) * n + k] = g[static_cast<std::size_t>(k) * n + j];
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double norm_inf(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void prefix_sums(std::span<double> v, int r) {
    for (int t = 0; t < r; ++t) {
        double acc = 0.0;
        for (double& vi : v) {
            acc += vi;
            vi = acc;
        }
    }
}

void suffix_sums(std::span<double> v, int r) {
    for (int t = 0; t < r; ++t) {
        double acc = 0.0;
        for (std::size_t i = v.size(); i-- > 0;) {
            acc += v[i];
            v[i] = acc;
        }
    }
}

void first_differences(std::span<double> v, int r) {
    for (int t = 0; t < r; ++t) {
        double prev = 0.0;
        for (double& vi : v) {
            const double cur = vi;
            vi = cur - prev;
            prev = cur;
        }
    }
}

bool cholesky(std::vector<double>& a, int n) {
    for (int j = 0; j < n; ++j) {
        double* aj = a.data() + static_cast<std::size_t>(j) * n;
        double d = aj[j];
        for (int k = 0; k < j; ++k) d -= aj[k] * aj[k];
        if (!(d > 0.0)) return false;
        const double l = std::sqrt(d);
        aj[j] = l;
        for (int i = j + 1; i < n; ++i) {
            double* ai = a.data() + static_cast<std::size_t>(i) * n;
            double s = ai[j];
            for (int k = 0; k < j; ++k) s -= ai[k] * aj[k];
            ai[j] = s / l;
        }
    }
    return true;
}

void cholesky_solve(const std::vector<double>& chol, int n, std::span<double> b) {
    // forward then backward substitution with the lower factor
    for (int i = 0; i < n; ++i) {
        const double* li = chol.data() + static_cast<std::size_t>(i) * n;
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= li[k] * b[k];
        b[i] = s / li[i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= chol[static_cast<std::size_t>(k) * n + i] * b[k];
        b[i] = s / chol[static_cast<std::size_t>(i) * n + i];
    }
}

}  // namespace aic::kernels
