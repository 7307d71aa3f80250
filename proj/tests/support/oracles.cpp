#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oracles {

using aic::DenseMatrix;

std::vector<double> jacobi_singular_values(const DenseMatrix& m) {
    const int d = std::min(m.rows, m.cols);
    // Gram of the smaller side.
    DenseMatrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            if (m.rows >= m.cols)
                for (int k = 0; k < m.rows; ++k) s += m(k, i) * m(k, j);
            else
                for (int k = 0; k < m.cols; ++k) s += m(i, k) * m(j, k);
            g(i, j) = s;
        }
    // classical cyclic Jacobi eigenvalue iteration
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d - 1; ++p)
            for (int q = p + 1; q < d; ++q) off += g(p, q) * g(p, q);
        if (off < 1e-26) break;
        for (int p = 0; p < d - 1; ++p) {
            for (int q = p + 1; q < d; ++q) {
                if (g(p, q) == 0.0) continue;
                const double theta = (g(q, q) - g(p, p)) / (2.0 * g(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1 + theta * theta));
                const double c = 1.0 / std::sqrt(1 + t * t), s = c * t;
                for (int k = 0; k < d; ++k) {
                    const double gpk = g(p, k), gqk = g(q, k);
                    g(p, k) = c * gpk - s * gqk;
                    g(q, k) = s * gpk + c * gqk;
                }
                for (int k = 0; k < d; ++k) {
                    const double gkp = g(k, p), gkq = g(k, q);
                    g(k, p) = c * gkp - s * gkq;
                    g(k, q) = s * gkp + c * gkq;
                }
            }
        }
    }
    std::vector<double> vals(d);
    for (int i = 0; i < d; ++i) vals[i] = std::sqrt(std::max(g(i, i), 0.0));
    std::sort(vals.begin(), vals.end(), std::greater<>());
    return vals;
}

DenseMatrix difference_matrix_power(int m, int r) {
    DenseMatrix d(m, m);
    for (int i = 0; i < m; ++i) {
        d(i, i) = 1.0;
        if (i > 0) d(i, i - 1) = -1.0;
    }
    DenseMatrix out = d;
    for (int t = 1; t < r; ++t) {
        DenseMatrix next(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int k = 0; k < m; ++k) s += out(i, k) * d(k, j);
                next(i, j) = s;
            }
        out = next;
    }
    return out;
}

std::vector<double> dense_dinv_apply(int r, const std::vector<double>& v) {
    const int m = static_cast<int>(v.size());
    const DenseMatrix dr = difference_matrix_power(m, r);
    // dr is lower triangular with unit diagonal: forward substitution
    std::vector<double> z = v;
    for (int i = 0; i < m; ++i) {
        double s = z[i];
        for (int j = 0; j < i; ++j) s -= dr(i, j) * z[j];
        z[i] = s;  // dr(i,i) == 1
    }
    return z;
}

namespace {

// coordinate descent for 0.5||Ax-b||^2 + lam||x||_1
void cd_penalized(const DenseMatrix& a, const std::vector<double>& b, double lam,
                  std::vector<double>& x) {
    const int m = a.rows, n = a.cols;
    std::vector<double> colsq(n, 0.0), ax(m, 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) colsq[j] += a(i, j) * a(i, j);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a(i, j) * x[j];
        ax[i] = s;
    }
    for (int sweep = 0; sweep < 40000; ++sweep) {
        double mx = 0.0;
        for (int j = 0; j < n; ++j) {
            if (colsq[j] == 0.0) continue;
            double rho = colsq[j] * x[j];
            for (int i = 0; i < m; ++i) rho += a(i, j) * (b[i] - ax[i]);
            const double xj = (rho > lam ? rho - lam : (rho < -lam ? rho + lam : 0.0)) / colsq[j];
            const double dlt = xj - x[j];
            if (dlt != 0.0) {
                for (int i = 0; i < m; ++i) ax[i] += a(i, j) * dlt;
                x[j] = xj;
                mx = std::max(mx, std::abs(dlt));
            }
        }
        if (mx < 1e-13) break;
    }
}

double residual_norm(const DenseMatrix& a, const std::vector<double>& b,
                     const std::vector<double>& x) {
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i) {
        double r = -b[i];
        for (int j = 0; j < a.cols; ++j) r += a(i, j) * x[j];
        s += r * r;
    }
    return std::sqrt(s);
}

}  // namespace

double l1_ball_objective(const DenseMatrix& a, const std::vector<double>& b, double tau) {
    double nb = 0.0;
    for (double v : b) nb += v * v;
    if (std::sqrt(nb) <= tau) return 0.0;
    double lam_max = 0.0;
    for (int j = 0; j < a.cols; ++j) {
        double s = 0.0;
        for (int i = 0; i < a.rows; ++i) s += a(i, j) * b[i];
        lam_max = std::max(lam_max, std::abs(s));
    }
    std::vector<double> x(a.cols, 0.0);
    double lo = 0.0, hi = lam_max;
    for (int it = 0; it < 100; ++it) {
        const double lam = 0.5 * (lo + hi);
        cd_penalized(a, b, lam, x);
        (residual_norm(a, b, x) > tau ? hi : lo) = lam;
    }
    cd_penalized(a, b, lo, x);
    double obj = 0.0;
    for (double v : x) obj += std::abs(v);
    return obj;
}

std::vector<double> normal_equations_ls(const DenseMatrix& a, const std::vector<double>& b) {
    const int n = a.cols;
    DenseMatrix g(n, n);
    std::vector<double> rhs(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < a.rows; ++k) s += a(k, i) * a(k, j);
            g(i, j) = s;
        }
        for (int k = 0; k < a.rows; ++k) rhs[i] += a(k, i) * b[k];
    }
    // Gaussian elimination with partial pivoting
    std::vector<int> piv(n);
    std::iota(piv.begin(), piv.end(), 0);
    for (int c = 0; c < n; ++c) {
        int best = c;
        for (int rr = c + 1; rr < n; ++rr)
            if (std::abs(g(rr, c)) > std::abs(g(best, c))) best = rr;
        if (best != c) {
            for (int j = 0; j < n; ++j) std::swap(g.a[static_cast<std::size_t>(c) * n + j], g.a[static_cast<std::size_t>(best) * n + j]);
            std::swap(rhs[c], rhs[best]);
        }
        if (g(c, c) == 0.0) throw std::runtime_error("normal_equations_ls: singular system");
        for (int rr = c + 1; rr < n; ++rr) {
            const double f = g(rr, c) / g(c, c);
            for (int j = c; j < n; ++j) g(rr, j) -= f * g(c, j);
            rhs[rr] -= f * rhs[c];
        }
    }
    std::vector<double> z(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int j = i + 1; j < n; ++j) s -= g(i, j) * z[j];
        z[i] = s / g(i, i);
    }
    return z;
}

double brute_force_kterm_l1(const std::vector<double>& x, int k) {
    const int n = static_cast<int>(x.size());
    double total = 0.0;
    for (double v : x) total += std::abs(v);
    if (k == 0) return total;
    double best = total;
    std::vector<int> idx(k);
    // enumerate all supports of size k
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        double kept = 0.0;
        for (int i : idx) kept += std::abs(x[i]);
        best = std::min(best, total - kept);
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == n - k + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return best;
}

}  // namespace oracles
