#include "aic/decode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aic/encode.hpp"

namespace aic {

LinOp make_linop(MatView a) {
    LinOp op;
    op.rows = a.rows;
    op.cols = a.cols;
    op.apply = [a](std::span<const double> x, std::span<double> y) { kernels::matvec(a, x, y); };
    op.apply_t = [a](std::span<const double> x, std::span<double> y) { kernels::matvec_t(a, x, y); };
    return op;
}

LinOp compose_encoder_op(MatView b, int r, MatView phi) {
    LinOp op;
    op.rows = b.rows;
    op.cols = phi.cols;
    op.apply = [b, r, phi](std::span<const double> x, std::span<double> y) {
        std::vector<double> t(phi.rows);
        kernels::matvec(phi, x, t);
        kernels::prefix_sums(t, r);
        kernels::matvec(b, t, y);
    };
    op.apply_t = [b, r, phi](std::span<const double> x, std::span<double> y) {
        std::vector<double> t(phi.rows);
        kernels::matvec_t(b, x, t);
        kernels::suffix_sums(t, r);  // (D^{-r})^T = r-fold suffix sums
        kernels::matvec_t(phi, t, y);
    };
    return op;
}

namespace {

using std::span;
using std::vector;

using ApplyFn = std::function<void(span<const double>, span<double>)>;

double op_norm_est(const ApplyFn& apply, const ApplyFn& apply_t, int rows, int cols,
                   int iters = 60) {
    vector<double> v(cols), av(rows), w(cols);
    for (int j = 0; j < cols; ++j) v[j] = 1.0 + 1e-3 * (j % 7);
    double nv = kernels::nrm2(v);
    for (double& x : v) x /= nv;
    double lam = 0.0;
    for (int it = 0; it < iters; ++it) {
        apply(v, av);
        apply_t(av, w);
        const double nw = kernels::nrm2(w);
        if (nw == 0.0) return 0.0;
        lam = nw;
        for (int j = 0; j < cols; ++j) v[j] = w[j] / nw;
    }
    return std::sqrt(lam);
}

// Constraint on the measurement split g:
//   with V:  || diag(s) V^T (g - center) || <= tau   (V orthonormal, m x L')
//   plain:   || g - center || <= tau
struct ConstraintSet {
    const DenseMatrix* v = nullptr;
    vector<double> s;
    vector<double> center;
    double tau = 0.0;

    double violation(span<const double> g) const {
        vector<double> d(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) d[i] = g[i] - center[i];
        double val;
        if (!v) {
            val = kernels::nrm2(d);
        } else {
            vector<double> a(v->cols);
            kernels::matvec_t(v->view(), d, a);
            double acc = 0.0;
            for (int i = 0; i < v->cols; ++i) acc += (s[i] * a[i]) * (s[i] * a[i]);
            val = std::sqrt(acc);
        }
        return std::max(0.0, val - tau);
    }

    void project(span<double> g) const {
        vector<double> d(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) d[i] = g[i] - center[i];
        if (!v) {
            const double nd = kernels::nrm2(d);
            if (nd <= tau) return;
            const double sc = (nd > 0.0) ? tau / nd : 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) g[i] = center[i] + sc * d[i];
            return;
        }
        vector<double> a(v->cols);
        kernels::matvec_t(v->view(), d, a);
        double val = 0.0;
        for (int i = 0; i < v->cols; ++i) val += (s[i] * a[i]) * (s[i] * a[i]);
        if (std::sqrt(val) <= tau) return;
        vector<double> anew(v->cols);
        if (tau <= 0.0) {
            std::fill(anew.begin(), anew.end(), 0.0);
        } else {
            // root of sum (s_i a_i / (1 + nu s_i^2))^2 = tau^2 in nu, monotone
            const double smax = *std::max_element(s.begin(), s.end());
            auto f = [&](double nu) {
                double acc = 0.0;
                for (int i = 0; i < v->cols; ++i) {
                    const double t = s[i] * a[i] / (1.0 + nu * s[i] * s[i]);
                    acc += t * t;
                }
                return acc - tau * tau;
            };
            double lo = 0.0, hi = 1.0 / (smax * smax);
            while (f(hi) > 0.0) hi *= 4.0;
            for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (f(mid) > 0.0 ? lo : hi) = mid;
            }
            const double nu = 0.5 * (lo + hi);
            for (int i = 0; i < v->cols; ++i) anew[i] = a[i] / (1.0 + nu * s[i] * s[i]);
        }
        for (int i = 0; i < v->cols; ++i) anew[i] -= a[i];
        vector<double> corr(g.size());
        kernels::matvec(v->view(), anew, corr);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += corr[i];
    }
};

struct MeasureOp {
    int rows = 0, cols = 0;
    ApplyFn apply, apply_t;
    vector<double> gram;  // A^T A, cols x cols

    void build_gram_via_products() {
        gram.assign(static_cast<std::size_t>(cols) * cols, 0.0);
        vector<double> e(cols, 0.0), col(rows), back(cols);
        for (int j = 0; j < cols; ++j) {
            e[j] = 1.0;
            apply(e, col);
            apply_t(col, back);
            for (int i = 0; i < cols; ++i) gram[static_cast<std::size_t>(i) * cols + j] = back[i];
            e[j] = 0.0;
        }
    }
};

MeasureOp measure_op_from_view(MatView a) {
    MeasureOp op;
    op.rows = a.rows;
    op.cols = a.cols;
    op.apply = [a](span<const double> x, span<double> y) { kernels::matvec(a, x, y); };
    op.apply_t = [a](span<const double> x, span<double> y) { kernels::matvec_t(a, x, y); };
    kernels::gram_tt(a, op.gram);
    return op;
}

// Rescale the measurement operator to unit norm so the splitting behaves
// identically under (cA, cb, c tau) and the penalty defaults transfer across
// problem sizes. The constraint set is rescaled to match.
double normalize_problem(MeasureOp& op, ConstraintSet& cset, double* re) {
    const double s = op_norm_est(op.apply, op.apply_t, op.rows, op.cols);
    if (s <= 0.0) return 1.0;
    const ApplyFn fwd = op.apply, bwd = op.apply_t;
    op.apply = [fwd, s](span<const double> x, span<double> y) {
        fwd(x, y);
        for (auto& v : y) v /= s;
    };
    op.apply_t = [bwd, s](span<const double> x, span<double> y) {
        bwd(x, y);
        for (auto& v : y) v /= s;
    };
    for (auto& v : op.gram) v /= s * s;
    for (auto& v : cset.center) v /= s;
    if (cset.v)
        for (auto& sv : cset.s) sv *= s;  // shaped radius is scale-free
    else
        cset.tau /= s;
    if (re) *re /= s;
    return s;
}

struct CoreResult {
    vector<double> x, e;
    double objective = 0.0;
    double feas = 0.0;
    long iterations = 0;
    SolveStatus status = SolveStatus::iteration_cap;
};

// min ||v||_1 + ind_C(g) + ind_{||e||<=re}(e)  s.t.  phi x + e' = g, x = v,
// e' = e. The (x, e') block is a cached Cholesky solve; C's projection is
// exact, which is what keeps the iteration count flat across the encoder
// operator's conditioning.
CoreResult admm_core(const MeasureOp& phi, const ConstraintSet& cset, double re, bool with_e,
                     const SolverOptions& opts, double feas_scale, double slack_unscale) {
    const int m = phi.rows, n = phi.cols;
    const double rho1 = opts.rho_measure, rho2 = opts.rho_consensus, rho3 = opts.rho_measure;
    const double orel = opts.over_relax;
    const double cxx = with_e ? rho1 * rho3 / (rho1 + rho3) : rho1;

    vector<double> sys = phi.gram;
    for (double& vv : sys) vv *= cxx;
    for (int i = 0; i < n; ++i) sys[static_cast<std::size_t>(i) * n + i] += rho2;
    if (!kernels::cholesky(sys, n))
        throw NumericError("decode: normal-equations factorization failed");

    vector<double> x(n, 0.0), v(n, 0.0), g(cset.center), e(m, 0.0), ep(m, 0.0);
    vector<double> w1(m, 0.0), w2(n, 0.0), w3(m, 0.0);
    vector<double> rhs(n), px(m), t1(m), t3(m), gv(m), objh;
    objh.reserve(256);


    CoreResult out;
    int k = 0;
    for (; k < opts.max_iters; ++k) {
        for (int i = 0; i < m; ++i) t1[i] = g[i] - w1[i];
        if (with_e) {
            for (int i = 0; i < m; ++i) t3[i] = e[i] - w3[i];
            for (int i = 0; i < m; ++i) px[i] = t1[i] - t3[i];
            phi.apply_t(px, rhs);
            for (int i = 0; i < n; ++i) rhs[i] = cxx * rhs[i] + rho2 * (v[i] - w2[i]);
        } else {
            phi.apply_t(t1, rhs);
            for (int i = 0; i < n; ++i) rhs[i] = rho1 * rhs[i] + rho2 * (v[i] - w2[i]);
        }
        kernels::cholesky_solve(sys, n, rhs);
        x.swap(rhs);
        phi.apply(x, px);
        if (with_e)
            for (int i = 0; i < m; ++i)
                ep[i] = (rho1 * (t1[i] - px[i]) + rho3 * t3[i]) / (rho1 + rho3);

        for (int i = 0; i < m; ++i) {
            const double pe = px[i] + (with_e ? ep[i] : 0.0);
            gv[i] = orel * pe + (1.0 - orel) * g[i] + w1[i];
        }
        g.assign(gv.begin(), gv.end());
        cset.project(g);
        for (int i = 0; i < m; ++i) w1[i] = gv[i] - g[i];

        const double thresh = 1.0 / rho2;
        double obj = 0.0;
        for (int i = 0; i < n; ++i) {
            const double xr = orel * x[i] + (1.0 - orel) * v[i];
            const double t = xr + w2[i];
            const double vn = (t > thresh) ? t - thresh : (t < -thresh ? t + thresh : 0.0);
            w2[i] = t - vn;
            v[i] = vn;
            obj += std::abs(vn);
        }
        if (with_e) {
            for (int i = 0; i < m; ++i) t3[i] = orel * ep[i] + (1.0 - orel) * e[i] + w3[i];
            const double ne = kernels::nrm2(t3);
            const double sc = (re <= 0.0) ? 0.0 : (ne > re ? re / ne : 1.0);
            for (int i = 0; i < m; ++i) {
                e[i] = sc * t3[i];
                w3[i] = t3[i] - e[i];
            }
        }
        objh.push_back(obj);

        if ((k + 1) % 10 == 0) {
            phi.apply(v, px);
            if (with_e)
                for (int i = 0; i < m; ++i) px[i] += e[i];
            const double feas = cset.violation(px) * slack_unscale / feas_scale;
            const bool gap_ok = static_cast<int>(objh.size()) > opts.window &&
                                std::abs(objh.back() - objh[objh.size() - 1 - opts.window]) <=
                                    opts.tol_gap * std::max(1.0, objh.back());
            if (feas <= opts.tol_feas && gap_ok) {
                out.status = SolveStatus::converged;
                out.iterations = k + 1;
                out.feas = feas;
                break;
            }
        }
    }
    if (out.status != SolveStatus::converged) {
        out.iterations = opts.max_iters;
        phi.apply(v, px);
        if (with_e)
            for (int i = 0; i < m; ++i) px[i] += e[i];
        out.feas = cset.violation(px) * slack_unscale / feas_scale;
    }
    out.x = std::move(v);
    out.e = std::move(e);
    out.objective = std::accumulate(out.x.begin(), out.x.end(), 0.0,
                                    [](double a, double b) { return a + std::abs(b); });
    return out;
}

DecodeResult finish(CoreResult&& core, bool keep_e = false) {
    DecodeResult r;
    r.x_hat = std::move(core.x);
    if (keep_e) r.e_hat = std::move(core.e);
    r.objective = core.objective;
    r.feas_residual = core.feas;
    r.iterations = core.iterations;
    r.status = core.status;
    r.converged = core.status == SolveStatus::converged;
    return r;
}

DecodeResult decode_shaped_center(MatView phi, const RowSpaceFactor& fac,
                                  std::vector<double> center, double tau, double re, bool with_e,
                                  const SolverOptions& opts) {
    ConstraintSet cset;
    cset.v = &fac.v;
    cset.s = fac.s;
    cset.center = std::move(center);
    cset.tau = tau;
    MeasureOp mop = measure_op_from_view(phi);
    // scale of the shaped operator diag(s) V^T phi, for feasibility reporting
    const MatView vview = fac.v.view();
    const auto& svals = fac.s;
    ApplyFn fwd = [phi, vview, &svals](span<const double> xx, span<double> yy) {
        std::vector<double> t(phi.rows);
        kernels::matvec(phi, xx, t);
        kernels::matvec_t(vview, t, yy);
        for (int i = 0; i < vview.cols; ++i) yy[i] *= svals[i];
    };
    ApplyFn bwd = [phi, vview, &svals](span<const double> yy, span<double> xx) {
        std::vector<double> a(vview.cols);
        for (int i = 0; i < vview.cols; ++i) a[i] = yy[i] * svals[i];
        std::vector<double> t(phi.rows);
        kernels::matvec(vview, a, t);
        kernels::matvec_t(phi, t, xx);
    };
    const double opn = op_norm_est(fwd, bwd, vview.cols, phi.cols);
    const double feas_scale = 1.0 + tau + opn;
    const double s_phi = normalize_problem(mop, cset, &re);
    DecodeResult res = finish(admm_core(mop, cset, re, with_e, opts, feas_scale, 1.0), with_e);
    for (auto& v : res.e_hat) v *= s_phi;  // e was solved in normalized units
    return res;
}

DecodeResult decode_shaped(MatView phi, MatView b, span<const double> q, int r, double tau,
                           double re, bool with_e, const SolverOptions& opts) {
    if (static_cast<int>(q.size()) != phi.rows || b.cols != phi.rows)
        throw std::invalid_argument("decode: dimension mismatch between phi, b and q");
    const DenseMatrix w = encoder_matrix(b, r);
    const RowSpaceFactor fac = row_space_factor(w.view());
    return decode_shaped_center(phi, fac, std::vector<double>(q.begin(), q.end()), tau, re, with_e,
                                opts);
}

// Least squares by Householder QR with column pivoting; throws on rank loss.
vector<double> qrcp_solve(DenseMatrix a, vector<double> rhs) {
    const int m = a.rows, n = a.cols;
    vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    double r11 = 0.0;
    for (int kcol = 0; kcol < n; ++kcol) {
        int piv = kcol;
        double best = -1.0;
        for (int j = kcol; j < n; ++j) {
            double cn = 0.0;
            for (int i = kcol; i < m; ++i) cn += a(i, j) * a(i, j);
            if (cn > best) {
                best = cn;
                piv = j;
            }
        }
        if (piv != kcol) {
            for (int i = 0; i < m; ++i) std::swap(a(i, kcol), a(i, piv));
            std::swap(perm[kcol], perm[piv]);
        }
        const double nrm = std::sqrt(std::max(best, 0.0));
        if (kcol == 0) r11 = nrm;
        if (nrm <= std::max(m, n) * 1e-13 * std::max(r11, 1e-300))
            throw NumericError("two-stage decode: rank-deficient support columns");
        const double alpha = a(kcol, kcol) >= 0 ? -nrm : nrm;
        vector<double> hv(m - kcol);
        hv[0] = a(kcol, kcol) - alpha;
        for (int i = kcol + 1; i < m; ++i) hv[i - kcol] = a(i, kcol);
        const double hnorm2 = kernels::dot(hv, hv);
        a(kcol, kcol) = alpha;
        for (int i = kcol + 1; i < m; ++i) a(i, kcol) = 0.0;
        if (hnorm2 > 0.0) {
            for (int j = kcol + 1; j < n; ++j) {
                double s = 0.0;
                for (int i = kcol; i < m; ++i) s += hv[i - kcol] * a(i, j);
                s = 2.0 * s / hnorm2;
                for (int i = kcol; i < m; ++i) a(i, j) -= s * hv[i - kcol];
            }
            double s = 0.0;
            for (int i = kcol; i < m; ++i) s += hv[i - kcol] * rhs[i];
            s = 2.0 * s / hnorm2;
            for (int i = kcol; i < m; ++i) rhs[i] -= s * hv[i - kcol];
        }
    }

    vector<double> z(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * z[j];
        z[i] = s / a(i, i);
    }
    vector<double> out(n);
    for (int j = 0; j < n; ++j) out[perm[j]] = z[j];
    return out;
}

}  // namespace

DecodeResult solve_ball_l1(const LinOp& a, span<const double> b, double tau,
                           const SolverOptions& opts) {
    if (tau < 0.0) throw std::invalid_argument("solve_ball_l1: tau must be >= 0");
    if (static_cast<int>(b.size()) != a.rows)
        throw std::invalid_argument("solve_ball_l1: bad b length");
    MeasureOp mop;
    mop.rows = a.rows;
    mop.cols = a.cols;
    mop.apply = a.apply;
    mop.apply_t = a.apply_t;
    mop.build_gram_via_products();

    // Exact infeasibility test: tau below the distance of b to range(A).
    {
        vector<double> atb(a.cols);
        a.apply_t(b, atb);
        vector<double> reg = mop.gram;
        double tr = 0.0;
        for (int i = 0; i < a.cols; ++i) tr += reg[static_cast<std::size_t>(i) * a.cols + i];
        const double jitter = std::max(tr, 1.0) * 1e-12;
        for (int i = 0; i < a.cols; ++i) reg[static_cast<std::size_t>(i) * a.cols + i] += jitter;
        if (kernels::cholesky(reg, a.cols)) {
            vector<double> z = atb;
            kernels::cholesky_solve(reg, a.cols, z);
            const double dist2 = kernels::dot(b, b) - kernels::dot(atb, z);
            // the ridge jitter inflates the distance slightly, so only a
            // clear-cut gap counts as infeasible; borderline cases fall
            // through to the iterations
            const double margin = 1e-5 * (1.0 + kernels::nrm2(b));
            if (dist2 > 0.0 && std::sqrt(std::max(dist2, 0.0)) > tau + margin) {
                DecodeResult r;
                r.x_hat.assign(a.cols, 0.0);
                r.status = SolveStatus::infeasible;
                r.feas_residual = std::sqrt(dist2) - tau;
                return r;
            }
        }
    }

    ConstraintSet cset;
    cset.center.assign(b.begin(), b.end());
    cset.tau = tau;
    const double opn = op_norm_est(a.apply, a.apply_t, a.rows, a.cols);
    const double s_phi = normalize_problem(mop, cset, nullptr);
    return finish(admm_core(mop, cset, 0.0, false, opts, 1.0 + tau + opn, s_phi));
}

DecodeResult decode_noiseless(MatView phi, MatView b, span<const double> q, int r, double c,
                              const SolverOptions& opts) {
    return decode_shaped(phi, b, q, r, 3.0 * c * phi.rows, 0.0, false, opts);
}

DecodeResult decode_first_order(MatView phi, MatView b, span<const double> q, int r, double gamma,
                                double eta, const SolverOptions& opts) {
    const double tau = (2.0 + eta) * gamma * std::sqrt(static_cast<double>(phi.rows) * b.rows);
    return decode_shaped(phi, b, q, r, tau, 0.0, false, opts);
}

DecodeResult decode_noisy(MatView phi, MatView b, span<const double> q, int r, double c, double eps,
                          NoisyTauPolicy policy, const SolverOptions& opts) {
    if (eps < 0.0) throw std::invalid_argument("decode_noisy: eps must be >= 0");
    const int m = phi.rows;
    const double tau_u = policy == NoisyTauPolicy::uniform
                             ? 3.0 * c * m
                             : 2.0 * c * std::sqrt(static_cast<double>(b.rows) * m);
    const double re = std::sqrt(static_cast<double>(m)) * eps;
    DecodeResult res = decode_shaped(phi, b, q, r, tau_u, re, true, opts);

    // least-norm u with B u = B D^{-r}(phi x_hat + e_hat - q)
    vector<double> h(m);
    kernels::matvec(phi, res.x_hat, h);
    for (int i = 0; i < m; ++i) h[i] += res.e_hat[i] - q[i];
    kernels::prefix_sums(h, r);
    vector<double> img(b.rows);
    kernels::matvec(b, h, img);
    vector<double> bbt(static_cast<std::size_t>(b.rows) * b.rows);
    for (int i = 0; i < b.rows; ++i) {
        const double* ri = b.row(i);
        for (int j = i; j < b.rows; ++j) {
            const double* rj = b.row(j);
            double s = 0.0;
            for (int kk = 0; kk < b.cols; ++kk) s += ri[kk] * rj[kk];
            bbt[static_cast<std::size_t>(i) * b.rows + j] = s;
            bbt[static_cast<std::size_t>(j) * b.rows + i] = s;
        }
    }
    if (kernels::cholesky(bbt, b.rows)) {
        kernels::cholesky_solve(bbt, b.rows, img);
        res.u_hat.assign(m, 0.0);
        kernels::matvec_t(b, img, res.u_hat);
    }
    return res;
}

DecodeResult decode_msq_bpdn(MatView phi, span<const double> q, double delta,
                             const SolverOptions& opts) {
    if (static_cast<int>(q.size()) != phi.rows)
        throw std::invalid_argument("decode_msq_bpdn: bad q length");
    MeasureOp mop = measure_op_from_view(phi);
    ConstraintSet cset;
    cset.center.assign(q.begin(), q.end());
    cset.tau = delta * std::sqrt(static_cast<double>(phi.rows)) / 2.0;
    const double opn = op_norm_est(mop.apply, mop.apply_t, phi.rows, phi.cols);
    const double tau_raw = cset.tau;
    const double s_phi = normalize_problem(mop, cset, nullptr);
    return finish(admm_core(mop, cset, 0.0, false, opts, 1.0 + tau_raw + opn, s_phi));
}

DecodeResult decode_codeword(MatView phi, MatView b, const Codeword& cw, CodewordDecoder which,
                             double c_const, double eps, const SolverOptions& opts) {
    if (cw.m != phi.rows || cw.l > b.rows || cw.m > b.cols)
        throw std::invalid_argument("decode_codeword: codeword does not match phi/b dimensions");
    const MatView bview{b.data, cw.l, cw.m, b.stride};
    const DenseMatrix w = encoder_matrix(bview, cw.r);
    const RowSpaceFactor fac = row_space_factor(w.view());

    // split c into its row-space coordinates and the orthogonal remainder
    vector<double> wtc(cw.m, 0.0);
    kernels::matvec_t(w.view(), cw.values, wtc);
    vector<double> beta(fac.v.cols);
    kernels::matvec_t(fac.v.view(), wtc, beta);
    double beta2 = 0.0;
    for (int i = 0; i < fac.v.cols; ++i) {
        beta[i] /= fac.s[i];
        beta2 += beta[i] * beta[i];
    }
    const double cperp2 = std::max(0.0, kernels::dot(cw.values, cw.values) - beta2);

    const int m = cw.m;
    double tau = 0.0;
    switch (which) {
        case CodewordDecoder::noiseless:
        case CodewordDecoder::noisy:
            tau = 3.0 * c_const * m;
            break;
        case CodewordDecoder::first_order:
            tau = 3.0 * c_const * std::sqrt(static_cast<double>(m) * cw.l);
            break;
        case CodewordDecoder::non_uniform:
            tau = 2.0 * c_const * std::sqrt(static_cast<double>(m) * cw.l);
            break;
    }
    if (cperp2 >= tau * tau) {
        DecodeResult r;
        r.x_hat.assign(phi.cols, 0.0);
        r.status = SolveStatus::infeasible;
        r.feas_residual = std::sqrt(cperp2) - tau;
        return r;
    }
    const double tau_eff = std::sqrt(tau * tau - cperp2);

    // least-norm preimage of the row-space part of c
    vector<double> coef(fac.v.cols);
    for (int i = 0; i < fac.v.cols; ++i) coef[i] = beta[i] / fac.s[i];
    vector<double> center(m);
    kernels::matvec(fac.v.view(), coef, center);

    const bool with_e = which == CodewordDecoder::noisy || which == CodewordDecoder::non_uniform;
    const double re = with_e ? std::sqrt(static_cast<double>(m)) * eps : 0.0;
    return decode_shaped_center(phi, fac, std::move(center), tau_eff, re, with_e, opts);
}

DecodeResult decode_two_stage_sobolev(MatView phi, span<const double> q, int r, int k, double delta,
                                      const SolverOptions& opts) {
    if (k < 1 || k > phi.cols) throw std::invalid_argument("two-stage decode: need 1 <= k <= N");
    if (static_cast<int>(q.size()) != phi.rows)
        throw std::invalid_argument("two-stage decode: bad q length");
    DecodeResult stage1 = decode_msq_bpdn(phi, q, delta, opts);

    vector<int> order(phi.cols);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int ia, int ib) {
        return std::abs(stage1.x_hat[ia]) > std::abs(stage1.x_hat[ib]);
    });

    DenseMatrix g(phi.rows, k);
    vector<double> col(phi.rows);
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < phi.rows; ++i) col[i] = phi.at(i, order[j]);
        kernels::prefix_sums(col, r);  // D^{-r} of each support column
        for (int i = 0; i < phi.rows; ++i) g(i, j) = col[i];
    }
    vector<double> rhs(q.begin(), q.end());
    kernels::prefix_sums(rhs, r);
    vector<double> z = qrcp_solve(std::move(g), std::move(rhs));

    DecodeResult res;
    res.x_hat.assign(phi.cols, 0.0);
    for (int j = 0; j < k; ++j) res.x_hat[order[j]] = z[j];
    res.objective = std::accumulate(res.x_hat.begin(), res.x_hat.end(), 0.0,
                                    [](double a, double b) { return a + std::abs(b); });
    res.converged = true;
    res.status = SolveStatus::converged;
    res.iterations = stage1.iterations;
    res.feas_residual = stage1.feas_residual;
    return res;
}

}  // namespace aic
