// Times the OpenMP kernels against their serial reference twins and a full
// decode at sweep scale. Run with an optional thread count argument.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aic/decode.hpp"
#include "aic/kernels.hpp"
#include "aic/linalg.hpp"
#include "aic/quantize.hpp"
#include "aic/signals.hpp"

using namespace aic;

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (argc > 1) omp_set_num_threads(std::atoi(argv[1]));
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    (void)argc;
    (void)argv;
    std::printf("built without OpenMP; serial only\n");
#endif

    std::printf("%-24s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

    for (int n : {512, 1024, 2048}) {
        const DenseMatrix a = gen_matrix(MatrixKind::gaussian, n, n, RngSpec{17});
        std::vector<double> x(n, 1.0), y(n);
        const int reps = 20;
        const double ts = time_ms([&] { kernels::serial::matvec(a.view(), x, y); }, reps);
        const double tp = time_ms([&] { kernels::matvec(a.view(), x, y); }, reps);
        std::printf("matvec %dx%-12d %10.3f %10.3f %8.2fx\n", n, n, ts, tp, ts / tp);
    }
    for (int n : {512, 1024}) {
        const DenseMatrix a = gen_matrix(MatrixKind::gaussian, n, n / 2, RngSpec{18});
        std::vector<double> g;
        const double ts = time_ms([&] { kernels::serial::gram_tt(a.view(), g); }, 3);
        const double tp = time_ms([&] { kernels::gram_tt(a.view(), g); }, 3);
        std::printf("gram %dx%-14d %10.3f %10.3f %8.2fx\n", n, n / 2, ts, tp, ts / tp);
    }

    // one full decode at sweep scale
    {
        const int n = 400, m = 1000, l = 120, r = 2;
        EnsembleSpec es{n, m, l, MatrixKind::gaussian, RngSpec{5}, RngSpec{6}};
        const Ensemble ens = make_ensemble(es);
        SparseSpec ss{n, 5, NonzeroDist::standard_normal, RngSpec{7}};
        std::vector<double> x = gen_sparse(ss);
        ScaledSignal sc = scale_to_mu(ens.phi_rows(m), x, 0.7);
        std::vector<double> y(m);
        kernels::matvec(ens.phi_rows(m), sc.x, y);
        const MidriseAlphabet alphabet{20, 0.1};
        QuantizationRun run = sd_greedy(y, alphabet, r);
        const double td = time_ms(
            [&] {
                DecodeResult res = decode_noiseless(ens.phi_rows(m), ens.b_cols(m), run.q, r, run.gamma);
                if (res.x_hat.empty()) std::abort();
            },
            1);
        std::printf("decode m=%d N=%d L=%-6d %21.1f ms\n", m, n, l, td);
    }
    return 0;
}
