#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "aic/signals.hpp"
#include "support/oracles.hpp"

using namespace aic;

TEST_CASE("sparse draws hit the requested support size") {
    CHECK(gen_sparse({5, 0, NonzeroDist::standard_normal, RngSpec{1}}) == std::vector<double>(5, 0.0));
    const auto dense = gen_sparse({5, 5, NonzeroDist::standard_normal, RngSpec{2}});
    CHECK(std::count_if(dense.begin(), dense.end(), [](double v) { return v != 0.0; }) == 5);
    for (int t = 0; t < 50; ++t) {
        const auto x = gen_sparse({40, 7, NonzeroDist::standard_normal, RngSpec{100 + static_cast<std::uint64_t>(t)}});
        CHECK(std::count_if(x.begin(), x.end(), [](double v) { return v != 0.0; }) == 7);
    }
    CHECK_THROWS_AS(gen_sparse({4, 5, NonzeroDist::unit, RngSpec{1}}), std::invalid_argument);
}

TEST_CASE("support histogram is roughly uniform") {
    // chi^2 over N=8 cells with k=2 picks per draw, 1e4 draws; 1% critical
    // value for 7 degrees of freedom is 18.475
    const int n = 8, k = 2, draws = 10000;
    std::vector<int> counts(n, 0);
    for (int t = 0; t < draws; ++t) {
        const auto x = gen_sparse({n, k, NonzeroDist::unit, RngSpec{40000 + static_cast<std::uint64_t>(t)}});
        for (int i = 0; i < n; ++i)
            if (x[i] != 0.0) ++counts[i];
    }
    const double expected = static_cast<double>(draws) * k / n;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 18.475);
}

TEST_CASE("wlp draws sit exactly on the ball boundary") {
    const auto x = gen_wlp({3, 1.0, 1.0, RngSpec{5}});
    std::vector<double> mags(3);
    for (int i = 0; i < 3; ++i) mags[i] = std::abs(x[i]);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    CHECK(mags[0] == doctest::Approx(1.0));
    CHECK(mags[1] == doctest::Approx(0.5));
    CHECK(mags[2] == doctest::Approx(1.0 / 3.0));

    for (int t = 0; t < 20; ++t) {
        const auto v = gen_wlp({30, 0.7, 2.0, RngSpec{600 + static_cast<std::uint64_t>(t)}});
        std::vector<double> m2(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) m2[i] = std::abs(v[i]);
        std::sort(m2.begin(), m2.end(), std::greater<>());
        for (std::size_t j = 0; j < m2.size(); ++j)
            CHECK(m2[j] == doctest::Approx(2.0 * std::pow(j + 1.0, -1.0 / 0.7)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gen_wlp({3, 2.5, 1.0, RngSpec{1}}), std::invalid_argument);
}

TEST_CASE("wlp tail sums stay under the integral bound") {
    // sigma_k / sqrt(k) <= C/(1/p - 1) k^{1/2 - 1/p} for p = 1/3
    const double p = 1.0 / 3.0, c = 1.0;
    const auto x = gen_wlp({256, p, c, RngSpec{8}});
    for (int k = 1; k <= 32; ++k) {
        const double lhs = best_kterm_error_l1(x, k) / std::sqrt(static_cast<double>(k));
        const double rhs = c / (1.0 / p - 1.0) * std::pow(static_cast<double>(k), 0.5 - 1.0 / p);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("best k-term error basics and brute force") {
    const std::vector<double> x{3.0, 1.0, 0.0};
    CHECK(best_kterm_error_l1(x, 1) == doctest::Approx(1.0));
    CHECK(best_kterm_error_l1(x, 3) == doctest::Approx(0.0));
    CHECK(best_kterm_error_l1(x, 0) == doctest::Approx(4.0));

    Rng rng(RngSpec{9});
    for (int t = 0; t < 20; ++t) {
        std::vector<double> v(9);
        for (auto& a : v) a = rng.gaussian();
        double prev = best_kterm_error_l1(v, 0);
        for (int k = 0; k <= 9; ++k) {
            const double cur = best_kterm_error_l1(v, k);
            CHECK(cur <= prev + 1e-12);  // non-increasing in k
            CHECK(cur == doctest::Approx(oracles::brute_force_kterm_l1(v, k)).epsilon(1e-12));
            prev = cur;
        }
    }
}

TEST_CASE("mu rescaling clamps the measurement sup norm") {
    DenseMatrix phi(2, 2);
    phi(0, 0) = 2.0;
    phi(1, 1) = 1.0;
    const std::vector<double> x{1.0, 0.5};
    const ScaledSignal s = scale_to_mu(phi.view(), x, 1.0);  // ||phi x||_inf = 2
    CHECK(s.scale == doctest::Approx(0.5));
    CHECK(s.x[0] == doctest::Approx(0.5));

    const ScaledSignal t = scale_to_mu(phi.view(), s.x, 1.0);  // already in range
    CHECK(t.scale == doctest::Approx(1.0));
    CHECK(t.x == s.x);

    Rng rng(RngSpec{10});
    const DenseMatrix p2 = gen_matrix(MatrixKind::gaussian, 30, 10, RngSpec{11});
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> v(10);
        for (auto& a : v) a = rng.gaussian();
        const ScaledSignal out = scale_to_mu(p2.view(), v, 0.8);
        std::vector<double> y(30);
        kernels::matvec(p2.view(), out.x, y);
        CHECK(kernels::norm_inf(y) <= 0.8 * (1.0 + 1e-12));
    }
}

TEST_CASE("measurement synthesis") {
    const DenseMatrix phi = gen_matrix(MatrixKind::gaussian, 25, 6, RngSpec{12});
    std::vector<double> x(6, 0.3);

    MeasurementSpec clean{0.9, 0.0, NoiseDist::none, RngSpec{1}};
    const Measurement m0 = measure(phi.view(), x, clean);
    std::vector<double> y(25);
    kernels::matvec(phi.view(), x, y);
    CHECK(m0.y == y);

    MeasurementSpec noisy{0.9, 0.05, NoiseDist::uniform, RngSpec{13}};
    const Measurement m1 = measure(phi.view(), x, noisy);
    for (double e : m1.e) CHECK(std::abs(e) <= 0.05);
    const Measurement m2 = measure(phi.view(), x, noisy);
    CHECK(m1.y == m2.y);  // deterministic per seed

    double mean = 0.0;
    for (int t = 0; t < 200; ++t) {
        MeasurementSpec s{0.9, 0.05, NoiseDist::uniform, RngSpec{2000 + static_cast<std::uint64_t>(t)}};
        const Measurement mm = measure(phi.view(), x, s);
        for (double e : mm.e) mean += e;
    }
    mean /= 200.0 * 25.0;
    CHECK(std::abs(mean) < 0.005);
}
