#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Dense inner loops shared by the whole library. Each OpenMP kernel has a
// serial twin under kernels::serial; tests assert they agree and the bench
// target times them against each other.

namespace aic::kernels {

// Row-major matrix window. `stride` is the allocated row length, so a view
// over the first `cols` columns of a wider matrix needs no copy.
struct MatView {
    const double* data = nullptr;
    int rows = 0;
    int cols = 0;
    int stride = 0;

    const double* row(int i) const { return data + static_cast<std::size_t>(i) * stride; }
    double at(int i, int j) const { return row(i)[j]; }
};

namespace serial {
void matvec(MatView a, std::span<const double> x, std::span<double> y);
void matvec_t(MatView a, std::span<const double> x, std::span<double> y);
void gram_tt(MatView a, std::vector<double>& g);  // g = a^T a, cols x cols
}  // namespace serial

// y = a * x
void matvec(MatView a, std::span<const double> x, std::span<double> y);
// y = a^T * x
void matvec_t(MatView a, std::span<const double> x, std::span<double> y);
// g = a^T a (row-major cols x cols)
void gram_tt(MatView a, std::vector<double>& g);

double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
double norm_inf(std::span<const double> x);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// In-place running sums / first differences (v_0 := 0), applied r times.
void prefix_sums(std::span<double> v, int r = 1);
void suffix_sums(std::span<double> v, int r = 1);
void first_differences(std::span<double> v, int r = 1);

// Cholesky of a dense SPD matrix (row-major n x n, lower factor in place).
// Returns false if a pivot is not positive.
bool cholesky(std::vector<double>& a, int n);
void cholesky_solve(const std::vector<double>& chol, int n, std::span<double> b);

}  // namespace aic::kernels
