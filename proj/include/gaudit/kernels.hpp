#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gaudit::kernels {

// Dense row-major kernels backing the native scorers and the statistics
// module. Each has a serial reference implementation and an OpenMP variant;
// the public entry point dispatches on par::mode(). Parallelism is always
// across output elements with a fixed-order inner loop, so both paths return
// bit-identical results.

// C[m x n] = A[m x k] * B[k x n]
void gemm(std::span<const double> a, std::span<const double> b,
          std::span<double> c, std::size_t m, std::size_t k, std::size_t n);
void gemm_serial(std::span<const double> a, std::span<const double> b,
                 std::span<double> c, std::size_t m, std::size_t k, std::size_t n);
void gemm_openmp(std::span<const double> a, std::span<const double> b,
                 std::span<double> c, std::size_t m, std::size_t k, std::size_t n);

// C[m x n] = A[m x k] * B^T, with B stored row-major as [n x k].
void gemm_nt(std::span<const double> a, std::span<const double> b_t,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n);

void add_bias_rows(std::span<double> x, std::span<const double> bias,
                   std::size_t rows, std::size_t cols);

void layer_norm_rows(std::span<const double> x, std::span<const double> gamma,
                     std::span<const double> beta, std::span<double> out,
                     std::size_t rows, std::size_t cols, double eps = 1e-5);

void gelu(std::span<double> x);

// In-place softmax over one row; then log is cheap where needed.
void softmax_row(std::span<double> row);
// log-softmax of one row into out.
void log_softmax_row(std::span<const double> row, std::span<double> out);

// Gaussian KDE evaluated on a grid: out[j] = 1/(n h) * sum_i phi((g_j-v_i)/h).
std::vector<double> kde_evaluate(std::span<const double> grid,
                                 std::span<const double> values, double bandwidth);
std::vector<double> kde_evaluate_serial(std::span<const double> grid,
                                        std::span<const double> values, double bandwidth);
std::vector<double> kde_evaluate_openmp(std::span<const double> grid,
                                        std::span<const double> values, double bandwidth);

// Number of (x_i, y_j) pairs with x_i > y_j plus half the ties; the sums are
// multiples of 0.5 so the reduction is exact in double regardless of order.
double count_greater_half_ties(std::span<const double> x, std::span<const double> y);
double count_greater_half_ties_serial(std::span<const double> x, std::span<const double> y);
double count_greater_half_ties_openmp(std::span<const double> x, std::span<const double> y);

}  // namespace gaudit::kernels
