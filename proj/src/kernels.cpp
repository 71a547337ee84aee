#include "gaudit/kernels.hpp"

#include <omp.h>

#include <cassert>
#include <cmath>

#include "gaudit/parallel.hpp"

namespace gaudit::kernels {

namespace {

inline void gemm_row(std::span<const double> a, std::span<const double> b,
                     std::span<double> c, std::size_t k, std::size_t n,
                     std::size_t i) {
  const double* arow = a.data() + i * k;
  double* crow = c.data() + i * n;
  for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    const double av = arow[p];
    const double* brow = b.data() + p * n;
    for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
  }
}

inline void gemm_nt_row(std::span<const double> a, std::span<const double> b_t,
                        std::span<double> c, std::size_t k, std::size_t n,
                        std::size_t i) {
  const double* arow = a.data() + i * k;
  double* crow = c.data() + i * n;
  for (std::size_t j = 0; j < n; ++j) {
    const double* brow = b_t.data() + j * k;
    double acc = 0.0;
    for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
    crow[j] = acc;
  }
}

inline double kde_point(std::span<const double> values, double h, double g) {
  // 1/sqrt(2*pi)
  constexpr double kInvSqrt2Pi = 0.3989422804014327;
  double acc = 0.0;
  for (double v : values) {
    const double z = (g - v) / h;
    acc += std::exp(-0.5 * z * z);
  }
  return acc * kInvSqrt2Pi / (static_cast<double>(values.size()) * h);
}

inline double count_row(std::span<const double> y, double xi) {
  double acc = 0.0;
  for (double yj : y) {
    if (xi > yj) acc += 1.0;
    else if (xi == yj) acc += 0.5;
  }
  return acc;
}

}  // namespace

void gemm_serial(std::span<const double> a, std::span<const double> b,
                 std::span<double> c, std::size_t m, std::size_t k, std::size_t n) {
  assert(a.size() == m * k && b.size() == k * n && c.size() == m * n);
  for (std::size_t i = 0; i < m; ++i) gemm_row(a, b, c, k, n, i);
}

void gemm_openmp(std::span<const double> a, std::span<const double> b,
                 std::span<double> c, std::size_t m, std::size_t k, std::size_t n) {
  assert(a.size() == m * k && b.size() == k * n && c.size() == m * n);
  const int nt = par::threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (long long i = 0; i < static_cast<long long>(m); ++i)
    gemm_row(a, b, c, k, n, static_cast<std::size_t>(i));
}

void gemm(std::span<const double> a, std::span<const double> b,
          std::span<double> c, std::size_t m, std::size_t k, std::size_t n) {
  if (par::detail::use_openmp(m)) gemm_openmp(a, b, c, m, k, n);
  else gemm_serial(a, b, c, m, k, n);
}

void gemm_nt(std::span<const double> a, std::span<const double> b_t,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n) {
  assert(a.size() == m * k && b_t.size() == n * k && c.size() == m * n);
  par::parallel_for(m, [&](std::size_t i) { gemm_nt_row(a, b_t, c, k, n, i); });
}

void add_bias_rows(std::span<double> x, std::span<const double> bias,
                   std::size_t rows, std::size_t cols) {
  assert(x.size() == rows * cols && bias.size() == cols);
  par::parallel_for(rows, [&](std::size_t i) {
    double* row = x.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) row[j] += bias[j];
  });
}

void layer_norm_rows(std::span<const double> x, std::span<const double> gamma,
                     std::span<const double> beta, std::span<double> out,
                     std::size_t rows, std::size_t cols, double eps) {
  assert(x.size() == rows * cols && out.size() == rows * cols);
  assert(gamma.size() == cols && beta.size() == cols);
  par::parallel_for(rows, [&](std::size_t i) {
    const double* row = x.data() + i * cols;
    double* orow = out.data() + i * cols;
    double mean = 0.0;
    for (std::size_t j = 0; j < cols; ++j) mean += row[j];
    mean /= static_cast<double>(cols);
    double var = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double d = row[j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(cols);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < cols; ++j)
      orow[j] = (row[j] - mean) * inv * gamma[j] + beta[j];
  });
}

void gelu(std::span<double> x) {
  // tanh approximation, matches the usual transformer formulation
  constexpr double kSqrt2OverPi = 0.7978845608028654;
  for (double& v : x) {
    const double u = kSqrt2OverPi * (v + 0.044715 * v * v * v);
    v = 0.5 * v * (1.0 + std::tanh(u));
  }
}

void softmax_row(std::span<double> row) {
  double mx = row[0];
  for (double v : row)
    if (v > mx) mx = v;
  double sum = 0.0;
  for (double& v : row) {
    v = std::exp(v - mx);
    sum += v;
  }
  const double inv = 1.0 / sum;
  for (double& v : row) v *= inv;
}

void log_softmax_row(std::span<const double> row, std::span<double> out) {
  assert(row.size() == out.size());
  double mx = row[0];
  for (double v : row)
    if (v > mx) mx = v;
  double sum = 0.0;
  for (double v : row) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = row[j] - lse;
}

std::vector<double> kde_evaluate_serial(std::span<const double> grid,
                                        std::span<const double> values,
                                        double bandwidth) {
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    out[j] = kde_point(values, bandwidth, grid[j]);
  return out;
}

std::vector<double> kde_evaluate_openmp(std::span<const double> grid,
                                        std::span<const double> values,
                                        double bandwidth) {
  std::vector<double> out(grid.size());
  const int nt = par::threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (long long j = 0; j < static_cast<long long>(grid.size()); ++j)
    out[static_cast<std::size_t>(j)] =
        kde_point(values, bandwidth, grid[static_cast<std::size_t>(j)]);
  return out;
}

std::vector<double> kde_evaluate(std::span<const double> grid,
                                 std::span<const double> values, double bandwidth) {
  if (par::detail::use_openmp(grid.size()))
    return kde_evaluate_openmp(grid, values, bandwidth);
  return kde_evaluate_serial(grid, values, bandwidth);
}

double count_greater_half_ties_serial(std::span<const double> x,
                                      std::span<const double> y) {
  double acc = 0.0;
  for (double xi : x) acc += count_row(y, xi);
  return acc;
}

double count_greater_half_ties_openmp(std::span<const double> x,
                                      std::span<const double> y) {
  double acc = 0.0;
  const int nt = par::threads();
#pragma omp parallel for schedule(static) reduction(+ : acc) num_threads(nt)
  for (long long i = 0; i < static_cast<long long>(x.size()); ++i)
    acc += count_row(y, x[static_cast<std::size_t>(i)]);
  return acc;
}

double count_greater_half_ties(std::span<const double> x, std::span<const double> y) {
  if (par::detail::use_openmp(x.size()))
    return count_greater_half_ties_openmp(x, y);
  return count_greater_half_ties_serial(x, y);
}

}  // namespace gaudit::kernels
