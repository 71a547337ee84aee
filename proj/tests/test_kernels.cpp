#include <array>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "gaudit/kernels.hpp"
#include "gaudit/parallel.hpp"

using namespace gaudit;

namespace {

std::vector<double> random_vec(std::mt19937& rng, size_t n, double lo = -2.0,
                               double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

// Textbook triple loop, no blocking, no reordering.
std::vector<double> naive_gemm(const std::vector<double>& a,
                               const std::vector<double>& b, size_t m, size_t k,
                               size_t n) {
  std::vector<double> c(m * n, 0.0);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      c[i * n + j] = acc;
    }
  return c;
}

struct ModeGuard {
  par::Mode saved;
  ModeGuard() : saved(par::mode()) {}
  ~ModeGuard() { par::set_mode(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("gemm matches the naive oracle") {
  std::mt19937 rng(123);
  const std::vector<std::array<size_t, 3>> shapes = {
      {1, 1, 1}, {3, 4, 5}, {7, 16, 9}, {13, 8, 21}};
  for (const auto& [m, k, n] : shapes) {
    const auto a = random_vec(rng, m * k);
    const auto b = random_vec(rng, k * n);
    std::vector<double> c(m * n, -99.0);
    kernels::gemm(a, b, c, m, k, n);
    const auto expect = naive_gemm(a, b, m, k, n);
    for (size_t i = 0; i < c.size(); ++i)
      CHECK(c[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("gemm_nt equals gemm against the explicit transpose") {
  std::mt19937 rng(321);
  const size_t m = 6, k = 11, n = 8;
  const auto a = random_vec(rng, m * k);
  const auto bt = random_vec(rng, n * k);  // B^T stored [n x k]
  std::vector<double> b(k * n);
  for (size_t p = 0; p < k; ++p)
    for (size_t j = 0; j < n; ++j) b[p * n + j] = bt[j * k + p];

  std::vector<double> via_nt(m * n), via_plain(m * n);
  kernels::gemm_nt(a, bt, via_nt, m, k, n);
  kernels::gemm(a, b, via_plain, m, k, n);
  for (size_t i = 0; i < via_nt.size(); ++i)
    CHECK(via_nt[i] == doctest::Approx(via_plain[i]).epsilon(1e-12));
}

TEST_CASE("serial and openmp gemm agree bitwise") {
  ModeGuard guard;
  std::mt19937 rng(55);
  const size_t m = 17, k = 23, n = 19;
  const auto a = random_vec(rng, m * k);
  const auto b = random_vec(rng, k * n);
  std::vector<double> cs(m * n), cp(m * n);
  kernels::gemm_serial(a, b, cs, m, k, n);
  kernels::gemm_openmp(a, b, cp, m, k, n);
  CHECK(std::memcmp(cs.data(), cp.data(), cs.size() * sizeof(double)) == 0);
}

TEST_CASE("add_bias_rows broadcasts one bias per column") {
  std::vector<double> x = {0, 0, 0, 1, 1, 1};
  const std::vector<double> bias = {10, 20, 30};
  kernels::add_bias_rows(x, bias, 2, 3);
  CHECK(x == std::vector<double>{10, 20, 30, 11, 21, 31});
}

TEST_CASE("layer_norm_rows normalizes each row independently") {
  std::mt19937 rng(77);
  const size_t rows = 5, cols = 16;
  const auto x = random_vec(rng, rows * cols, -3.0, 3.0);
  std::vector<double> gamma(cols, 1.0), beta(cols, 0.0), out(rows * cols);
  kernels::layer_norm_rows(x, gamma, beta, out, rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    double mean = 0.0, var = 0.0;
    for (size_t c = 0; c < cols; ++c) mean += out[r * cols + c];
    mean /= static_cast<double>(cols);
    for (size_t c = 0; c < cols; ++c) {
      const double d = out[r * cols + c] - mean;
      var += d * d;
    }
    var /= static_cast<double>(cols);
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-3));  // eps shrinks it slightly
  }

  SUBCASE("gamma and beta apply affinely") {
    std::vector<double> g2(cols, 2.0), b2(cols, 0.5), out2(rows * cols);
    kernels::layer_norm_rows(x, g2, b2, out2, rows, cols);
    for (size_t i = 0; i < out.size(); ++i)
      CHECK(out2[i] == doctest::Approx(2.0 * out[i] + 0.5).epsilon(1e-12));
  }
}

TEST_CASE("gelu matches the tanh formulation") {
  std::vector<double> x = {-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0};
  auto v = x;
  kernels::gelu(v);
  for (size_t i = 0; i < x.size(); ++i) {
    const double u =
        std::sqrt(2.0 / std::acos(-1.0)) * (x[i] + 0.044715 * x[i] * x[i] * x[i]);
    const double tanh_form = 0.5 * x[i] * (1.0 + std::tanh(u));
    CHECK(v[i] == doctest::Approx(tanh_form).epsilon(1e-12));
    // and it tracks the exact erf gelu closely
    const double exact = 0.5 * x[i] * (1.0 + std::erf(x[i] / std::sqrt(2.0)));
    CHECK(std::fabs(v[i] - exact) <= 1e-3);
  }
  CHECK(v[3] == 0.0);
}

TEST_CASE("softmax_row sums to one and is shift invariant") {
  std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> b = {101.0, 102.0, 103.0, 104.0};
  kernels::softmax_row(a);
  kernels::softmax_row(b);
  CHECK(std::accumulate(a.begin(), a.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  for (size_t i = 0; i < a.size(); ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  CHECK(a[3] > a[2]);
  CHECK(a[2] > a[1]);
}

TEST_CASE("log_softmax_row equals log of softmax") {
  std::vector<double> row = {0.3, -1.2, 2.5, 0.0, 7.0};
  std::vector<double> ls(row.size());
  kernels::log_softmax_row(row, ls);
  auto sm = row;
  kernels::softmax_row(sm);
  for (size_t i = 0; i < row.size(); ++i)
    CHECK(ls[i] == doctest::Approx(std::log(sm[i])).epsilon(1e-9));
  double total = 0.0;
  for (double v : ls) total += std::exp(v);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kde_evaluate matches the direct sum and its variants agree bitwise") {
  std::mt19937 rng(808);
  const auto values = random_vec(rng, 37, -5.0, 5.0);
  const auto grid = random_vec(rng, 101, -8.0, 8.0);
  const double h = 0.7;

  const auto out = kernels::kde_evaluate(grid, values, h);
  REQUIRE(out.size() == grid.size());
  const double norm = 1.0 / (static_cast<double>(values.size()) * h *
                             std::sqrt(2.0 * std::acos(-1.0)));
  for (size_t j = 0; j < grid.size(); ++j) {
    double acc = 0.0;
    for (double v : values) {
      const double z = (grid[j] - v) / h;
      acc += std::exp(-0.5 * z * z);
    }
    CHECK(out[j] == doctest::Approx(norm * acc).epsilon(1e-12));
  }

  const auto s = kernels::kde_evaluate_serial(grid, values, h);
  const auto p = kernels::kde_evaluate_openmp(grid, values, h);
  CHECK(std::memcmp(s.data(), p.data(), s.size() * sizeof(double)) == 0);
}

TEST_CASE("count_greater_half_ties matches the quadratic oracle") {
  std::mt19937 rng(205);
  std::uniform_int_distribution<int> val(-4, 4);  // plenty of ties
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> x(40), y(55);
    for (auto& v : x) v = val(rng);
    for (auto& v : y) v = val(rng);
    double expect = 0.0;
    for (double xv : x)
      for (double yv : y) {
        if (xv > yv) expect += 1.0;
        else if (xv == yv) expect += 0.5;
      }
    CHECK(kernels::count_greater_half_ties(x, y) == expect);
    CHECK(kernels::count_greater_half_ties_serial(x, y) ==
          kernels::count_greater_half_ties_openmp(x, y));
  }
}

TEST_CASE("mode switch leaves results identical") {
  ModeGuard guard;
  std::mt19937 rng(606);
  const size_t m = 9, k = 33, n = 12;
  const auto a = random_vec(rng, m * k);
  const auto b = random_vec(rng, k * n);

  par::set_mode(par::Mode::serial);
  std::vector<double> cs(m * n);
  kernels::gemm(a, b, cs, m, k, n);

  par::set_mode(par::Mode::openmp);
  std::vector<double> cp(m * n);
  kernels::gemm(a, b, cp, m, k, n);

  CHECK(std::memcmp(cs.data(), cp.data(), cs.size() * sizeof(double)) == 0);
}

}  // TEST_SUITE
