#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace gaudit::stats {

enum class Method { exact, normal_approximation, t_approximation };

std::string_view to_string(Method m);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;  // always in (0, 1]
  Method method = Method::exact;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  bool two_sided = true;
};

struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

// U = #(x_i > y_j) + half the ties. Exact enumeration when n1*n2 <= 400 and
// the pooled sample is tie-free; otherwise normal approximation with tie and
// continuity corrections. Two-sided p.
TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

// Average ranks for ties, Pearson correlation of the ranks, p via the
// t-approximation with n-2 degrees of freedom. Needs >= 3 pairs and
// non-constant inputs.
TestResult spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

// Gaussian KDE with Scott's rule bandwidth h = sd * n^(-1/5); sd uses the
// n-1 denominator. Grid spans [min - 4h, max + 4h].
DensityCurve kde_scott(const std::vector<double>& values, std::size_t grid_size = 512);

// Trapezoidal integral of a curve; the KDE integrates to 1 within 1e-3.
double trapezoid_integral(const std::vector<double>& grid,
                          const std::vector<double>& density);

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(const std::vector<double>& values);

}  // namespace gaudit::stats
