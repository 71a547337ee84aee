#include "gaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "gaudit/errors.hpp"
#include "gaudit/kernels.hpp"

namespace gaudit::stats {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::normal_approximation: return "normal_approximation";
    case Method::t_approximation: return "t_approximation";
  }
  return "";
}

namespace {

constexpr double kMinP = std::numeric_limits<double>::min();

double clamp_p(double p) { return std::min(1.0, std::max(kMinP, p)); }

bool pooled_has_ties(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::sort(pooled.begin(), pooled.end());
  return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

// Count of tie-free arrangements of m x's and n y's by U value. Recurrence on
// the largest pooled element: an x there beats all current y's, a y beats
// nothing, so f(m,n,u) = f(m-1,n,u-n) + f(m,n-1,u). Counts stay below 2^53
// for m*n <= 400, so doubles hold them exactly.
std::vector<double> exact_u_counts(std::size_t m, std::size_t n) {
  std::vector<std::vector<double>> row(n + 1);
  for (std::size_t j = 0; j <= n; ++j) row[j] = {1.0};  // i = 0: only U = 0
  for (std::size_t i = 1; i <= m; ++i) {
    std::vector<std::vector<double>> next(n + 1);
    next[0] = {1.0};
    for (std::size_t j = 1; j <= n; ++j) {
      std::vector<double> f(i * j + 1, 0.0);
      for (std::size_t u = 0; u <= i * j; ++u) {
        if (u >= j && u - j <= (i - 1) * j) f[u] += row[j][u - j];
        if (u <= i * (j - 1)) f[u] += next[j - 1][u];
      }
      next[j] = std::move(f);
    }
    row = std::move(next);
  }
  return row[n];
}

double normal_two_sided_p(double z) {
  return clamp_p(std::erfc(std::fabs(z) / std::sqrt(2.0)));
}

}  // namespace

TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty())
    throw EmptySampleError("mann_whitney_u: empty sample");
  const std::size_t n1 = x.size(), n2 = y.size();
  const double u = kernels::count_greater_half_ties(x, y);

  TestResult r;
  r.statistic = u;
  r.n1 = n1;
  r.n2 = n2;

  if (n1 * n2 <= 400 && !pooled_has_ties(x, y)) {
    r.method = Method::exact;
    const std::vector<double> counts = exact_u_counts(n1, n2);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto ui = static_cast<std::size_t>(std::llround(u));
    double below = 0.0, above = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (k <= ui) below += counts[k];
      if (k >= ui) above += counts[k];
    }
    r.p_value = clamp_p(2.0 * std::min(below, above) / total);
    return r;
  }

  r.method = Method::normal_approximation;
  const double nn = static_cast<double>(n1) * static_cast<double>(n2);
  const double total = static_cast<double>(n1 + n2);
  std::map<double, std::size_t> groups;
  for (double v : x) ++groups[v];
  for (double v : y) ++groups[v];
  double tie_term = 0.0;
  for (const auto& [value, t] : groups) {
    (void)value;
    const double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double mean = nn / 2.0;
  const double var =
      nn / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
  if (var <= 0.0) {
    r.p_value = 1.0;  // every pooled value identical
    return r;
  }
  double d = u - mean;
  if (d > 0.5) d -= 0.5;
  else if (d < -0.5) d += 0.5;
  else d = 0.0;
  r.p_value = normal_two_sided_p(d / std::sqrt(var));
  return r;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

TestResult spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw LengthMismatchError("spearman_rho: sample sizes " +
                              std::to_string(x.size()) + " and " +
                              std::to_string(y.size()) + " differ");
  const std::size_t n = x.size();
  if (n < 3)
    throw DegenerateError("spearman_rho: need at least 3 pairs, got " +
                          std::to_string(n));

  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mean, dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DegenerateError("spearman_rho: constant input has no rank ordering");

  double rho = sxy / std::sqrt(sxx * syy);
  rho = std::max(-1.0, std::min(1.0, rho));

  TestResult r;
  r.statistic = rho;
  r.method = Method::t_approximation;
  r.n1 = n;
  r.n2 = n;
  const double df = static_cast<double>(n) - 2.0;
  const double denom = 1.0 - rho * rho;
  if (denom <= 0.0) {
    r.p_value = kMinP;  // perfect monotone relation
    return r;
  }
  const double t = rho * std::sqrt(df / denom);
  boost::math::students_t dist(df);
  r.p_value = clamp_p(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
  return r;
}

DensityCurve kde_scott(const std::vector<double>& values, std::size_t grid_size) {
  const std::size_t n = values.size();
  if (n < 2)
    throw InsufficientDataError("kde_scott: need at least 2 values, got " +
                                std::to_string(n));
  if (grid_size < 2)
    throw ConfigError("kde_scott: grid_size must be at least 2");

  const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                      static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (static_cast<double>(n) - 1.0));
  if (sd == 0.0)
    throw InsufficientDataError("kde_scott: sample standard deviation is zero");

  const double h = sd * std::pow(static_cast<double>(n), -0.2);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn - 4.0 * h, hi = *mx + 4.0 * h;

  DensityCurve curve;
  curve.bandwidth = h;
  curve.grid.resize(grid_size);
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);
  for (std::size_t i = 0; i < grid_size; ++i)
    curve.grid[i] = lo + step * static_cast<double>(i);
  curve.density = kernels::kde_evaluate(curve.grid, values, h);
  return curve;
}

double trapezoid_integral(const std::vector<double>& grid,
                          const std::vector<double>& density) {
  if (grid.size() != density.size())
    throw LengthMismatchError("trapezoid_integral: grid and density sizes differ");
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    total += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  return total;
}

}  // namespace gaudit::stats
