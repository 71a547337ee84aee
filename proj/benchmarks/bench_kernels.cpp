#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gaudit/kernels.hpp"
#include "gaudit/nn.hpp"
#include "gaudit/parallel.hpp"
#include "gaudit/scoring.hpp"

namespace {

using namespace gaudit;

std::vector<double> random_vec(size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

void bench_gemm(benchmark::State& state, par::Mode mode) {
  par::set_mode(mode);
  const auto m = static_cast<size_t>(state.range(0));
  const auto a = random_vec(m * m, 1);
  const auto b = random_vec(m * m, 2);
  std::vector<double> c(m * m);
  for (auto _ : state) {
    kernels::gemm(a, b, c, m, m, m);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(m * m * m));
}

void bench_kde(benchmark::State& state, par::Mode mode) {
  par::set_mode(mode);
  const auto n = static_cast<size_t>(state.range(0));
  const auto values = random_vec(n, 3);
  const auto grid = random_vec(512, 4);
  for (auto _ : state) {
    auto out = kernels::kde_evaluate(grid, values, 0.3);
    benchmark::DoNotOptimize(out.data());
  }
}

void bench_count(benchmark::State& state, par::Mode mode) {
  par::set_mode(mode);
  const auto n = static_cast<size_t>(state.range(0));
  const auto x = random_vec(n, 5);
  const auto y = random_vec(n, 6);
  for (auto _ : state) {
    double u = kernels::count_greater_half_ties(x, y);
    benchmark::DoNotOptimize(u);
  }
}

void bench_native_score(benchmark::State& state, par::Mode mode) {
  par::set_mode(mode);
  auto scorer = scoring::make_native_scorer("tiny-ar-small");
  for (auto _ : state) {
    auto out = scorer->score("The person who is male is", "a man");
    benchmark::DoNotOptimize(out.log_prob);
  }
}

}  // namespace

BENCHMARK_CAPTURE(bench_gemm, serial, gaudit::par::Mode::serial)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(bench_gemm, openmp, gaudit::par::Mode::openmp)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(bench_kde, serial, gaudit::par::Mode::serial)->Arg(1000)->Arg(20000);
BENCHMARK_CAPTURE(bench_kde, openmp, gaudit::par::Mode::openmp)->Arg(1000)->Arg(20000);
BENCHMARK_CAPTURE(bench_count, serial, gaudit::par::Mode::serial)->Arg(2000);
BENCHMARK_CAPTURE(bench_count, openmp, gaudit::par::Mode::openmp)->Arg(2000);
BENCHMARK_CAPTURE(bench_native_score, serial, gaudit::par::Mode::serial);
BENCHMARK_CAPTURE(bench_native_score, openmp, gaudit::par::Mode::openmp);

BENCHMARK_MAIN();
