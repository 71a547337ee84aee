#pragma once

#include <cstddef>

namespace gaudit::par {

enum class Mode { serial, openmp };

// Process-wide execution mode for the data-parallel kernels. Every kernel has
// a serial reference path; the OpenMP path must produce bit-identical results
// (parallelism is only ever across independent output elements).
Mode mode();
void set_mode(Mode m);

int threads();
void set_threads(int n);  // n <= 0 resets to the OpenMP default

// Runs f(i) for i in [0, n). Honors the current mode/thread count.
template <typename F>
void parallel_for(std::size_t n, F&& f);

namespace detail {
bool use_openmp(std::size_t n);
}

}  // namespace gaudit::par

#include <omp.h>

namespace gaudit::par {

template <typename F>
void parallel_for(std::size_t n, F&& f) {
  if (detail::use_openmp(n)) {
    const int nt = threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      f(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) f(i);
  }
}

}  // namespace gaudit::par
