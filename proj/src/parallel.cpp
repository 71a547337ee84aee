#include "gaudit/parallel.hpp"

#include <omp.h>

#include <atomic>

namespace gaudit::par {

namespace {
std::atomic<Mode> g_mode{Mode::openmp};
std::atomic<int> g_threads{0};
}  // namespace

Mode mode() { return g_mode.load(std::memory_order_relaxed); }
void set_mode(Mode m) { g_mode.store(m, std::memory_order_relaxed); }

int threads() {
  int n = g_threads.load(std::memory_order_relaxed);
  return n > 0 ? n : omp_get_max_threads();
}

void set_threads(int n) { g_threads.store(n, std::memory_order_relaxed); }

namespace detail {
bool use_openmp(std::size_t n) {
  return mode() == Mode::openmp && n > 1 && threads() > 1;
}
}  // namespace detail

}  // namespace gaudit::par
