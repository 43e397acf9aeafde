#include "polyrobin/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace polyrobin::parallel {

namespace {

int override_threads = 0;

int hardware_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace

int max_threads() {
  if (override_threads > 0) return override_threads;
  int n = hardware_threads();
  if (const char* env = std::getenv("POLYROBIN_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) n = std::min(n, cap);
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return std::max(1, n);
}

ThreadLimit::ThreadLimit(int threads) : previous_(override_threads) { override_threads = std::max(1, threads); }

ThreadLimit::~ThreadLimit() { override_threads = previous_; }

}  // namespace polyrobin::parallel
