#pragma once

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace polyrobin::parallel {

/// Thread budget: omp_get_max_threads(), capped by the POLYROBIN_THREADS
/// environment variable when it is set to a positive integer.
int max_threads();

/// Overrides the budget for the lifetime of the scope (used by tests and the benchmark).
class ThreadLimit {
 public:
  explicit ThreadLimit(int threads);
  ~ThreadLimit();
  ThreadLimit(const ThreadLimit&) = delete;
  ThreadLimit& operator=(const ThreadLimit&) = delete;

 private:
  int previous_;
};

inline int thread_id() {
#if defined(_OPENMP)
  return omp_get_thread_num();
#else
  return 0;
#endif
}

inline int team_size() {
#if defined(_OPENMP)
  return omp_get_num_threads();
#else
  return 1;
#endif
}

}  // namespace polyrobin::parallel
