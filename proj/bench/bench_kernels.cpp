// Serial reference vs OpenMP kernels. The thread count argument selects the
// variant: 0 runs the serial reference, n > 0 runs the parallel kernel on n threads.
#include "polyrobin/concavity.hpp"
#include "polyrobin/fem.hpp"
#include "polyrobin/mesh2d.hpp"
#include "polyrobin/parallel.hpp"
#include "polyrobin/pruefer.hpp"
#include "polyrobin/shapes.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

using namespace polyrobin;

namespace {

const Mesh& trapezoid_mesh() {
  static const Mesh mesh = triangulate_graded(shapes::right_trapezoid(), 0.01, {Vec2(2, 1)}, 2e-4, 0.1);
  return mesh;
}

const Field& trapezoid_v() {
  static const Field v = solve_perturbation(std::make_shared<const Mesh>(trapezoid_mesh())).v;
  return v;
}

void thread_args(benchmark::internal::Benchmark* b) {
  b->Arg(0);
  for (int t = 1; t <= omp_get_max_threads(); t *= 2) b->Arg(t);
  b->Unit(benchmark::kMillisecond);
}

void BM_Assembly(benchmark::State& state) {
  const Mesh& M = trapezoid_mesh();
  const int threads = static_cast<int>(state.range(0));
  parallel::ThreadLimit limit(std::max(threads, 1));
  for (auto _ : state) benchmark::DoNotOptimize(threads == 0 ? assemble_serial(M) : assemble(M));
  state.counters["nodes"] = static_cast<double>(M.node_count());
}
BENCHMARK(BM_Assembly)->Apply(thread_args);

void BM_ConcavityScan(benchmark::State& state) {
  const Field& v = trapezoid_v();
  const int threads = static_cast<int>(state.range(0));
  parallel::ThreadLimit limit(std::max(threads, 1));
  ConcavityOptions opts;
  opts.parallel = threads != 0;
  std::size_t pairs = 0;
  for (auto _ : state) {
    const ConcavityReport r = check_midpoint_concavity(v, opts);
    pairs = r.pairs_tested;
    benchmark::DoNotOptimize(r.max_gap);
  }
  state.counters["pairs"] = static_cast<double>(pairs);
}
BENCHMARK(BM_ConcavityScan)->Apply(thread_args);

void BM_MuScan(benchmark::State& state) {
  std::vector<double> grid;
  for (int k = 0; k <= 100; ++k) grid.push_back(0.05 * k);
  const int threads = static_cast<int>(state.range(0));
  parallel::ThreadLimit limit(std::max(threads, 1));
  for (auto _ : state) {
    const MuScan s = threads == 0 ? admissible_mu_scan_serial(3, grid) : admissible_mu_scan(3, grid);
    benchmark::DoNotOptimize(s.admissible.data());
  }
}
BENCHMARK(BM_MuScan)->Apply(thread_args);

}  // namespace

BENCHMARK_MAIN();
