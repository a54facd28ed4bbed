// Serial reference against OpenMP paths of the data-parallel kernels.

#include "qglab/fem.hpp"
#include "qglab/kernels.hpp"
#include "qglab/secular.hpp"

#include <benchmark/benchmark.h>

#include <map>

namespace {

using qg::kernels::Exec;

const std::vector<qg::kernels::TriangleGeom>& grid(int n) {
  static std::map<int, std::vector<qg::kernels::TriangleGeom>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, qg::rectangle_triangles(2.0, 1.0, 2 * n, n)).first;
  return it->second;
}

void BM_P1Locals(benchmark::State& state, Exec exec) {
  const auto& tris = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qg::kernels::p1_locals(tris, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(tris.size()));
}

void BM_QuadraticForms(benchmark::State& state, Exec exec) {
  const int n = static_cast<int>(state.range(0));
  const auto& tris = grid(n);
  const auto locals = qg::kernels::p1_locals(tris, Exec::Serial);
  const std::vector<char> sel(tris.size(), 1);
  qg::Lcg rng(3);
  const qg::Vec x = rng.vector((2 * n + 1) * (n + 1));
  for (auto _ : state) benchmark::DoNotOptimize(qg::kernels::quadratic_forms(tris, locals, sel, x, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(tris.size()));
}

void BM_SecularScan(benchmark::State& state, Exec exec) {
  const auto g = qg::graphs::theta({1.0, 1.5, 2.0});
  const qg::SecularFunction f(g);
  std::vector<double> kappas;
  for (int i = 0; i < state.range(0); ++i) kappas.push_back(0.01 + 10.0 * i / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qg::kernels::secular_scan(f, kappas, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_P1Locals, serial, Exec::Serial)->Arg(100)->Arg(400);
BENCHMARK_CAPTURE(BM_P1Locals, parallel, Exec::Parallel)->Arg(100)->Arg(400);
BENCHMARK_CAPTURE(BM_QuadraticForms, serial, Exec::Serial)->Arg(100)->Arg(400);
BENCHMARK_CAPTURE(BM_QuadraticForms, parallel, Exec::Parallel)->Arg(100)->Arg(400);
BENCHMARK_CAPTURE(BM_SecularScan, serial, Exec::Serial)->Arg(2000);
BENCHMARK_CAPTURE(BM_SecularScan, parallel, Exec::Parallel)->Arg(2000);

BENCHMARK_MAIN();
