#include <benchmark/benchmark.h>

#include "lincom/sysalg.hpp"

namespace {

lincom::IntMat case_a_matrix() {
  using lincom::Int;
  return {{Int(1), Int(3), Int(-1), Int(-3), Int(0)},
          {Int(2), Int(3), Int(-3), Int(0), Int(-2)}};
}

void BM_girth(benchmark::State& state) {
  auto L = lincom::validate(case_a_matrix());
  for (auto _ : state) benchmark::DoNotOptimize(lincom::girth(L));
}
BENCHMARK(BM_girth);

void BM_critical_sets(benchmark::State& state) {
  auto L = lincom::validate(case_a_matrix());
  for (auto _ : state) benchmark::DoNotOptimize(lincom::critical_sets(L));
}
BENCHMARK(BM_critical_sets);

}  // namespace

BENCHMARK_MAIN();
