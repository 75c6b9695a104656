#include "carnot/operator.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <memory>

using namespace carnot;

namespace {

struct Fixture {
  std::unique_ptr<DiscreteSublaplacian> op;
  GridFunction u, out;
};

Fixture& fixture(int n) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto g = builtin_group("heisenberg");
  auto grid = Grid::uniform(g.shape(), 4.0, n);
  Fixture f;
  f.op = std::make_unique<DiscreteSublaplacian>(g, grid);
  f.u = GridFunction::sample(grid, [](std::span<const double> x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1]) - 0.25 * x[2] * x[2]);
  });
  f.out = GridFunction(grid);
  return cache.emplace(n, std::move(f)).first->second;
}

void report(benchmark::State& state, const Fixture& f) {
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.u.size()));
}

void BM_serial(benchmark::State& state) {
  auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    f.op->apply_serial(f.u.values(), f.out.values());
    benchmark::DoNotOptimize(f.out.values().data());
  }
  report(state, f);
}

void BM_composed(benchmark::State& state) {
  auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    f.op->apply_composed(f.u.values(), f.out.values());
    benchmark::DoNotOptimize(f.out.values().data());
  }
  report(state, f);
}

void BM_fused(benchmark::State& state) {
  auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    f.op->apply(f.u.values(), f.out.values());
    benchmark::DoNotOptimize(f.out.values().data());
  }
  report(state, f);
}

}  // namespace

BENCHMARK(BM_serial)->Arg(33)->Arg(65);
BENCHMARK(BM_composed)->Arg(33)->Arg(65);
BENCHMARK(BM_fused)->Arg(33)->Arg(65);

BENCHMARK_MAIN();
