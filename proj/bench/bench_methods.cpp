// Compares the library kernels (running windows, cached orthonormal bases,
#include <map>
// OpenMP curve drivers) against the serial definitional reference.
#include <benchmark/benchmark.h>

#include <vector>

#include "fluctana/generator.hpp"
#include "fluctana/methods.hpp"
#include "fluctana/reference.hpp"
#include "fluctana/series.hpp"

using namespace fluctana;

namespace {

const Series& test_series(int n) {
  static std::map<int, Series> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    GeneratorSpec spec;
    spec.length = n;
    spec.alpha = 0.7;
    spec.seed = 1234;
    it = cache.emplace(n, generate_power_law(spec)).first;
  }
  return it->second;
}

const Profile& test_profile(int n) {
  static std::map<int, Profile> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, compute_profile(test_series(n))).first;
  }
  return it->second;
}

}  // namespace

static void BM_dfa1_kernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  const Profile& p = test_profile(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dfa(p, s, 1));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_dfa1_kernel)->Args({65536, 64})->Args({65536, 1024});

static void BM_dfa1_reference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  const Profile& p = test_profile(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ref::dfa(p, s, 1));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_dfa1_reference)->Args({65536, 64})->Args({65536, 1024});

static void BM_cma_window(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  const Profile& p = test_profile(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cma(p, s));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_cma_window)->Args({65536, 65})->Args({65536, 1025});

static void BM_cma_reference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  const Profile& p = test_profile(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ref::cma(p, s));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_cma_reference)->Args({65536, 65})->Args({65536, 1025});

static void BM_rs_kernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  const Series& x = test_series(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rs(x, s));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_rs_kernel)->Args({65536, 256});

static void BM_rs_reference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  const Series& x = test_series(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ref::rs(x, s));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_rs_reference)->Args({65536, 256});

// Full curve over the default grid: OpenMP parallel over (member, scale)
// cells vs a serial reference loop.
static void BM_curve_parallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int members = static_cast<int>(state.range(1));
  const Method m = parse_method("dfa1");
  const ScaleGrid grid = default_scale_grid(n, m);
  std::vector<Series> ensemble;
  for (int i = 0; i < members; ++i) {
    GeneratorSpec spec;
    spec.length = n;
    spec.alpha = 0.7;
    spec.seed = 100 + static_cast<std::uint64_t>(i);
    ensemble.push_back(generate_power_law(spec));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fluctuation_curve(ensemble, m, grid));
  }
  state.SetItemsProcessed(state.iterations() * n * members);
}
BENCHMARK(BM_curve_parallel)->Args({16384, 8})->Unit(benchmark::kMillisecond);

static void BM_curve_reference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int members = static_cast<int>(state.range(1));
  const Method m = parse_method("dfa1");
  const ScaleGrid grid = default_scale_grid(n, m);
  std::vector<Series> ensemble;
  std::vector<Profile> profiles;
  for (int i = 0; i < members; ++i) {
    GeneratorSpec spec;
    spec.length = n;
    spec.alpha = 0.7;
    spec.seed = 100 + static_cast<std::uint64_t>(i);
    ensemble.push_back(generate_power_law(spec));
    profiles.push_back(compute_profile(ensemble.back()));
  }
  for (auto _ : state) {
    std::vector<double> f(grid.scales.size(), 0.0);
    for (const Profile& p : profiles) {
      for (std::size_t j = 0; j < grid.scales.size(); ++j) {
        const double v = ref::dfa(p, grid.scales[j], 1);
        f[j] += v * v;
      }
    }
    benchmark::DoNotOptimize(f);
  }
  state.SetItemsProcessed(state.iterations() * n * members);
}
BENCHMARK(BM_curve_reference)->Args({16384, 8})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
