// Serial reference kernels against their OpenMP counterparts, plus whole
// split steps with either backend.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "bec/grid.hpp"
#include "bec/kernels.hpp"
#include "bec/potentials.hpp"
#include "bec/propagator.hpp"

using namespace bec;

namespace {

struct Fields {
  std::vector<kernels::cplx> psi;
  std::vector<double> v, x;
  explicit Fields(std::size_t n) : psi(n), v(n), x(n) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < n; ++i) {
      psi[i] = {normal(rng), normal(rng)};
      x[i] = -20.0 + 40.0 * static_cast<double>(i) / static_cast<double>(n);
      v[i] = 0.5 * x[i] * x[i];
    }
  }
};

template <kernels::Backend B>
void nonlinear_phase(benchmark::State& state) {
  kernels::set_parallel_threshold(0);
  Fields f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::nonlinear_phase(B, f.psi, f.v, {}, 10.0, 1e-6);
    benchmark::DoNotOptimize(f.psi.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <kernels::Backend B>
void double_well(benchmark::State& state) {
  kernels::set_parallel_threshold(0);
  Fields f(static_cast<std::size_t>(state.range(0)));
  double d = 0.0;
  for (auto _ : state) {
    kernels::double_well(B, f.v, f.x, d);
    d += 1e-6;
    benchmark::DoNotOptimize(f.v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <kernels::Backend B>
void split_steps(benchmark::State& state) {
  kernels::set_parallel_threshold(0);
  const auto grid = make_grid(static_cast<std::size_t>(state.range(0)), 20.0);
  WaveFunction psi = sample(grid, [](double x) { return kernels::cplx(std::exp(-x * x / 2)); });
  psi.normalize();
  TrapProtocol p;
  StepperConfig sc;
  sc.backend = B;
  for (auto _ : state) {
    auto r = evolve(psi, p, 10.0, 0.0, 0.1, sc);
    benchmark::DoNotOptimize(r.state[0]);
  }
  state.SetItemsProcessed(state.iterations() * 100 * state.range(0));
}

}  // namespace

BENCHMARK(nonlinear_phase<kernels::Backend::serial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(nonlinear_phase<kernels::Backend::parallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(double_well<kernels::Backend::serial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(double_well<kernels::Backend::parallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(split_steps<kernels::Backend::serial>)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);
BENCHMARK(split_steps<kernels::Backend::parallel>)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
