#include <array>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "trace_shape/kernels.hpp"

using namespace trace_shape;

namespace {

// Mesh sized by the angular count; layers = angular / 2.
struct Data {
  kernels::ElementGeometry geo;
  std::vector<double> u, grad;
  std::vector<std::array<double, 4>> jac;

  explicit Data(int angular) {
    TraceProblem raw;
    raw.center = {0.1, 0.0};
    geo = kernels::ElementGeometry::build(generate_annular_mesh(validate_problem(raw), angular / 2, angular));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    u.resize(geo.vertex_count());
    for (double& x : u) x = dist(rng);
    grad.resize(u.size());
    jac.resize(geo.triangles.size());
    for (auto& j : jac) {
      for (double& x : j) x = dist(rng);
    }
  }
};

template <bool Parallel>
void numerator(benchmark::State& state) {
  Data d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const double v = Parallel ? kernels::numerator_parallel(d.geo, d.u, 3.0, 1e-4, d.grad)
                              : kernels::numerator_serial(d.geo, d.u, 3.0, 1e-4, d.grad);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.geo.triangles.size()));
}

template <bool Parallel>
void volume_form(benchmark::State& state) {
  Data d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const double v = Parallel ? kernels::volume_form_parallel(d.geo, d.u, 3.0, d.jac)
                              : kernels::volume_form_serial(d.geo, d.u, 3.0, d.jac);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.geo.triangles.size()));
}

}  // namespace

BENCHMARK(numerator<false>)->Name("numerator/serial")->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(numerator<true>)->Name("numerator/openmp")->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(volume_form<false>)->Name("volume_form/serial")->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(volume_form<true>)->Name("volume_form/openmp")->RangeMultiplier(2)->Range(128, 1024);

BENCHMARK_MAIN();
