// Parallel kernels against the serial reference loops on a two-boson 2D grid
// (extent^2 blocks per particle: 2^16 cells at extent 16, 2^20 at extent 32).

#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "ccqm/kernels.hpp"
#include "ccqm/reference.hpp"
#include "ccqm/rng.hpp"

namespace {

using ccqm::cplx;

ccqm::ConfigGrid bench_grid(std::size_t extent) {
  std::vector<ccqm::ParticleMeta> p(2);
  p[0].label = 0;
  p[1].label = 1;
  p[0].statistics = p[1].statistics = ccqm::Statistics::Boson;
  return ccqm::ConfigGrid::uniform(std::move(p), 2, extent, 0.25);
}

std::vector<cplx> random_amplitudes(std::size_t n) {
  ccqm::Rng rng(7);
  std::vector<cplx> a(n);
  for (auto& z : a) z = cplx(rng.normal(), rng.normal()) * 1e-3;
  return a;
}

template <bool Parallel>
void BM_Quantize(benchmark::State& state) {
  const auto grid = bench_grid(static_cast<std::size_t>(state.range(0)));
  const auto a = random_amplitudes(grid.total_cells());
  std::vector<std::uint32_t> nf(a.size()), nt(a.size());
  for (auto _ : state) {
    if constexpr (Parallel) ccqm::kernels::quantize_cells(a, 1e-3, 64, nf, nt);
    else ccqm::reference::quantize_cells(a, 1e-3, 64, nf, nt);
    benchmark::DoNotOptimize(nf.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}

template <bool Parallel>
void BM_NormSquared(benchmark::State& state) {
  const auto grid = bench_grid(static_cast<std::size_t>(state.range(0)));
  const auto a = random_amplitudes(grid.total_cells());
  for (auto _ : state) {
    double s = Parallel ? ccqm::kernels::norm_squared(a) : ccqm::reference::norm_squared(a);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}

template <bool Parallel>
void BM_GaussianField(benchmark::State& state) {
  const auto grid = bench_grid(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(grid.total_cells());
  const std::vector<std::size_t> centre = {grid.cells_per_particle(0) / 2, grid.cells_per_particle(1) / 3};
  for (auto _ : state) {
    if constexpr (Parallel) ccqm::kernels::gaussian_product_field(grid, centre, 0.7, out);
    else ccqm::reference::gaussian_product_field(grid, centre, 0.7, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Parallel>
void BM_Marginal(benchmark::State& state) {
  const auto grid = bench_grid(static_cast<std::size_t>(state.range(0)));
  const auto a = random_amplitudes(grid.total_cells());
  std::vector<double> out(grid.cells_per_particle(0));
  for (auto _ : state) {
    if constexpr (Parallel) ccqm::kernels::marginal_probability(grid, a, 1, out);
    else ccqm::reference::marginal_probability(grid, a, 1, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}

template <bool Parallel>
void BM_Symmetrize(benchmark::State& state) {
  const auto grid = bench_grid(static_cast<std::size_t>(state.range(0)));
  const auto a = random_amplitudes(grid.total_cells());
  const auto perms = ccqm::group_permutations(2, {{0, 1}}, {false});
  std::vector<cplx> out(a.size());
  for (auto _ : state) {
    if constexpr (Parallel) ccqm::kernels::symmetrize(grid, perms, std::span<const cplx>(a), std::span<cplx>(out));
    else ccqm::reference::symmetrize(grid, perms, std::span<const cplx>(a), std::span<cplx>(out));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}

}  // namespace

BENCHMARK(BM_Quantize<true>)->Arg(16)->Arg(32);
BENCHMARK(BM_Quantize<false>)->Arg(16)->Arg(32);
BENCHMARK(BM_NormSquared<true>)->Arg(16)->Arg(32);
BENCHMARK(BM_NormSquared<false>)->Arg(16)->Arg(32);
BENCHMARK(BM_GaussianField<true>)->Arg(16)->Arg(32);
BENCHMARK(BM_GaussianField<false>)->Arg(16)->Arg(32);
BENCHMARK(BM_Marginal<true>)->Arg(16)->Arg(32);
BENCHMARK(BM_Marginal<false>)->Arg(16)->Arg(32);
BENCHMARK(BM_Symmetrize<true>)->Arg(16)->Arg(32);
BENCHMARK(BM_Symmetrize<false>)->Arg(16)->Arg(32);

BENCHMARK_MAIN();
