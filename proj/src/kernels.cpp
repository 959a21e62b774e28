#include "ccqm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ccqm {

namespace {

double permutation_sign(const std::vector<std::size_t>& order) {
  std::size_t inversions = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (order[i] > order[j]) ++inversions;
  return (inversions % 2 == 0) ? 1.0 : -1.0;
}

using Index = std::ptrdiff_t;

Index signed_size(std::size_t n) { return static_cast<Index>(n); }

}  // namespace

std::vector<SlotPermutation> group_permutations(std::size_t num_particles,
                                                const std::vector<std::vector<std::size_t>>& groups,
                                                const std::vector<bool>& antisymmetric_group) {
  SlotPermutation identity;
  identity.slots.resize(num_particles);
  for (std::size_t i = 0; i < num_particles; ++i) identity.slots[i] = i;
  std::vector<SlotPermutation> perms{identity};

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& members = groups[g];
    std::vector<std::size_t> order(members.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<SlotPermutation> next;
    do {
      const double sign = antisymmetric_group[g] ? permutation_sign(order) : 1.0;
      for (const auto& base : perms) {
        SlotPermutation p = base;
        for (std::size_t i = 0; i < members.size(); ++i)
          p.slots[members[i]] = base.slots[members[order[i]]];
        p.sign = base.sign * sign;
        next.push_back(std::move(p));
      }
    } while (std::next_permutation(order.begin(), order.end()));
    perms = std::move(next);
  }
  return perms;
}

namespace kernels {

void quantize_cells(std::span<const cplx> amplitudes, double f0, std::uint32_t phase_levels,
                    std::span<std::uint32_t> magnitude_levels, std::span<std::uint32_t> phase_index) {
  const double inv_f0 = 1.0 / f0;
  const Index n = signed_size(amplitudes.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const cplx z = amplitudes[i];
    const double levels = std::floor(std::abs(z) * inv_f0 + 0.5);
    if (levels < 1.0) {
      magnitude_levels[i] = 0;
      phase_index[i] = 0;
      continue;
    }
    magnitude_levels[i] = static_cast<std::uint32_t>(levels);
    phase_index[i] = nearest_phase_level(z, phase_levels);
  }
}

LevelMoments level_moments(std::span<const std::uint32_t> magnitude_levels) {
  const Index n = signed_size(magnitude_levels.size());
  std::uint64_t support = 0;
  std::uint64_t sum_sq = 0;
  std::uint32_t max_level = 0;
  // Integer reductions are exact, so the combine order does not matter.
#pragma omp parallel for schedule(static) reduction(+ : support, sum_sq) reduction(max : max_level)
  for (Index i = 0; i < n; ++i) {
    const std::uint64_t l = magnitude_levels[i];
    support += (l > 0) ? 1 : 0;
    sum_sq += l * l;
    max_level = std::max(max_level, magnitude_levels[i]);
  }
  return {static_cast<std::size_t>(support), sum_sq, max_level};
}

void reconstruct_levels(std::span<const std::uint32_t> magnitude_levels,
                        std::span<const std::uint32_t> phase_index, double f0,
                        std::uint32_t phase_levels, double scale_factor, std::span<cplx> out) {
  std::vector<cplx> unit(phase_levels);
  for (std::uint32_t m = 0; m < phase_levels; ++m) {
    const double angle = 2.0 * std::numbers::pi * m / phase_levels;
    unit[m] = {std::cos(angle), std::sin(angle)};
  }
  // Opposite levels are exact negatives of each other.
  if (phase_levels % 2 == 0)
    for (std::uint32_t m = phase_levels / 2; m < phase_levels; ++m) unit[m] = -unit[m - phase_levels / 2];
  const Index n = signed_size(out.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i)
    out[i] = (scale_factor * f0 * magnitude_levels[i]) * unit[phase_index[i]];
}

double norm_squared(std::span<const cplx> amplitudes) {
  const std::size_t blocks = (amplitudes.size() + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < signed_size(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(lo + kReductionBlock, amplitudes.size());
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::norm(amplitudes[i]);
    partial[b] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

double max_abs(std::span<const cplx> amplitudes) {
  const Index n = signed_size(amplitudes.size());
  double m2 = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m2)
  for (Index i = 0; i < n; ++i) m2 = std::max(m2, std::norm(amplitudes[i]));
  return std::sqrt(m2);
}

void scale(std::span<cplx> amplitudes, double factor) {
  const Index n = signed_size(amplitudes.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) amplitudes[i] *= factor;
}

void multiply(std::span<cplx> amplitudes, std::span<const cplx> factors) {
  const Index n = signed_size(amplitudes.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) amplitudes[i] *= factors[i];
}

void multiply(std::span<cplx> amplitudes, std::span<const double> factors) {
  const Index n = signed_size(amplitudes.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) amplitudes[i] *= factors[i];
}

void multiply_particle_factor(const ConfigGrid& grid, std::size_t k,
                              std::span<const double> block_factor, std::span<cplx> amplitudes) {
  const std::size_t stride = grid.particle_stride(k);
  const std::size_t size = grid.cells_per_particle(k);
  const Index n = signed_size(amplitudes.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i)
    amplitudes[i] *= block_factor[(static_cast<std::size_t>(i) / stride) % size];
}

void marginal_probability(const ConfigGrid& grid, std::span<const cplx> amplitudes,
                          std::size_t k, std::span<double> out) {
  const std::size_t stride = grid.particle_stride(k);
  const std::size_t size = grid.cells_per_particle(k);
  const std::size_t outer = amplitudes.size() / (stride * size);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < signed_size(size); ++b) {
    double s = 0.0;
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * stride * size + static_cast<std::size_t>(b) * stride;
      for (std::size_t i = 0; i < stride; ++i) s += std::norm(amplitudes[base + i]);
    }
    out[b] = s;
  }
}

void gaussian_product_field(const ConfigGrid& grid, std::span<const std::size_t> centre_blocks,
                            double eps, std::span<double> out) {
  const std::size_t n_particles = grid.num_particles();
  const int dims = grid.spatial_dims();
  const double prefactor = std::pow(eps / std::numbers::pi, dims / 4.0);
  std::vector<std::vector<double>> tables(n_particles);
  for (std::size_t k = 0; k < n_particles; ++k) {
    const Position centre = grid.position(k, centre_blocks[k]);
    auto& table = tables[k];
    table.resize(grid.cells_per_particle(k));
    for (std::size_t b = 0; b < table.size(); ++b) {
      const Position x = grid.position(k, b);
      double r2 = 0.0;
      for (int d = 0; d < dims; ++d) r2 += (x[d] - centre[d]) * (x[d] - centre[d]);
      table[b] = prefactor * std::exp(-0.5 * eps * r2);
    }
  }
  const Index n = signed_size(out.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    double v = 1.0;
    for (std::size_t k = 0; k < n_particles; ++k)
      v *= tables[k][grid.block_index(static_cast<std::size_t>(i), k)];
    out[i] = v;
  }
}

namespace {

template <typename T>
void symmetrize_impl(const ConfigGrid& grid, const std::vector<SlotPermutation>& perms,
                     std::span<const T> in, std::span<T> out) {
  const std::size_t n_particles = grid.num_particles();
  const double inv_count = 1.0 / static_cast<double>(perms.size());
  const Index n = signed_size(out.size());
#pragma omp parallel
  {
    std::vector<std::size_t> blocks(n_particles);
    std::vector<std::size_t> permuted(n_particles);
#pragma omp for schedule(static)
    for (Index i = 0; i < n; ++i) {
      grid.decompose(static_cast<std::size_t>(i), blocks);
      T acc{};
      for (const auto& p : perms) {
        for (std::size_t s = 0; s < n_particles; ++s) permuted[s] = blocks[p.slots[s]];
        acc += p.sign * in[grid.compose(permuted)];
      }
      out[i] = acc * inv_count;
    }
  }
}

}  // namespace

void symmetrize(const ConfigGrid& grid, const std::vector<SlotPermutation>& perms,
                std::span<const cplx> in, std::span<cplx> out) {
  symmetrize_impl<cplx>(grid, perms, in, out);
}

void symmetrize(const ConfigGrid& grid, const std::vector<SlotPermutation>& perms,
                std::span<const double> in, std::span<double> out) {
  symmetrize_impl<double>(grid, perms, in, out);
}

}  // namespace kernels
}  // namespace ccqm
