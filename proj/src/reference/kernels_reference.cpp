#include "ccqm/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ccqm::reference {

void quantize_cells(std::span<const cplx> amplitudes, double f0, std::uint32_t phase_levels,
                    std::span<std::uint32_t> magnitude_levels, std::span<std::uint32_t> phase_index) {
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const double m = std::abs(amplitudes[i]) / f0;
    const auto levels = static_cast<std::uint64_t>(std::floor(m + 0.5));
    magnitude_levels[i] = static_cast<std::uint32_t>(levels);
    if (levels == 0) {
      phase_index[i] = 0;
      continue;
    }
    phase_index[i] = nearest_phase_level(amplitudes[i], phase_levels);
  }
}

LevelMoments level_moments(std::span<const std::uint32_t> magnitude_levels) {
  LevelMoments m;
  for (std::uint32_t l : magnitude_levels) {
    if (l > 0) ++m.support;
    m.sum_sq += static_cast<std::uint64_t>(l) * l;
    m.max_level = std::max(m.max_level, l);
  }
  return m;
}

void reconstruct_levels(std::span<const std::uint32_t> magnitude_levels,
                        std::span<const std::uint32_t> phase_index, double f0,
                        std::uint32_t phase_levels, double scale_factor, std::span<cplx> out) {
  const std::uint32_t half = phase_levels % 2 == 0 ? phase_levels / 2 : phase_levels;
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Upper-half levels are the exact negatives of the lower half when M is even.
    const std::uint32_t m = phase_index[i] >= half ? phase_index[i] - half : phase_index[i];
    const double angle = 2.0 * std::numbers::pi * m / phase_levels;
    const cplx u(std::cos(angle), std::sin(angle));
    out[i] = (scale_factor * f0 * magnitude_levels[i]) * (m == phase_index[i] ? u : -u);
  }
}

double norm_squared(std::span<const cplx> amplitudes) {
  double s = 0.0;
  for (const cplx& z : amplitudes) s += std::norm(z);
  return s;
}

double max_abs(std::span<const cplx> amplitudes) {
  double m = 0.0;
  for (const cplx& z : amplitudes) m = std::max(m, std::abs(z));
  return m;
}

void scale(std::span<cplx> amplitudes, double factor) {
  for (cplx& z : amplitudes) z *= factor;
}

void multiply(std::span<cplx> amplitudes, std::span<const cplx> factors) {
  for (std::size_t i = 0; i < amplitudes.size(); ++i) amplitudes[i] *= factors[i];
}

void multiply(std::span<cplx> amplitudes, std::span<const double> factors) {
  for (std::size_t i = 0; i < amplitudes.size(); ++i) amplitudes[i] *= factors[i];
}

void multiply_particle_factor(const ConfigGrid& grid, std::size_t k,
                              std::span<const double> block_factor, std::span<cplx> amplitudes) {
  std::vector<std::size_t> blocks(grid.num_particles());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    grid.decompose(i, blocks);
    amplitudes[i] *= block_factor[blocks[k]];
  }
}

void marginal_probability(const ConfigGrid& grid, std::span<const cplx> amplitudes,
                          std::size_t k, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<std::size_t> blocks(grid.num_particles());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    grid.decompose(i, blocks);
    out[blocks[k]] += std::norm(amplitudes[i]);
  }
}

void gaussian_product_field(const ConfigGrid& grid, std::span<const std::size_t> centre_blocks,
                            double eps, std::span<double> out) {
  const int dims = grid.spatial_dims();
  std::vector<std::size_t> blocks(grid.num_particles());
  for (std::size_t i = 0; i < out.size(); ++i) {
    grid.decompose(i, blocks);
    double v = 1.0;
    for (std::size_t k = 0; k < grid.num_particles(); ++k) {
      const Position x = grid.position(k, blocks[k]);
      const Position c = grid.position(k, centre_blocks[k]);
      double r2 = 0.0;
      for (int d = 0; d < dims; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
      v *= std::pow(eps / std::numbers::pi, dims / 4.0) * std::exp(-eps * r2 / 2.0);
    }
    out[i] = v;
  }
}

namespace {

template <typename T>
void symmetrize_impl(const ConfigGrid& grid, const std::vector<SlotPermutation>& perms,
                     std::span<const T> in, std::span<T> out) {
  std::vector<std::size_t> blocks(grid.num_particles());
  std::vector<std::size_t> permuted(grid.num_particles());
  for (std::size_t i = 0; i < out.size(); ++i) {
    grid.decompose(i, blocks);
    T acc{};
    for (const auto& p : perms) {
      for (std::size_t s = 0; s < blocks.size(); ++s) permuted[s] = blocks[p.slots[s]];
      acc += p.sign * in[grid.compose(permuted)];
    }
    out[i] = acc / static_cast<double>(perms.size());
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

}  // namespace ccqm::reference
