#pragma once

// Data-parallel inner loops shared by the wavefunction, evolution and
// collapse code. Everything here is OpenMP-parallel; the serial reference
// versions in ccqm/reference.hpp have identical signatures and are kept
// for testing and benchmarking.
//
// Reductions are blocked with a fixed block size and the partial sums are
// combined serially, so results do not depend on the thread count.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "ccqm/grid.hpp"

namespace ccqm {

using cplx = std::complex<double>;

/// A permutation of particle slots with its sign (+1/-1), used by symmetrizers.
struct SlotPermutation {
  std::vector<std::size_t> slots;
  double sign = 1.0;
};

/// All permutations generated by permuting each group independently.
/// `antisymmetric_group[g]` selects the sign convention for group g.
std::vector<SlotPermutation> group_permutations(std::size_t num_particles,
                                                const std::vector<std::vector<std::size_t>>& groups,
                                                const std::vector<bool>& antisymmetric_group);

struct LevelMoments {
  std::size_t support = 0;     // cells with n_f >= 1
  std::uint64_t sum_sq = 0;    // sum of n_f^2, exact
  std::uint32_t max_level = 0;
};

/// Nearest phase level of z (ties up), for M = phase_levels. With M even the
/// rounding is done on the upper half-plane representative, so -z always lands
/// exactly M/2 levels from z and antisymmetric states stay antisymmetric.
inline std::uint32_t nearest_phase_level(cplx z, std::uint32_t phase_levels) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::uint64_t offset = 0;
  if (phase_levels % 2 == 0 && (z.imag() < 0.0 || (z.imag() == 0.0 && z.real() < 0.0))) {
    z = -z;
    offset = phase_levels / 2;
  }
  double phase = std::atan2(z.imag(), z.real());
  if (phase < 0.0) phase += two_pi;
  const auto step = static_cast<std::uint64_t>(std::floor(phase * phase_levels / two_pi + 0.5));
  return static_cast<std::uint32_t>((step + offset) % phase_levels);
}

namespace kernels {

constexpr std::size_t kReductionBlock = 8192;

/// Nearest-multiple rounding (ties up) of magnitudes to f0 and of phases
/// to 2*pi/phase_levels. Cells with n_f == 0 get n_theta == 0.
void quantize_cells(std::span<const cplx> amplitudes, double f0, std::uint32_t phase_levels,
                    std::span<std::uint32_t> magnitude_levels, std::span<std::uint32_t> phase_index);

LevelMoments level_moments(std::span<const std::uint32_t> magnitude_levels);

/// out[i] = scale * n_f[i] * f0 * exp(i * n_theta[i] * theta0).
void reconstruct_levels(std::span<const std::uint32_t> magnitude_levels,
                        std::span<const std::uint32_t> phase_index, double f0,
                        std::uint32_t phase_levels, double scale, std::span<cplx> out);

double norm_squared(std::span<const cplx> amplitudes);
double max_abs(std::span<const cplx> amplitudes);
void scale(std::span<cplx> amplitudes, double factor);
void multiply(std::span<cplx> amplitudes, std::span<const cplx> factors);
void multiply(std::span<cplx> amplitudes, std::span<const double> factors);

/// Multiply by a per-block factor of particle k (broadcast over the other particles).
void multiply_particle_factor(const ConfigGrid& grid, std::size_t k,
                              std::span<const double> block_factor, std::span<cplx> amplitudes);

/// Probability of each block of particle k: sum of |c|^2 over all other particles.
void marginal_probability(const ConfigGrid& grid, std::span<const cplx> amplitudes,
                          std::size_t k, std::span<double> out);

/// Product over particles of (eps/pi)^(d/4) exp(-eps |x_k - x'_k|^2 / 2),
/// where x'_k is the position of centre_blocks[k].
void gaussian_product_field(const ConfigGrid& grid, std::span<const std::size_t> centre_blocks,
                            double eps, std::span<double> out);

/// out[cell] = (1/|P|) sum_P sign(P) in[P cell].
void symmetrize(const ConfigGrid& grid, const std::vector<SlotPermutation>& perms,
                std::span<const cplx> in, std::span<cplx> out);
void symmetrize(const ConfigGrid& grid, const std::vector<SlotPermutation>& perms,
                std::span<const double> in, std::span<double> out);

}  // namespace kernels
}  // namespace ccqm
