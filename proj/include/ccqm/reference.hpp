#pragma once

// Serial reference implementations of ccqm/kernels.hpp. Straight loops, no
// blocking, no OpenMP. Used as the oracle in kernel tests and as the
// baseline in bench/.

#include "ccqm/kernels.hpp"

namespace ccqm::reference {

void quantize_cells(std::span<const cplx> amplitudes, double f0, std::uint32_t phase_levels,
                    std::span<std::uint32_t> magnitude_levels, std::span<std::uint32_t> phase_index);
LevelMoments level_moments(std::span<const std::uint32_t> magnitude_levels);
void reconstruct_levels(std::span<const std::uint32_t> magnitude_levels,
                        std::span<const std::uint32_t> phase_index, double f0,
                        std::uint32_t phase_levels, double scale, std::span<cplx> out);
double norm_squared(std::span<const cplx> amplitudes);
double max_abs(std::span<const cplx> amplitudes);
void scale(std::span<cplx> amplitudes, double factor);
void multiply(std::span<cplx> amplitudes, std::span<const cplx> factors);
void multiply(std::span<cplx> amplitudes, std::span<const double> factors);
void multiply_particle_factor(const ConfigGrid& grid, std::size_t k,
                              std::span<const double> block_factor, std::span<cplx> amplitudes);
void marginal_probability(const ConfigGrid& grid, std::span<const cplx> amplitudes,
                          std::size_t k, std::span<double> out);
void gaussian_product_field(const ConfigGrid& grid, std::span<const std::size_t> centre_blocks,
                            double eps, std::span<double> out);
void symmetrize(const ConfigGrid& grid, const std::vector<SlotPermutation>& perms,
                std::span<const cplx> in, std::span<cplx> out);
void symmetrize(const ConfigGrid& grid, const std::vector<SlotPermutation>& perms,
                std::span<const double> in, std::span<double> out);

}  // namespace ccqm::reference
