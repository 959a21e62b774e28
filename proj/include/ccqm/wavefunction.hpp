#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ccqm/grid.hpp"
#include "ccqm/kernels.hpp"
#include "ccqm/quantization.hpp"

namespace ccqm {

/// Wavefunction on a configuration-space grid.
///
/// Amplitudes are stored as cell amplitudes c = psi * sqrt(cell measure), so
/// a normalized state has sum |c|^2 == 1 and the density amplitude is
/// c / sqrt(cell_measure). A wavefunction is either continuous (straight out
/// of evolution) or quantized. A quantized state also carries its integer
/// lattice: magnitude levels n_f and phase levels n_theta, with
/// c = level_scale * n_f * f0 * exp(i n_theta theta0). level_scale is the
/// renormalization factor applied after rounding, so the lattice is exact
/// while the amplitudes stay normalized.
class DiscreteWavefunction {
 public:
  DiscreteWavefunction() = default;
  /// Continuous state; amplitudes are taken as given (not normalized).
  DiscreteWavefunction(ConfigGrid grid, std::vector<cplx> cell_amplitudes, QuantizationParams quant);

  /// Quantized state from its integer lattice. Throws if the lattice is empty.
  static DiscreteWavefunction from_levels(ConfigGrid grid, std::vector<std::uint32_t> magnitude_levels,
                                          std::vector<std::uint32_t> phase_levels,
                                          QuantizationParams quant);

  const ConfigGrid& grid() const noexcept { return grid_; }
  const QuantizationParams& quant() const noexcept { return quant_; }
  std::size_t size() const noexcept { return amplitudes_.size(); }
  std::span<const cplx> amplitudes() const noexcept { return amplitudes_; }
  cplx density_amplitude(std::size_t cell) const;

  bool is_quantized() const noexcept { return quantized_; }
  std::span<const std::uint32_t> magnitude_levels() const noexcept { return magnitude_levels_; }
  std::span<const std::uint32_t> phase_levels() const noexcept { return phase_levels_; }
  double level_scale() const noexcept { return level_scale_; }

  double norm_squared() const;

  /// Continuous copy with new amplitudes on the same grid.
  DiscreteWavefunction with_amplitudes(std::vector<cplx> cell_amplitudes) const;
  /// Same amplitudes (and lattice) on a relabelled grid of identical shape.
  DiscreteWavefunction with_grid(ConfigGrid grid) const;
  DiscreteWavefunction with_quant(QuantizationParams quant) const;

 private:
  ConfigGrid grid_;
  QuantizationParams quant_;
  std::vector<cplx> amplitudes_;
  std::vector<std::uint32_t> magnitude_levels_;
  std::vector<std::uint32_t> phase_levels_;
  double level_scale_ = 1.0;
  bool quantized_ = false;

  friend DiscreteWavefunction normalize(const DiscreteWavefunction& psi);
};

/// Round magnitudes to the nearest multiple of f0 (ties up), drop cells that
/// round to zero, round surviving phases to multiples of theta0, renormalize.
/// Throws Error(VanishingWavefunction) when every cell rounds to zero.
DiscreteWavefunction quantize(const ConfigGrid& grid, std::span<const cplx> raw_cell_amplitudes,
                              const QuantizationParams& quant);
DiscreteWavefunction quantize(const DiscreteWavefunction& psi);

/// Number of cells with n_f >= 1. Requires a quantized state.
std::size_t relative_volume(const DiscreteWavefunction& psi);

/// Scales to unit norm; support and phases unchanged. Throws Error(ZeroWavefunction).
DiscreteWavefunction normalize(const DiscreteWavefunction& psi);

/// Position-space density of one particle, marginalized over all the others.
struct DensityTable {
  std::size_t particle = 0;
  int spatial_dims = 1;
  std::vector<std::size_t> extents;
  double cell_length = 1.0;
  std::vector<double> density;  // per unit length^dims

  double cell_measure() const;
  double probability(std::size_t block) const { return density[block] * cell_measure(); }
  double total_probability() const;
};

DensityTable project_density(const DiscreteWavefunction& psi, std::size_t k);

/// Bosonic symmetrization / fermionic antisymmetrization over every group of
/// identical particles, followed by renormalization and quantization.
/// Throws Error(PauliExclusion) when antisymmetrization annihilates the state.
DiscreteWavefunction symmetrize(const DiscreteWavefunction& psi);

/// Applies the (anti)symmetrizer without renormalizing or quantizing.
std::vector<cplx> apply_symmetrizer(const ConfigGrid& grid, std::span<const cplx> cell_amplitudes);

/// Swap the coordinate blocks of particles i and j (which must share geometry).
DiscreteWavefunction exchange_particles(const DiscreteWavefunction& psi, std::size_t i, std::size_t j);

/// Continuous product state psi1(x_1..x_j) psi2(x_{j+1}..x_N) on the concatenated grid.
DiscreteWavefunction tensor_product(const DiscreteWavefunction& left, const DiscreteWavefunction& right);

/// Samples a density amplitude psi(x_1, ..., x_N) at cell centres, converts to
/// cell amplitudes and normalizes. The callback receives one position per particle.
using AmplitudeFunction = std::function<cplx(std::span<const Position>)>;
DiscreteWavefunction make_wavefunction(const ConfigGrid& grid, const QuantizationParams& quant,
                                       const AmplitudeFunction& fn);

/// h / <|p_k|> (h = 2 pi in natural units), with <|p_k|> taken under the
/// momentum-space density of the current state.
double mean_de_broglie_wavelength(const DiscreteWavefunction& psi, std::size_t k);

/// Re-estimates every particle's mean de Broglie wavelength and stores it in
/// the particle metadata. The grid itself is not resampled; feed the updated
/// particles to resolve_cell_lengths() when laying out a variable-cell grid.
DiscreteWavefunction refresh_de_broglie_wavelengths(const DiscreteWavefunction& psi);

}  // namespace ccqm
