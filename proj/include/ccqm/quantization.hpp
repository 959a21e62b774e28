#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "ccqm/grid.hpp"

namespace ccqm {

enum class CellMode { Fixed, Variable };

/// Magnitude and phase quanta for discrete wavefunctions.
///
/// Magnitudes are quantized in cell-normalized units: a cell amplitude c
/// satisfies sum |c|^2 = 1 over the grid, so f0 is dimensionless and the
/// largest representable relative volume is of order 1/f0^2.
struct QuantizationParams {
  double f0 = 1e-3;
  // theta0 = 2*pi / phase_levels.
  std::uint32_t phase_levels = 16;
  CellMode cell_mode = CellMode::Fixed;
  // Fixed: the cell length a. Variable: the ratio a_tilde.
  double cell_parameter = 1.0;
  bool quantize_during_evolution = false;

  double theta0() const noexcept { return 2.0 * std::numbers::pi / phase_levels; }

  // Throws Error(InvalidConfig) when f0 <= 0 or phase_levels < 4.
  void validate() const;

  bool operator==(const QuantizationParams&) const = default;
};

/// Cell length of every particle under the configured cell mode.
/// Variable mode needs each particle's mean_de_broglie_wavelength to be set.
std::vector<double> resolve_cell_lengths(const QuantizationParams& quant,
                                         const std::vector<ParticleMeta>& particles);

}  // namespace ccqm
