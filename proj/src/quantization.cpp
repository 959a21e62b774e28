#include "ccqm/quantization.hpp"

#include <cmath>
#include <string>

#include "ccqm/error.hpp"

namespace ccqm {

void QuantizationParams::validate() const {
  if (!(f0 > 0.0) || !std::isfinite(f0)) throw_config("quantization f0 must be positive");
  if (phase_levels < 4) throw_config("phase_levels must be at least 4 (theta0 = 2pi/M, M >= 4)");
  if (!(cell_parameter > 0.0) || !std::isfinite(cell_parameter))
    throw_config("cell length parameter must be positive");
}

std::vector<double> resolve_cell_lengths(const QuantizationParams& quant,
                                         const std::vector<ParticleMeta>& particles) {
  quant.validate();
  std::vector<double> lengths;
  lengths.reserve(particles.size());
  for (const auto& p : particles) {
    if (quant.cell_mode == CellMode::Fixed) {
      lengths.push_back(quant.cell_parameter);
      continue;
    }
    if (!(p.mean_de_broglie_wavelength > 0.0))
      throw_config("variable cell mode needs a mean de Broglie wavelength for particle '" +
                   p.species_id + "'");
    lengths.push_back(quant.cell_parameter * p.mean_de_broglie_wavelength);
  }
  return lengths;
}

}  // namespace ccqm
