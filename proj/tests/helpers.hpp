#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "ccqm/grid.hpp"
#include "ccqm/rng.hpp"
#include "ccqm/wavefunction.hpp"

namespace ccqm::test {

inline std::vector<ParticleMeta> particles(std::size_t n, Statistics s = Statistics::Distinguishable,
                                           std::uint64_t first_label = 0) {
  std::vector<ParticleMeta> p(n);
  for (std::size_t k = 0; k < n; ++k) {
    p[k].statistics = s;
    p[k].label = first_label + k;
  }
  return p;
}

inline ConfigGrid line_grid(std::size_t cells, double a, std::size_t n = 1,
                            Statistics s = Statistics::Distinguishable, std::uint64_t first_label = 0) {
  return ConfigGrid::uniform(particles(n, s, first_label), 1, cells, a);
}

inline QuantizationParams quant(double f0, std::uint32_t phase_levels = 16) {
  QuantizationParams q;
  q.f0 = f0;
  q.phase_levels = phase_levels;
  return q;
}

/// Product of 1D Gaussians exp(-(x - c_k)^2 / (4 w^2) + i p_k x), normalized, continuous.
inline DiscreteWavefunction gaussian(const ConfigGrid& grid, const QuantizationParams& q,
                                     std::vector<double> centres, double w, std::vector<double> momenta = {}) {
  return make_wavefunction(grid, q, [&](std::span<const Position> x) {
    double e = 0.0, ph = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = x[k][0] - centres[k];
      e += d * d / (4.0 * w * w);
      if (!momenta.empty()) ph += momenta[k] * x[k][0];
    }
    return std::exp(std::complex<double>(-e, ph));
  });
}

/// Random complex amplitudes with a Gaussian envelope, normalized, continuous.
inline DiscreteWavefunction random_state(const ConfigGrid& grid, const QuantizationParams& q, std::uint64_t seed,
                                         double envelope) {
  Rng rng(seed);
  return make_wavefunction(grid, q, [&](std::span<const Position> x) {
    double r2 = 0.0;
    for (const auto& p : x) r2 += p[0] * p[0];
    return std::complex<double>(rng.normal(), rng.normal()) * std::exp(-r2 / (4.0 * envelope * envelope));
  });
}

}  // namespace ccqm::test
