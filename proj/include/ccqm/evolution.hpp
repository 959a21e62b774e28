#pragma once

#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "ccqm/wavefunction.hpp"

namespace ccqm {

// Natural units throughout: hbar = 1.

enum class PotentialKind { Free, Harmonic, PairGaussianWell, Tabulated };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::Free;
  // Harmonic: 0.5 m omega^2 |x|^2 per particle. A single entry applies to every particle.
  std::vector<double> omega;
  // PairGaussianWell: -depth * exp(-r^2 / (2 range^2)) for each listed pair (all pairs if empty).
  double well_depth = 0.0;
  double well_range = 1.0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  // Tabulated: one real value per configuration cell.
  std::vector<double> table;

  static PotentialSpec free_particle() { return {}; }
  static PotentialSpec harmonic(std::vector<double> omega);
  static PotentialSpec pair_gaussian_well(double depth, double range,
                                          std::vector<std::pair<std::size_t, std::size_t>> pairs = {});
  static PotentialSpec tabulated(std::vector<double> values);
};

/// Potential energy of every configuration cell. Throws on non-finite tables.
std::vector<double> potential_on_grid(const PotentialSpec& potential, const ConfigGrid& grid);

enum class Scheme { SplitStepSpectral, CrankNicolson };

enum class BoundaryPolicy {
  // Hard walls; support must stay boundary_guard_cells away from every edge.
  GuardedHardWall,
  // Periodic test grids (split-step only); no guard-band check.
  Periodic,
};

struct EvolutionConfig {
  double dt = 0.01;
  Scheme scheme = Scheme::SplitStepSpectral;
  std::size_t steps_per_report = 10;
  std::size_t boundary_guard_cells = 4;
  BoundaryPolicy boundary = BoundaryPolicy::GuardedHardWall;

  void validate() const;
};

/// Precomputed propagator for a fixed grid, potential and signed time step.
/// Split-step: Strang splitting exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2) with
/// spectral kinetic energy. Crank-Nicolson: Cayley form with a second-order
/// finite-difference Laplacian and Dirichlet walls, factorized once.
class Propagator {
 public:
  Propagator(const ConfigGrid& grid, const PotentialSpec& potential, Scheme scheme, double dt);
  ~Propagator();
  Propagator(Propagator&&) noexcept;
  Propagator& operator=(Propagator&&) noexcept;

  void step(std::span<cplx> amplitudes, std::size_t n_steps) const;
  double dt() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Checks the guard band: throws Error(GridOverflow) if any cell within
/// `guard_cells` of an edge has magnitude >= f0 / 2.
void check_guard_band(const DiscreteWavefunction& psi, std::size_t guard_cells);

/// Unitary evolution by n_steps of cfg.dt. The result is continuous unless the
/// wavefunction's quantization params request strict per-step quantization.
DiscreteWavefunction evolve(const DiscreteWavefunction& psi, const PotentialSpec& potential,
                            const EvolutionConfig& cfg, std::size_t n_steps);

/// Same as evolve() with the time step negated.
DiscreteWavefunction evolve_backward(const DiscreteWavefunction& psi, const PotentialSpec& potential,
                                     const EvolutionConfig& cfg, std::size_t n_steps);

/// <H> using the Hamiltonian discretization of the given scheme.
double energy_expectation(const DiscreteWavefunction& psi, const PotentialSpec& potential, Scheme scheme);

/// Standard deviation of particle k's position along one axis.
double position_spread(const DiscreteWavefunction& psi, std::size_t k, int axis = 0);

struct VolumeSample {
  double time = 0.0;
  std::size_t relative_volume = 0;
  double max_cell_magnitude_over_f0 = 0.0;
};

struct SpreadOptions {
  // Reports without any volume increase before giving up with Error(Stalled).
  std::size_t patience_reports = 50;
  std::size_t max_reports = 1'000'000;
  // Consecutive reports at or above the target before stopping (1 = raw count).
  std::size_t hysteresis_reports = 1;
};

struct SpreadResult {
  DiscreteWavefunction state;
  double elapsed = 0.0;
  std::vector<VolumeSample> trace;
};

/// Evolves until the relative volume of a quantized copy reaches v_target,
/// sampling every cfg.steps_per_report steps.
SpreadResult spread_until_volume(const DiscreteWavefunction& psi, const PotentialSpec& potential,
                                 const EvolutionConfig& cfg, std::size_t v_target,
                                 const QuantizationParams& quant, const SpreadOptions& options = {});

VolumeSample measure_volume(const DiscreteWavefunction& psi, const QuantizationParams& quant, double time);

/// CSV with header time,relative_volume,max_cell_magnitude_over_f0.
void write_volume_trace_csv(std::ostream& out, std::span<const VolumeSample> trace);

}  // namespace ccqm
