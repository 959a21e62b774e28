#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ccqm/events.hpp"
#include "ccqm/evolution.hpp"
#include "ccqm/rng.hpp"
#include "ccqm/wavefunction.hpp"

namespace ccqm {

struct GRWParams {
  // Localization accuracy; the jump width is 1/sqrt(alpha).
  double alpha = 1.0;
  // Per-particle mean hit frequency.
  double hit_rate_lambda = 1e-16;

  void validate() const;
};

struct CCQMParams {
  std::size_t v_c = 200;
  double collapse_fraction = 0.5;
  double split_attempt_probability = 0.0;
  double epsilon_min = 1e-8;
  double epsilon_max = 1e8;
  std::size_t max_bisection_steps = 200;

  void validate() const;
  // round(F * v_pre), capped at v_c - 2 so that a collapse always ends below v_c.
  std::size_t target_volume(std::size_t v_pre) const;
};

/// Draws configuration cells with probability |c|^2 by inverse CDF.
class CenterSampler {
 public:
  explicit CenterSampler(const DiscreteWavefunction& psi);
  std::size_t operator()(Rng& rng) const;
  std::span<const double> cumulative() const noexcept { return cumulative_; }

 private:
  std::vector<double> cumulative_;
};

/// Born-weighted collapse centre (a configuration cell) of a normalized quantized state.
std::size_t sample_collapse_center(const DiscreteWavefunction& psi, Rng& rng);

struct CollapseOutcome {
  DiscreteWavefunction state;
  CollapseEvent event;
};

// --- GRW baseline ---

/// Samples a GRW centre for particle k from P(x') = ||j(x' - x_k) psi||^2:
/// a Born-weighted cell of the marginal, smeared by the Gaussian j^2.
Position sample_grw_center(const DiscreteWavefunction& psi, std::size_t k, double alpha, Rng& rng);

/// Multiplies by the single-particle jump factor j(x' - x_k), renormalizes and
/// quantizes. Throws Error(VanishingWavefunction) if nothing survives.
CollapseOutcome grw_localize(const DiscreteWavefunction& psi, std::size_t k, const Position& center,
                             double alpha, double time = 0.0);

/// grw_localize with a sampled centre; the event records the generator state.
CollapseOutcome grw_hit(const DiscreteWavefunction& psi, std::size_t k, const GRWParams& params, Rng& rng,
                        double time = 0.0);

struct ScheduledHit {
  double time = 0.0;
  std::size_t particle = 0;
};

/// Poisson process of rate N*lambda on [0, horizon), particle chosen uniformly.
std::vector<ScheduledHit> grw_schedule(std::size_t n_particles, double hit_rate_lambda, double horizon,
                                       Rng& rng);

/// 1 / (N lambda). N is a double so macroscopic particle numbers can be used.
double grw_mean_interval(double n_particles, double hit_rate_lambda);

// --- CCQM ---

/// Multiplier S prod_i j(x_i - x'_i) per cell. The symmetrizer is the bosonic
/// average over each identical-particle group for both bosons and fermions:
/// the multiplier must be exchange-symmetric so that it preserves whichever
/// exchange symmetry the state already has.
std::vector<double> ccqm_jump_factor(const ConfigGrid& grid, std::span<const std::size_t> center_blocks,
                                     double epsilon);

/// Relative volume of quantize(normalize(jump * psi)) for one epsilon.
std::size_t post_collapse_volume(const DiscreteWavefunction& psi, std::size_t center_cell, double epsilon,
                                 const QuantizationParams& quant);

struct EpsilonSolution {
  double epsilon = 0.0;
  std::size_t v_pre = 0;
  std::size_t target = 0;
  std::size_t v_post = 0;
  std::size_t evaluations = 0;
};

/// Log-bisection for the epsilon that brings the volume to round(F v_pre).
/// Throws Error(Bracket) when the bracket does not straddle the target.
EpsilonSolution ccqm_solve_epsilon(const DiscreteWavefunction& psi, std::size_t center_cell,
                                   const CCQMParams& params, const QuantizationParams& quant);

/// Applies the jump factor for a given centre and epsilon, renormalizes and quantizes.
DiscreteWavefunction apply_ccqm_jump(const DiscreteWavefunction& psi, std::size_t center_cell, double epsilon,
                                     const QuantizationParams& quant);

/// Full CCQM event: Born-sampled centre, solved epsilon, jump, quantize.
CollapseOutcome ccqm_collapse(const DiscreteWavefunction& psi, const CCQMParams& params,
                              const QuantizationParams& quant, Rng& rng, double time = 0.0);

struct CycleResult {
  DiscreteWavefunction state;
  std::vector<CollapseEvent> events;
  std::vector<VolumeSample> trace;
  double time = 0.0;
};

/// Repeated spread-until-v_c / collapse cycles. The trace holds every report
/// sample plus one post-collapse sample per event.
CycleResult spread_collapse_cycles(const DiscreteWavefunction& psi, const PotentialSpec& potential,
                                   const EvolutionConfig& evolution, const CCQMParams& params,
                                   const QuantizationParams& quant, std::size_t n_cycles, Rng& rng,
                                   const SpreadOptions& spread = {});

}  // namespace ccqm
