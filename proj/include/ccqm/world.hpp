#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ccqm/collapse.hpp"
#include "ccqm/ensemble.hpp"
#include "ccqm/evolution.hpp"

namespace ccqm {

/// A set of wavefunctions whose particle sets partition the world's particles.
struct WorldState {
  std::vector<DiscreteWavefunction> members;
  double time = 0.0;
};

struct WorldRules {
  // Single-particle potential applied to every member (Free or Harmonic).
  PotentialSpec potential;
  EvolutionConfig evolution;
  QuantizationParams quant;
  CCQMParams ccqm;
  MergeRule merge;
  SplitRule split;
};

/// Sorted particle labels of every member; throws if a label is owned twice.
std::vector<std::uint64_t> world_labels(const WorldState& world);

/// One world step: evolve every member by dt (in substeps of at most
/// rules.evolution.dt), then merge pairs with the hazard-rate law, then split
/// or collapse every member at or above v_c. Events are appended to `log` in
/// the order they happen.
WorldState step_world(const WorldState& world, double dt, const WorldRules& rules, Rng& rng,
                      std::vector<CollapseEvent>& log);

}  // namespace ccqm
