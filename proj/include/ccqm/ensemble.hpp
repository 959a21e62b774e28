#pragma once

#include <cstddef>
#include <vector>

#include "ccqm/events.hpp"
#include "ccqm/wavefunction.hpp"

namespace ccqm {

enum class InteractionModel { DensityOverlap, PotentialWeightedOverlap };

struct MergeRule {
  // kappa: merge hazard per unit (strength * time).
  double coupling_scale = 1.0;
  InteractionModel model = InteractionModel::DensityOverlap;
  // Pair potential used by PotentialWeightedOverlap: depth * exp(-r^2 / (2 range^2)).
  double pair_depth = 1.0;
  double pair_range = 1.0;
  // Upper bound on the merged configuration grid.
  std::size_t max_cells = std::size_t{1} << 24;

  void validate() const;
};

struct SplitRule {
  // Candidates qualify when their Schmidt weight is at least 1 - eta.
  double eta = 0.01;
  std::size_t max_partitions_examined = 16;

  void validate() const;
};

/// Sum over cross pairs (particle of a, particle of b) of the density overlap
/// sum_x g_i(x) g_j(x) * cell measure. PotentialWeightedOverlap multiplies each
/// pair's overlap by |V| evaluated at the pair's expected separation.
double interaction_strength(const DiscreteWavefunction& a, const DiscreteWavefunction& b, const MergeRule& rule);

/// 1 - exp(-kappa * strength * dt).
double merge_probability(double strength, double dt, const MergeRule& rule);

/// Symmetrized, normalized and quantized product of two wavefunctions with
/// disjoint particle sets. Throws Error(MemoryBudget) or Error(PauliExclusion).
DiscreteWavefunction merge(const DiscreteWavefunction& a, const DiscreteWavefunction& b,
                           std::size_t max_cells = std::size_t{1} << 24);

struct Bipartition {
  std::vector<std::size_t> part_a;
  std::vector<std::size_t> part_b;
  bool operator==(const Bipartition&) const = default;
};

struct SplitCandidate {
  Bipartition partition;
  double score = 0.0;  // leading Schmidt weight
  bool qualifies = false;
};

/// Contiguous cuts first, then the remaining bipartitions (particle 0 always
/// in part_a), up to max_partitions_examined, sorted by descending score.
std::vector<SplitCandidate> split_candidates(const DiscreteWavefunction& psi, const SplitRule& rule);

/// Leading Schmidt weight of one bipartition.
double schmidt_weight(const DiscreteWavefunction& psi, const Bipartition& partition);

struct SplitOutcome {
  DiscreteWavefunction a;
  DiscreteWavefunction b;
  double fidelity = 0.0;
  CollapseEvent event;
};

/// Dominant Schmidt pair of a qualifying bipartition, each factor phase-fixed
/// (largest element real and positive), normalized and quantized.
/// Throws Error(SplitRefused) when the score is below 1 - eta.
SplitOutcome split(const DiscreteWavefunction& psi, const Bipartition& partition, const SplitRule& rule,
                   double time = 0.0);

}  // namespace ccqm
