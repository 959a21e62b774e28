#include "ccqm/world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ccqm/error.hpp"

namespace ccqm {

std::vector<std::uint64_t> world_labels(const WorldState& world) {
  std::vector<std::uint64_t> labels;
  for (const auto& m : world.members)
    for (const auto& p : m.grid().particles()) labels.push_back(p.label);
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
    throw_config("world particle ownership is not a partition (duplicate label)");
  return labels;
}

namespace {

DiscreteWavefunction quantized(const DiscreteWavefunction& psi, const QuantizationParams& quant) {
  return quantize(psi.grid(), psi.amplitudes(), quant);
}

}  // namespace

WorldState step_world(const WorldState& world, double dt, const WorldRules& rules, Rng& rng,
                      std::vector<CollapseEvent>& log) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw_config("world dt must be positive");
  if (rules.potential.kind == PotentialKind::Tabulated)
    throw_config("world members need a particle-count independent potential");
  rules.evolution.validate();
  rules.ccqm.validate();
  rules.merge.validate();
  rules.split.validate();
  const auto labels_before = world_labels(world);

  WorldState next;
  next.time = world.time + dt;

  // Free evolution.
  const auto substeps = static_cast<std::size_t>(std::ceil(dt / rules.evolution.dt - 1e-9));
  EvolutionConfig cfg = rules.evolution;
  cfg.dt = dt / static_cast<double>(std::max<std::size_t>(1, substeps));
  std::vector<DiscreteWavefunction> members;
  for (const auto& m : world.members)
    members.push_back(evolve(m, rules.potential, cfg, std::max<std::size_t>(1, substeps)));

  // Pairwise merges; each member merges at most once per step.
  std::vector<bool> consumed(members.size(), false);
  std::vector<DiscreteWavefunction> after_merge;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (consumed[i]) continue;
    bool merged = false;
    for (std::size_t j = i + 1; j < members.size() && !merged; ++j) {
      if (consumed[j]) continue;
      const double strength = interaction_strength(members[i], members[j], rules.merge);
      const double p = merge_probability(strength, dt, rules.merge);
      if (p <= 0.0) continue;
      const std::uint64_t offset = rng.draws();
      if (!rng.bernoulli(p)) continue;
      const std::size_t vi = relative_volume(quantized(members[i], rules.quant));
      const std::size_t vj = relative_volume(quantized(members[j], rules.quant));
      DiscreteWavefunction m = merge(members[i].with_quant(rules.quant), members[j], rules.merge.max_cells);
      CollapseEvent e;
      e.time = next.time;
      e.kind = EventKind::Merge;
      e.width_param = strength;
      e.v_pre = vi * vj;
      e.v_post = relative_volume(m);
      e.seed = rng.seed();
      e.rng_offset = offset;
      e.rng_draws = rng.draws() - offset;
      for (const auto& q : m.grid().particles()) e.labels.push_back(q.label);
      log.push_back(std::move(e));
      after_merge.push_back(std::move(m));
      consumed[i] = consumed[j] = true;
      merged = true;
    }
    if (!merged) after_merge.push_back(std::move(members[i]));
  }

  // Critical-volume handling: split when attempted and a candidate qualifies, else collapse.
  for (auto& m : after_merge) {
    DiscreteWavefunction q = quantized(m, rules.quant);
    if (relative_volume(q) < rules.ccqm.v_c) {
      next.members.push_back(std::move(m));
      continue;
    }
    if (q.grid().num_particles() >= 2 && rules.ccqm.split_attempt_probability > 0.0) {
      const std::uint64_t offset = rng.draws();
      if (rng.bernoulli(rules.ccqm.split_attempt_probability)) {
        const auto candidates = split_candidates(q, rules.split);
        if (!candidates.empty() && candidates.front().qualifies) {
          SplitOutcome s = split(q, candidates.front().partition, rules.split, next.time);
          s.event.seed = rng.seed();
          s.event.rng_offset = offset;
          s.event.rng_draws = rng.draws() - offset;
          log.push_back(std::move(s.event));
          next.members.push_back(std::move(s.a));
          next.members.push_back(std::move(s.b));
          continue;
        }
      }
    }
    CollapseOutcome c = ccqm_collapse(q, rules.ccqm, rules.quant, rng, next.time);
    log.push_back(std::move(c.event));
    next.members.push_back(std::move(c.state));
  }

  if (world_labels(next) != labels_before)
    throw std::logic_error("step_world changed the particle set");
  return next;
}

}  // namespace ccqm
