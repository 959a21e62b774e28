#include "ccqm/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ccqm/error.hpp"

namespace ccqm {

void GRWParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw_config("GRW alpha must be positive");
  if (!(hit_rate_lambda > 0.0) || !std::isfinite(hit_rate_lambda))
    throw_config("GRW hit rate must be positive");
}

void CCQMParams::validate() const {
  if (v_c < 2) throw_config("critical relative volume v_c must be at least 2");
  if (!(collapse_fraction > 0.0 && collapse_fraction < 1.0))
    throw_config("collapse fraction F must lie strictly between 0 and 1");
  if (!(split_attempt_probability >= 0.0 && split_attempt_probability <= 1.0))
    throw_config("split attempt probability must lie in [0, 1]");
  if (!(epsilon_min > 0.0) || !(epsilon_max > epsilon_min) || !std::isfinite(epsilon_max))
    throw_config("epsilon bracket must satisfy 0 < epsilon_min < epsilon_max");
  if (max_bisection_steps == 0) throw_config("max_bisection_steps must be positive");
}

std::size_t CCQMParams::target_volume(std::size_t v_pre) const {
  const double t = std::floor(collapse_fraction * static_cast<double>(v_pre) + 0.5);
  auto target = std::max<std::size_t>(1, static_cast<std::size_t>(t));
  // A state far above v_c (after a merge) must still land strictly below it,
  // including the one-cell solver tolerance.
  if (target + 1 >= v_c) target = v_c > 2 ? v_c - 2 : 1;
  return target;
}

namespace {

std::size_t volume_of(const DiscreteWavefunction& psi) {
  return psi.is_quantized() ? relative_volume(psi) : relative_volume(quantize(psi));
}

std::vector<Position> center_positions(const ConfigGrid& grid, std::span<const std::size_t> blocks) {
  std::vector<Position> out(grid.num_particles());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = grid.position(k, blocks[k]);
  return out;
}

std::size_t sample_cdf(std::span<const double> cumulative, Rng& rng) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
  if (i >= cumulative.size()) i = cumulative.size() - 1;
  // Never land on a zero-probability cell.
  while (i > 0 && cumulative[i] == cumulative[i - 1]) --i;
  return i;
}

std::vector<double> running_sum(std::span<const double> weights) {
  std::vector<double> c(weights.size());
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) c[i] = (s += weights[i]);
  return c;
}

}  // namespace

CenterSampler::CenterSampler(const DiscreteWavefunction& psi) {
  const auto amps = psi.amplitudes();
  cumulative_.resize(amps.size());
  double s = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) cumulative_[i] = (s += std::norm(amps[i]));
  if (!(s > 0.0)) throw Error(ErrorCode::ZeroWavefunction, "cannot sample a centre from a zero state");
}

std::size_t CenterSampler::operator()(Rng& rng) const { return sample_cdf(cumulative_, rng); }

std::size_t sample_collapse_center(const DiscreteWavefunction& psi, Rng& rng) {
  return CenterSampler(psi)(rng);
}

Position sample_grw_center(const DiscreteWavefunction& psi, std::size_t k, double alpha, Rng& rng) {
  const ConfigGrid& grid = psi.grid();
  if (k >= grid.num_particles()) throw_config("particle index out of range");
  std::vector<double> marginal(grid.cells_per_particle(k));
  kernels::marginal_probability(grid, psi.amplitudes(), k, marginal);
  const std::size_t b = sample_cdf(running_sum(marginal), rng);
  Position x = grid.position(k, b);
  // j^2 is a normal density with variance 1/(2 alpha) per axis.
  const double sigma = 1.0 / std::sqrt(2.0 * alpha);
  for (int d = 0; d < grid.spatial_dims(); ++d) x[d] += sigma * rng.normal();
  return x;
}

CollapseOutcome grw_localize(const DiscreteWavefunction& psi, std::size_t k, const Position& center,
                             double alpha, double time) {
  const ConfigGrid& grid = psi.grid();
  if (k >= grid.num_particles()) throw_config("particle index out of range");
  if (!(alpha > 0.0)) throw_config("GRW alpha must be positive");
  const int dims = grid.spatial_dims();
  const double prefactor = std::pow(alpha / std::numbers::pi, dims / 4.0);
  std::vector<double> j(grid.cells_per_particle(k));
  for (std::size_t b = 0; b < j.size(); ++b) {
    const Position x = grid.position(k, b);
    double r2 = 0.0;
    for (int d = 0; d < dims; ++d) r2 += (x[d] - center[d]) * (x[d] - center[d]);
    j[b] = prefactor * std::exp(-0.5 * alpha * r2);
  }
  std::vector<cplx> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  kernels::multiply_particle_factor(grid, k, j, amps);
  const double n2 = kernels::norm_squared(amps);
  if (!(n2 > 0.0))
    throw Error(ErrorCode::VanishingWavefunction,
                "vanishing wavefunction: GRW jump factor has no overlap with the state (alpha too large)");
  kernels::scale(amps, 1.0 / std::sqrt(n2));

  CollapseOutcome out{quantize(grid, amps, psi.quant()), {}};
  CollapseEvent& e = out.event;
  e.time = time;
  e.kind = EventKind::GRWHit;
  e.particle = k;
  e.center.assign(grid.num_particles(), Position{});
  e.center[k] = center;
  e.width_param = alpha;
  e.v_pre = volume_of(psi);
  e.v_post = relative_volume(out.state);
  e.labels = {grid.particle(k).label};
  return out;
}

CollapseOutcome grw_hit(const DiscreteWavefunction& psi, std::size_t k, const GRWParams& params, Rng& rng,
                        double time) {
  params.validate();
  const std::uint64_t offset = rng.draws();
  const Position center = sample_grw_center(psi, k, params.alpha, rng);
  CollapseOutcome out = grw_localize(psi, k, center, params.alpha, time);
  out.event.seed = rng.seed();
  out.event.rng_offset = offset;
  out.event.rng_draws = rng.draws() - offset;
  return out;
}

std::vector<ScheduledHit> grw_schedule(std::size_t n_particles, double hit_rate_lambda, double horizon,
                                       Rng& rng) {
  if (n_particles == 0) throw_config("GRW schedule needs at least one particle");
  if (!(hit_rate_lambda > 0.0)) throw_config("GRW hit rate must be positive");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw_config("GRW horizon must be non-negative");
  std::vector<ScheduledHit> hits;
  const double rate = static_cast<double>(n_particles) * hit_rate_lambda;
  double t = rng.exponential(rate);
  while (t < horizon) {
    hits.push_back({t, static_cast<std::size_t>(rng.uniform_index(n_particles))});
    t += rng.exponential(rate);
  }
  return hits;
}

double grw_mean_interval(double n_particles, double hit_rate_lambda) {
  if (!(n_particles > 0.0) || !(hit_rate_lambda > 0.0))
    throw_config("mean interval needs positive N and lambda");
  return 1.0 / (n_particles * hit_rate_lambda);
}

std::vector<double> ccqm_jump_factor(const ConfigGrid& grid, std::span<const std::size_t> center_blocks,
                                     double epsilon) {
  if (!(epsilon > 0.0)) throw_config("epsilon must be positive");
  if (center_blocks.size() != grid.num_particles()) throw_config("one centre block per particle required");
  std::vector<double> field(grid.total_cells());
  kernels::gaussian_product_field(grid, center_blocks, epsilon, field);
  const auto groups = grid.identical_groups();
  if (groups.empty()) return field;
  for (const auto& g : groups)
    for (std::size_t m = 1; m < g.size(); ++m)
      if (!grid.same_particle_geometry(g[0], g[m]))
        throw_config("identical particles must share grid geometry");
  const auto perms = group_permutations(grid.num_particles(), groups, std::vector<bool>(groups.size(), false));
  std::vector<double> symmetric(field.size());
  kernels::symmetrize(grid, perms, field, symmetric);
  return symmetric;
}

namespace {

// Unnormalized jump * psi; returns false when nothing is left.
bool jumped_amplitudes(const DiscreteWavefunction& psi, std::size_t center_cell, double epsilon,
                       std::vector<cplx>& amps) {
  const ConfigGrid& grid = psi.grid();
  std::vector<std::size_t> blocks(grid.num_particles());
  grid.decompose(center_cell, blocks);
  const std::vector<double> field = ccqm_jump_factor(grid, blocks, epsilon);
  amps.assign(psi.amplitudes().begin(), psi.amplitudes().end());
  kernels::multiply(amps, std::span<const double>(field));
  const double n2 = kernels::norm_squared(amps);
  if (!(n2 > 0.0)) return false;
  kernels::scale(amps, 1.0 / std::sqrt(n2));
  return true;
}

}  // namespace

std::size_t post_collapse_volume(const DiscreteWavefunction& psi, std::size_t center_cell, double epsilon,
                                 const QuantizationParams& quant) {
  std::vector<cplx> amps;
  if (!jumped_amplitudes(psi, center_cell, epsilon, amps)) return 0;
  std::vector<std::uint32_t> levels(amps.size()), phases(amps.size());
  kernels::quantize_cells(amps, quant.f0, quant.phase_levels, levels, phases);
  return kernels::level_moments(levels).support;
}

DiscreteWavefunction apply_ccqm_jump(const DiscreteWavefunction& psi, std::size_t center_cell, double epsilon,
                                     const QuantizationParams& quant) {
  std::vector<cplx> amps;
  if (!jumped_amplitudes(psi, center_cell, epsilon, amps))
    throw Error(ErrorCode::VanishingWavefunction, "vanishing wavefunction after the CCQM jump");
  return quantize(psi.grid(), amps, quant);
}

EpsilonSolution ccqm_solve_epsilon(const DiscreteWavefunction& psi, std::size_t center_cell,
                                   const CCQMParams& params, const QuantizationParams& quant) {
  params.validate();
  if (center_cell >= psi.size()) throw_config("collapse centre outside the grid");
  EpsilonSolution sol;
  sol.v_pre = volume_of(psi);
  sol.target = params.target_volume(sol.v_pre);
  auto volume = [&](double eps) {
    ++sol.evaluations;
    return post_collapse_volume(psi, center_cell, eps, quant);
  };
  auto within = [&](std::size_t v) { return v + 1 >= sol.target && v <= sol.target + 1; };

  double lo = params.epsilon_min, hi = params.epsilon_max;
  std::size_t v_lo = volume(lo), v_hi = volume(hi);
  if (v_lo <= sol.target) {
    if (within(v_lo)) {
      sol.epsilon = lo;
      sol.v_post = v_lo;
      return sol;
    }
    throw Error(ErrorCode::Bracket, "epsilon bracket: volume at epsilon_min is " + std::to_string(v_lo) +
                                        ", already below the target " + std::to_string(sol.target));
  }
  if (v_hi > sol.target)
    throw Error(ErrorCode::Bracket, "epsilon bracket: volume at epsilon_max is still " +
                                        std::to_string(v_hi) + ", above the target " +
                                        std::to_string(sol.target));

  // Invariant: v(lo) > target >= v(hi).
  for (std::size_t it = 0; it < params.max_bisection_steps; ++it) {
    if (v_hi + 1 >= sol.target) break;
    if (std::log(hi / lo) < 1e-13) break;
    const double mid = std::sqrt(lo * hi);
    const std::size_t v_mid = volume(mid);
    if (v_mid > sol.target) {
      lo = mid;
      v_lo = v_mid;
    } else {
      hi = mid;
      v_hi = v_mid;
    }
  }
  // The volume moves in integer jumps; when hi overshoots by more than one
  // cell but lo is within tolerance, lo is the better answer.
  if (v_hi + 1 < sol.target && v_lo <= sol.target + 1) {
    sol.epsilon = lo;
    sol.v_post = v_lo;
  } else {
    sol.epsilon = hi;
    sol.v_post = v_hi;
  }
  return sol;
}

CollapseOutcome ccqm_collapse(const DiscreteWavefunction& psi, const CCQMParams& params,
                              const QuantizationParams& quant, Rng& rng, double time) {
  params.validate();
  if (!psi.is_quantized()) throw_config("ccqm_collapse needs a quantized wavefunction");
  const std::size_t v_pre = relative_volume(psi);
  if (v_pre < params.v_c)
    throw_config("ccqm_collapse: relative volume " + std::to_string(v_pre) + " is below v_c " +
                 std::to_string(params.v_c));
  const std::uint64_t offset = rng.draws();
  const std::size_t center = sample_collapse_center(psi, rng);
  const EpsilonSolution sol = ccqm_solve_epsilon(psi, center, params, quant);

  CollapseOutcome out{apply_ccqm_jump(psi, center, sol.epsilon, quant), {}};
  const ConfigGrid& grid = psi.grid();
  std::vector<std::size_t> blocks(grid.num_particles());
  grid.decompose(center, blocks);
  CollapseEvent& e = out.event;
  e.time = time;
  e.kind = EventKind::CCQMCollapse;
  e.center_cell = center;
  e.center = center_positions(grid, blocks);
  e.width_param = sol.epsilon;
  e.v_pre = v_pre;
  e.v_post = relative_volume(out.state);
  e.seed = rng.seed();
  e.rng_offset = offset;
  e.rng_draws = rng.draws() - offset;
  for (const auto& p : grid.particles()) e.labels.push_back(p.label);
  return out;
}

CycleResult spread_collapse_cycles(const DiscreteWavefunction& psi, const PotentialSpec& potential,
                                   const EvolutionConfig& evolution, const CCQMParams& params,
                                   const QuantizationParams& quant, std::size_t n_cycles, Rng& rng,
                                   const SpreadOptions& spread) {
  params.validate();
  CycleResult result;
  result.state = psi.is_quantized() ? psi : quantize(psi.grid(), psi.amplitudes(), quant);
  result.trace.push_back(measure_volume(result.state, quant, 0.0));

  for (std::size_t cycle = 0; cycle < n_cycles; ++cycle) {
    if (relative_volume(result.state) < params.v_c) {
      SpreadResult s = spread_until_volume(result.state, potential, evolution, params.v_c, quant, spread);
      for (std::size_t i = 1; i < s.trace.size(); ++i) {
        VolumeSample sample = s.trace[i];
        sample.time += result.time;
        result.trace.push_back(sample);
      }
      result.time += s.elapsed;
      result.state = quantize(s.state.grid(), s.state.amplitudes(), quant);
    }
    CollapseOutcome c = ccqm_collapse(result.state, params, quant, rng, result.time);
    result.state = std::move(c.state);
    result.events.push_back(std::move(c.event));
    result.trace.push_back(measure_volume(result.state, quant, result.time));
  }
  return result;
}

}  // namespace ccqm
