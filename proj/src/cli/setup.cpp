#include <cmath>
#include <complex>
#include <numbers>

#include "ccqm/error.hpp"
#include "commands.hpp"

namespace ccqm::cli {

GridSpec read_grid(const Block& b, const GridSpec& d) {
  GridSpec g;
  g.particles = b.count("particles", d.particles);
  g.spatial_dims = static_cast<int>(b.count("spatial_dims", static_cast<std::size_t>(d.spatial_dims)));
  g.cells_per_axis = b.count("cells_per_axis", d.cells_per_axis);
  g.cell_length = b.quantity("cell_length", Dimension::Natural, d.cell_length);
  g.mass = b.quantity("mass", Dimension::Natural, d.mass);
  g.species = b.text("species", d.species);
  g.statistics = statistics_from_string(b.text("statistics", std::string(to_string(d.statistics))));
  g.de_broglie_wavelength = b.quantity("de_broglie_wavelength", Dimension::Natural, d.de_broglie_wavelength);
  if (g.particles == 0) throw_config("grid.particles must be positive");
  if (g.spatial_dims < 1 || g.spatial_dims > 3) throw_config("grid.spatial_dims must be 1, 2 or 3");
  if (g.cells_per_axis < 8) throw_config("grid.cells_per_axis must be at least 8");
  if (!(g.cell_length > 0.0)) throw_config("grid.cell_length must be positive");
  if (!(g.mass > 0.0)) throw_config("grid.mass must be positive");
  return g;
}

QuantizationParams read_quantization(const Block& b, const QuantizationParams& d) {
  QuantizationParams q = d;
  q.f0 = b.number("f0", d.f0);
  q.phase_levels = static_cast<std::uint32_t>(b.count("phase_levels", d.phase_levels));
  const std::string mode = b.text("cell_mode", d.cell_mode == CellMode::Fixed ? "fixed" : "variable");
  if (mode == "fixed") q.cell_mode = CellMode::Fixed;
  else if (mode == "variable") q.cell_mode = CellMode::Variable;
  else throw_config("quantization.cell_mode must be 'fixed' or 'variable'");
  q.cell_parameter = b.number("a_tilde", q.cell_mode == CellMode::Variable ? d.cell_parameter : 1.0);
  q.quantize_during_evolution = b.flag("quantize_during_evolution", d.quantize_during_evolution);
  q.validate();
  return q;
}

PotentialSpec read_potential(const Block& b) {
  const std::string kind = b.text("kind", "free");
  if (kind == "free") return PotentialSpec::free_particle();
  if (kind == "harmonic") return PotentialSpec::harmonic(b.quantities("omega", Dimension::Natural, {1.0}));
  if (kind == "pair_gaussian_well")
    return PotentialSpec::pair_gaussian_well(b.quantity("depth", Dimension::Natural, 1.0),
                                             b.quantity("range", Dimension::Natural, 1.0));
  throw_config("potential.kind must be free, harmonic or pair_gaussian_well");
}

EvolutionConfig read_evolution(const Block& b, const EvolutionConfig& d) {
  EvolutionConfig e = d;
  e.dt = b.quantity("dt", Dimension::Natural, d.dt);
  const std::string scheme = b.text("scheme", d.scheme == Scheme::SplitStepSpectral ? "split_step" : "crank_nicolson");
  if (scheme == "split_step") e.scheme = Scheme::SplitStepSpectral;
  else if (scheme == "crank_nicolson") e.scheme = Scheme::CrankNicolson;
  else throw_config("evolution.scheme must be 'split_step' or 'crank_nicolson'");
  e.steps_per_report = b.count("steps_per_report", d.steps_per_report);
  e.boundary_guard_cells = b.count("guard_cells", d.boundary_guard_cells);
  e.validate();
  return e;
}

CCQMParams read_ccqm(const Block& b, const CCQMParams& d) {
  CCQMParams p = d;
  p.v_c = b.count("v_c", d.v_c);
  p.collapse_fraction = b.number("collapse_fraction", d.collapse_fraction);
  p.split_attempt_probability = b.number("split_attempt_probability", d.split_attempt_probability);
  p.epsilon_min = b.quantity("epsilon_min", Dimension::Natural, d.epsilon_min);
  p.epsilon_max = b.quantity("epsilon_max", Dimension::Natural, d.epsilon_max);
  p.max_bisection_steps = b.count("max_bisection_steps", d.max_bisection_steps);
  p.validate();
  return p;
}

SpreadOptions read_spread(const Block& b) {
  SpreadOptions s;
  s.patience_reports = b.count("patience_reports", s.patience_reports);
  s.max_reports = b.count("max_reports", s.max_reports);
  s.hysteresis_reports = b.count("hysteresis_reports", s.hysteresis_reports);
  if (s.patience_reports == 0 || s.max_reports == 0 || s.hysteresis_reports == 0)
    throw_config("spread options must be positive");
  return s;
}

MergeRule read_merge(const Block& b, const MergeRule& d) {
  MergeRule m = d;
  m.coupling_scale = b.quantity("kappa", Dimension::Natural, m.coupling_scale);
  const std::string model =
      b.text("model", d.model == InteractionModel::DensityOverlap ? "density_overlap" : "potential_weighted_overlap");
  if (model == "density_overlap") m.model = InteractionModel::DensityOverlap;
  else if (model == "potential_weighted_overlap") m.model = InteractionModel::PotentialWeightedOverlap;
  else throw_config("merge.model must be density_overlap or potential_weighted_overlap");
  m.pair_depth = b.quantity("pair_depth", Dimension::Natural, m.pair_depth);
  m.pair_range = b.quantity("pair_range", Dimension::Natural, m.pair_range);
  m.max_cells = b.count("max_cells", m.max_cells);
  m.validate();
  return m;
}

SplitRule read_split(const Block& b) {
  SplitRule s;
  s.eta = b.number("eta", s.eta);
  s.max_partitions_examined = b.count("max_partitions_examined", s.max_partitions_examined);
  s.validate();
  return s;
}

ConfigGrid build_grid(const GridSpec& spec, const QuantizationParams& quant, std::uint64_t first_label) {
  std::vector<ParticleMeta> particles(spec.particles);
  for (std::size_t k = 0; k < particles.size(); ++k) {
    particles[k].mass = spec.mass;
    particles[k].species_id = spec.species;
    particles[k].statistics = spec.statistics;
    particles[k].mean_de_broglie_wavelength = spec.de_broglie_wavelength;
    particles[k].label = first_label + k;
  }
  std::vector<double> lengths(spec.particles, spec.cell_length);
  if (quant.cell_mode == CellMode::Variable) lengths = resolve_cell_lengths(quant, particles);
  std::vector<std::size_t> extents(spec.particles * static_cast<std::size_t>(spec.spatial_dims), spec.cells_per_axis);
  return ConfigGrid(std::move(particles), spec.spatial_dims, std::move(extents), std::move(lengths));
}

StateSpec read_state(const Block& b, const StateSpec& d) {
  StateSpec s;
  s.kind = b.text("kind", d.kind);
  s.center = b.quantities("center", Dimension::Natural, d.center);
  s.width = b.quantity("width", Dimension::Natural, d.width);
  s.momentum = b.quantities("momentum", Dimension::Natural, d.momentum);
  s.separation = b.quantity("separation", Dimension::Natural, d.separation);
  s.weights = b.numbers("weights", d.weights);
  if (s.kind != "gaussian" && s.kind != "two_packets" && s.kind != "uniform")
    throw_config("initial_state.kind must be gaussian, two_packets or uniform");
  if (!(s.width > 0.0)) throw_config("initial_state.width must be positive");
  if (s.kind == "two_packets") {
    if (s.weights.size() != 2 || !(s.weights[0] > 0.0) || !(s.weights[1] > 0.0))
      throw_config("initial_state.weights needs two positive probabilities");
    if (!(s.separation > 0.0)) throw_config("initial_state.separation must be positive");
  }
  return s;
}

namespace {

double component(const std::vector<double>& v, std::size_t i) {
  if (v.empty()) return 0.0;
  return v.size() == 1 ? v[0] : v.at(i);
}

}  // namespace

DiscreteWavefunction build_state(const ConfigGrid& grid, const QuantizationParams& quant, const StateSpec& spec) {
  const std::size_t axes = grid.num_axes();
  const int dims = grid.spatial_dims();
  if (spec.center.size() > 1 && spec.center.size() != axes)
    throw_config("initial_state.center needs one value or one per particle axis");
  if (spec.momentum.size() > 1 && spec.momentum.size() != axes)
    throw_config("initial_state.momentum needs one value or one per particle axis");
  const double w = spec.width;
  AmplitudeFunction fn;
  if (spec.kind == "uniform") {
    fn = [](std::span<const Position>) { return cplx(1.0, 0.0); };
  } else if (spec.kind == "gaussian") {
    fn = [&](std::span<const Position> x) {
      double e = 0.0, phase = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k)
        for (int d = 0; d < dims; ++d) {
          const std::size_t ax = k * static_cast<std::size_t>(dims) + static_cast<std::size_t>(d);
          const double dx = x[k][d] - component(spec.center, ax);
          e += dx * dx / (4.0 * w * w);
          phase += component(spec.momentum, ax) * x[k][d];
        }
      return std::exp(cplx(-e, phase));
    };
  } else {
    // Two packets along the first axis of every particle, probabilities weights[0], weights[1].
    const double a0 = std::sqrt(spec.weights[0] / (spec.weights[0] + spec.weights[1]));
    const double a1 = std::sqrt(spec.weights[1] / (spec.weights[0] + spec.weights[1]));
    fn = [&, a0, a1](std::span<const Position> x) {
      double e0 = 0.0, e1 = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k)
        for (int d = 0; d < dims; ++d) {
          const std::size_t ax = k * static_cast<std::size_t>(dims) + static_cast<std::size_t>(d);
          const double c = component(spec.center, ax);
          const double shift = d == 0 ? 0.5 * spec.separation : 0.0;
          const double l = x[k][d] - (c - shift), r = x[k][d] - (c + shift);
          e0 += l * l / (4.0 * w * w);
          e1 += r * r / (4.0 * w * w);
        }
      return cplx(a0 * std::exp(-e0) + a1 * std::exp(-e1), 0.0);
    };
  }
  // The packet norms are equal, so the amplitude weights give the Born weights.
  const DiscreteWavefunction raw = make_wavefunction(grid, quant, fn);
  if (!grid.identical_groups().empty()) return symmetrize(raw);
  return quantize(raw);
}

}  // namespace ccqm::cli
