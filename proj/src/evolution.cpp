#include "ccqm/evolution.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>

#include "ccqm/csv.hpp"
#include "ccqm/error.hpp"
#include "ccqm/fft.hpp"

namespace ccqm {

PotentialSpec PotentialSpec::harmonic(std::vector<double> omega) {
  PotentialSpec p;
  p.kind = PotentialKind::Harmonic;
  p.omega = std::move(omega);
  return p;
}

PotentialSpec PotentialSpec::pair_gaussian_well(double depth, double range,
                                                std::vector<std::pair<std::size_t, std::size_t>> pairs) {
  PotentialSpec p;
  p.kind = PotentialKind::PairGaussianWell;
  p.well_depth = depth;
  p.well_range = range;
  p.pairs = std::move(pairs);
  return p;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> values) {
  PotentialSpec p;
  p.kind = PotentialKind::Tabulated;
  p.table = std::move(values);
  return p;
}

std::vector<double> potential_on_grid(const PotentialSpec& potential, const ConfigGrid& grid) {
  const std::size_t n = grid.num_particles();
  const int dims = grid.spatial_dims();
  std::vector<double> v(grid.total_cells(), 0.0);
  switch (potential.kind) {
    case PotentialKind::Free:
      break;
    case PotentialKind::Harmonic: {
      if (potential.omega.size() != 1 && potential.omega.size() != n)
        throw_config("harmonic potential needs one omega or one per particle");
      std::vector<std::vector<double>> tables(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double w = potential.omega.size() == 1 ? potential.omega[0] : potential.omega[k];
        const double m = grid.particle(k).mass;
        tables[k].resize(grid.cells_per_particle(k));
        for (std::size_t b = 0; b < tables[k].size(); ++b) {
          const Position x = grid.position(k, b);
          double r2 = 0.0;
          for (int d = 0; d < dims; ++d) r2 += x[d] * x[d];
          tables[k][b] = 0.5 * m * w * w * r2;
        }
      }
      for (std::size_t cell = 0; cell < v.size(); ++cell)
        for (std::size_t k = 0; k < n; ++k) v[cell] += tables[k][grid.block_index(cell, k)];
      break;
    }
    case PotentialKind::PairGaussianWell: {
      if (!(potential.well_range > 0.0)) throw_config("pair well range must be positive");
      auto pairs = potential.pairs;
      if (pairs.empty())
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
      for (auto [i, j] : pairs)
        if (i >= n || j >= n || i == j) throw_config("invalid particle pair in pair well");
      const double inv_two_r2 = 1.0 / (2.0 * potential.well_range * potential.well_range);
      for (std::size_t cell = 0; cell < v.size(); ++cell)
        for (auto [i, j] : pairs) {
          const Position xi = grid.position(i, grid.block_index(cell, i));
          const Position xj = grid.position(j, grid.block_index(cell, j));
          double r2 = 0.0;
          for (int d = 0; d < dims; ++d) r2 += (xi[d] - xj[d]) * (xi[d] - xj[d]);
          v[cell] -= potential.well_depth * std::exp(-r2 * inv_two_r2);
        }
      break;
    }
    case PotentialKind::Tabulated:
      if (potential.table.size() != v.size())
        throw_config("tabulated potential must cover the full configuration grid");
      for (double x : potential.table)
        if (!std::isfinite(x)) throw_config("tabulated potential must be finite");
      v = potential.table;
      break;
  }
  return v;
}

void EvolutionConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw_config("evolution dt must be positive");
  if (steps_per_report == 0) throw_config("steps_per_report must be positive");
  if (boundary_guard_cells < 2) throw_config("boundary_guard_cells must be at least 2");
  if (boundary == BoundaryPolicy::Periodic && scheme != Scheme::SplitStepSpectral)
    throw_config("periodic boundaries are only available with the split-step scheme");
}

namespace {

// Kinetic energy p^2/2m of every configuration cell under the FFT momentum layout.
std::vector<double> spectral_kinetic(const ConfigGrid& grid) {
  const std::size_t n = grid.num_particles();
  const int dims = grid.spatial_dims();
  std::vector<std::vector<double>> tables(n);
  std::array<std::size_t, 3> axes{};
  for (std::size_t k = 0; k < n; ++k) {
    const auto ext = grid.particle_extents(k);
    std::vector<std::vector<double>> momenta;
    for (int d = 0; d < dims; ++d) momenta.push_back(fft_momenta(ext[d], grid.cell_length(k)));
    const double inv_two_m = 0.5 / grid.particle(k).mass;
    tables[k].resize(grid.cells_per_particle(k));
    for (std::size_t b = 0; b < tables[k].size(); ++b) {
      grid.block_axes(k, b, std::span<std::size_t>(axes.data(), dims));
      double p2 = 0.0;
      for (int d = 0; d < dims; ++d) p2 += momenta[d][axes[d]] * momenta[d][axes[d]];
      tables[k][b] = p2 * inv_two_m;
    }
  }
  std::vector<double> t(grid.total_cells(), 0.0);
  for (std::size_t cell = 0; cell < t.size(); ++cell)
    for (std::size_t k = 0; k < n; ++k) t[cell] += tables[k][grid.block_index(cell, k)];
  return t;
}

using SparseMatrix = Eigen::SparseMatrix<cplx>;

// Finite-difference Hamiltonian with Dirichlet walls.
SparseMatrix fd_hamiltonian(const ConfigGrid& grid, const std::vector<double>& v) {
  const std::size_t total = grid.total_cells();
  const int dims = grid.spatial_dims();
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(total * (1 + 2 * grid.num_axes()));
  std::vector<double> diag(v);
  for (std::size_t k = 0; k < grid.num_particles(); ++k) {
    const auto ext = grid.particle_extents(k);
    const double a = grid.cell_length(k);
    const double hop = 1.0 / (2.0 * grid.particle(k).mass * a * a);
    for (int d = 0; d < dims; ++d) {
      std::size_t axis_stride = grid.particle_stride(k);
      for (int e = d + 1; e < dims; ++e) axis_stride *= ext[e];
      const std::size_t n_axis = ext[d];
      for (std::size_t cell = 0; cell < total; ++cell) {
        diag[cell] += 2.0 * hop;
        const std::size_t i = (cell / axis_stride) % n_axis;
        if (i + 1 < n_axis) {
          triplets.emplace_back(static_cast<int>(cell), static_cast<int>(cell + axis_stride), -hop);
          triplets.emplace_back(static_cast<int>(cell + axis_stride), static_cast<int>(cell), -hop);
        }
      }
    }
  }
  for (std::size_t cell = 0; cell < total; ++cell)
    triplets.emplace_back(static_cast<int>(cell), static_cast<int>(cell), diag[cell]);
  SparseMatrix h(static_cast<int>(total), static_cast<int>(total));
  h.setFromTriplets(triplets.begin(), triplets.end());
  return h;
}

}  // namespace

struct Propagator::Impl {
  Scheme scheme;
  double dt;
  std::size_t size;
  // Split-step
  std::unique_ptr<FftPlan> plan;
  std::vector<cplx> half_potential;
  std::vector<cplx> full_potential;
  std::vector<cplx> kinetic;
  // Crank-Nicolson
  SparseMatrix explicit_part;
  Eigen::SparseLU<SparseMatrix> implicit_part;
};

Propagator::Propagator(const ConfigGrid& grid, const PotentialSpec& potential, Scheme scheme, double dt)
    : impl_(std::make_unique<Impl>()) {
  impl_->scheme = scheme;
  impl_->dt = dt;
  impl_->size = grid.total_cells();
  const std::vector<double> v = potential_on_grid(potential, grid);
  const cplx i_unit(0.0, 1.0);

  if (scheme == Scheme::SplitStepSpectral) {
    impl_->plan = std::make_unique<FftPlan>(grid.extents());
    const std::vector<double> t = spectral_kinetic(grid);
    const double inv_n = 1.0 / static_cast<double>(impl_->size);
    impl_->half_potential.resize(impl_->size);
    impl_->full_potential.resize(impl_->size);
    impl_->kinetic.resize(impl_->size);
    for (std::size_t i = 0; i < impl_->size; ++i) {
      impl_->half_potential[i] = std::exp(-i_unit * (0.5 * dt * v[i]));
      impl_->full_potential[i] = std::exp(-i_unit * (dt * v[i]));
      impl_->kinetic[i] = std::exp(-i_unit * (dt * t[i])) * inv_n;
    }
    return;
  }

  const SparseMatrix h = fd_hamiltonian(grid, v);
  SparseMatrix identity(h.rows(), h.cols());
  identity.setIdentity();
  const cplx half_step = i_unit * (0.5 * dt);
  impl_->explicit_part = identity - half_step * h;
  SparseMatrix implicit = identity + half_step * h;
  implicit.makeCompressed();
  impl_->implicit_part.compute(implicit);
  if (impl_->implicit_part.info() != Eigen::Success)
    throw Error(ErrorCode::InvalidConfig, "Crank-Nicolson factorization failed");
}

Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;
Propagator& Propagator::operator=(Propagator&&) noexcept = default;

double Propagator::dt() const noexcept { return impl_->dt; }

void Propagator::step(std::span<cplx> amplitudes, std::size_t n_steps) const {
  if (n_steps == 0) return;
  if (impl_->scheme == Scheme::SplitStepSpectral) {
    // Adjacent potential half-steps are fused into one full step.
    kernels::multiply(amplitudes, std::span<const cplx>(impl_->half_potential));
    for (std::size_t s = 0; s < n_steps; ++s) {
      impl_->plan->forward(amplitudes);
      kernels::multiply(amplitudes, std::span<const cplx>(impl_->kinetic));
      impl_->plan->backward(amplitudes);
      const auto& v = (s + 1 == n_steps) ? impl_->half_potential : impl_->full_potential;
      kernels::multiply(amplitudes, std::span<const cplx>(v));
    }
    return;
  }
  Eigen::Map<Eigen::VectorXcd> psi(amplitudes.data(), static_cast<Eigen::Index>(amplitudes.size()));
  Eigen::VectorXcd rhs(psi.size());
  for (std::size_t s = 0; s < n_steps; ++s) {
    rhs = impl_->explicit_part * psi;
    psi = impl_->implicit_part.solve(rhs);
  }
}

void check_guard_band(const DiscreteWavefunction& psi, std::size_t guard_cells) {
  const ConfigGrid& grid = psi.grid();
  const double threshold = 0.5 * psi.quant().f0;
  const auto amps = psi.amplitudes();
  const int dims = grid.spatial_dims();
  std::vector<std::size_t> axis_strides(grid.num_axes());
  for (std::size_t k = 0; k < grid.num_particles(); ++k) {
    const auto ext = grid.particle_extents(k);
    for (int d = 0; d < dims; ++d) {
      std::size_t s = grid.particle_stride(k);
      for (int e = d + 1; e < dims; ++e) s *= ext[e];
      axis_strides[k * dims + d] = s;
    }
  }
  const auto extents = grid.extents();
  for (std::size_t cell = 0; cell < amps.size(); ++cell) {
    if (std::abs(amps[cell]) < threshold) continue;
    for (std::size_t ax = 0; ax < extents.size(); ++ax) {
      const std::size_t i = (cell / axis_strides[ax]) % extents[ax];
      if (i < guard_cells || i + guard_cells >= extents[ax])
        throw Error(ErrorCode::GridOverflow,
                    "grid overflow: support reached the guard band on axis " + std::to_string(ax) +
                        "; enlarge the grid or shorten the run");
    }
  }
}

namespace {

DiscreteWavefunction evolve_signed(const DiscreteWavefunction& psi, const PotentialSpec& potential,
                                   const EvolutionConfig& cfg, std::size_t n_steps, double dt) {
  cfg.validate();
  const bool guarded = cfg.boundary == BoundaryPolicy::GuardedHardWall;
  if (guarded) check_guard_band(psi, cfg.boundary_guard_cells);
  Propagator prop(psi.grid(), potential, cfg.scheme, dt);

  if (psi.quant().quantize_during_evolution) {
    DiscreteWavefunction state = psi;
    for (std::size_t s = 0; s < n_steps; ++s) {
      std::vector<cplx> amps(state.amplitudes().begin(), state.amplitudes().end());
      prop.step(amps, 1);
      state = quantize(state.grid(), amps, state.quant());
      if (guarded && (s + 1) % cfg.steps_per_report == 0) check_guard_band(state, cfg.boundary_guard_cells);
    }
    if (guarded) check_guard_band(state, cfg.boundary_guard_cells);
    return state;
  }

  std::vector<cplx> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  std::size_t done = 0;
  while (done < n_steps) {
    const std::size_t chunk = std::min(cfg.steps_per_report, n_steps - done);
    prop.step(amps, chunk);
    done += chunk;
    if (guarded) check_guard_band(psi.with_amplitudes(amps), cfg.boundary_guard_cells);
  }
  return psi.with_amplitudes(std::move(amps));
}

}  // namespace

DiscreteWavefunction evolve(const DiscreteWavefunction& psi, const PotentialSpec& potential,
                            const EvolutionConfig& cfg, std::size_t n_steps) {
  return evolve_signed(psi, potential, cfg, n_steps, cfg.dt);
}

DiscreteWavefunction evolve_backward(const DiscreteWavefunction& psi, const PotentialSpec& potential,
                                     const EvolutionConfig& cfg, std::size_t n_steps) {
  return evolve_signed(psi, potential, cfg, n_steps, -cfg.dt);
}

double energy_expectation(const DiscreteWavefunction& psi, const PotentialSpec& potential, Scheme scheme) {
  const ConfigGrid& grid = psi.grid();
  const std::vector<double> v = potential_on_grid(potential, grid);
  const auto amps = psi.amplitudes();
  const double norm = psi.norm_squared();
  if (scheme == Scheme::SplitStepSpectral) {
    double potential_part = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) potential_part += v[i] * std::norm(amps[i]);
    std::vector<cplx> spectrum(amps.begin(), amps.end());
    FftPlan plan(grid.extents());
    plan.forward(spectrum);
    const std::vector<double> t = spectral_kinetic(grid);
    double kinetic_part = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) kinetic_part += t[i] * std::norm(spectrum[i]);
    kinetic_part /= static_cast<double>(spectrum.size());
    return (kinetic_part + potential_part) / norm;
  }
  const SparseMatrix h = fd_hamiltonian(grid, v);
  Eigen::Map<const Eigen::VectorXcd> c(amps.data(), static_cast<Eigen::Index>(amps.size()));
  return c.dot(h * c).real() / norm;
}

double position_spread(const DiscreteWavefunction& psi, std::size_t k, int axis) {
  const DensityTable g = project_density(psi, k);
  const ConfigGrid& grid = psi.grid();
  double mean = 0.0, second = 0.0, total = 0.0;
  for (std::size_t b = 0; b < g.density.size(); ++b) {
    const double p = g.probability(b);
    const double x = grid.position(k, b)[axis];
    total += p;
    mean += p * x;
    second += p * x * x;
  }
  mean /= total;
  return std::sqrt(std::max(0.0, second / total - mean * mean));
}

VolumeSample measure_volume(const DiscreteWavefunction& psi, const QuantizationParams& quant, double time) {
  const DiscreteWavefunction q = quantize(psi.grid(), psi.amplitudes(), quant);
  return {time, relative_volume(q), kernels::max_abs(psi.amplitudes()) / quant.f0};
}

SpreadResult spread_until_volume(const DiscreteWavefunction& psi, const PotentialSpec& potential,
                                 const EvolutionConfig& cfg, std::size_t v_target,
                                 const QuantizationParams& quant, const SpreadOptions& options) {
  cfg.validate();
  quant.validate();
  if (options.patience_reports == 0 || options.hysteresis_reports == 0)
    throw_config("spread options must be positive");
  const bool guarded = cfg.boundary == BoundaryPolicy::GuardedHardWall;

  SpreadResult result;
  result.trace.push_back(measure_volume(psi, quant, 0.0));
  if (result.trace.back().relative_volume >= v_target)
    throw_config("spread_until_volume: initial volume already at or above the target");
  if (guarded) check_guard_band(psi, cfg.boundary_guard_cells);

  Propagator prop(psi.grid(), potential, cfg.scheme, cfg.dt);
  std::vector<cplx> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  std::size_t best = result.trace.back().relative_volume;
  std::size_t since_increase = 0;
  std::size_t above = 0;
  double time = 0.0;

  for (std::size_t report = 0; report < options.max_reports; ++report) {
    prop.step(amps, cfg.steps_per_report);
    time += cfg.dt * static_cast<double>(cfg.steps_per_report);
    DiscreteWavefunction current = psi.with_amplitudes(amps);
    if (guarded) check_guard_band(current, cfg.boundary_guard_cells);
    const VolumeSample sample = measure_volume(current, quant, time);
    result.trace.push_back(sample);

    above = sample.relative_volume >= v_target ? above + 1 : 0;
    if (above >= options.hysteresis_reports) {
      result.state = std::move(current);
      result.elapsed = time;
      return result;
    }
    if (sample.relative_volume > best) {
      best = sample.relative_volume;
      since_increase = 0;
    } else if (++since_increase >= options.patience_reports) {
      throw Error(ErrorCode::Stalled, "stalled: relative volume has not grown for " +
                                          std::to_string(options.patience_reports) +
                                          " reports (stuck at " + std::to_string(best) + ")");
    }
  }
  throw Error(ErrorCode::Stalled, "stalled: report limit reached before the target volume");
}

void write_volume_trace_csv(std::ostream& out, std::span<const VolumeSample> trace) {
  CsvWriter csv(out);
  csv.header({"time", "relative_volume", "max_cell_magnitude_over_f0"});
  for (const auto& s : trace)
    csv.field(s.time).field(static_cast<std::uint64_t>(s.relative_volume)).field(s.max_cell_magnitude_over_f0).end_row();
}

}  // namespace ccqm
