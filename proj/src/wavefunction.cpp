#include "ccqm/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ccqm/error.hpp"
#include "ccqm/fft.hpp"

namespace ccqm {

DiscreteWavefunction::DiscreteWavefunction(ConfigGrid grid, std::vector<cplx> cell_amplitudes,
                                           QuantizationParams quant)
    : grid_(std::move(grid)), quant_(quant), amplitudes_(std::move(cell_amplitudes)) {
  quant_.validate();
  if (amplitudes_.size() != grid_.total_cells())
    throw_config("amplitude count does not match the configuration grid");
  for (const cplx& z : amplitudes_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorCode::InvalidConfig, "wavefunction amplitudes must be finite");
}

DiscreteWavefunction DiscreteWavefunction::from_levels(ConfigGrid grid,
                                                       std::vector<std::uint32_t> magnitude_levels,
                                                       std::vector<std::uint32_t> phase_levels,
                                                       QuantizationParams quant) {
  quant.validate();
  if (magnitude_levels.size() != grid.total_cells() || phase_levels.size() != grid.total_cells())
    throw_config("level arrays do not match the configuration grid");
  for (std::size_t i = 0; i < phase_levels.size(); ++i) {
    if (phase_levels[i] >= quant.phase_levels) throw_config("phase level out of range");
    if (magnitude_levels[i] == 0) phase_levels[i] = 0;
  }
  const LevelMoments m = kernels::level_moments(magnitude_levels);
  if (m.support == 0)
    throw Error(ErrorCode::VanishingWavefunction,
                "vanishing wavefunction: every cell magnitude is below f0/2");

  DiscreteWavefunction psi;
  psi.grid_ = std::move(grid);
  psi.quant_ = quant;
  psi.level_scale_ = 1.0 / (quant.f0 * std::sqrt(static_cast<double>(m.sum_sq)));
  psi.amplitudes_.resize(magnitude_levels.size());
  kernels::reconstruct_levels(magnitude_levels, phase_levels, quant.f0, quant.phase_levels,
                              psi.level_scale_, psi.amplitudes_);
  psi.magnitude_levels_ = std::move(magnitude_levels);
  psi.phase_levels_ = std::move(phase_levels);
  psi.quantized_ = true;
  return psi;
}

cplx DiscreteWavefunction::density_amplitude(std::size_t cell) const {
  return amplitudes_.at(cell) / std::sqrt(grid_.cell_measure());
}

double DiscreteWavefunction::norm_squared() const { return kernels::norm_squared(amplitudes_); }

DiscreteWavefunction DiscreteWavefunction::with_amplitudes(std::vector<cplx> cell_amplitudes) const {
  return DiscreteWavefunction(grid_, std::move(cell_amplitudes), quant_);
}

DiscreteWavefunction DiscreteWavefunction::with_grid(ConfigGrid grid) const {
  if (grid.total_cells() != grid_.total_cells() || grid.num_axes() != grid_.num_axes())
    throw_config("replacement grid must have the same shape");
  DiscreteWavefunction copy = *this;
  copy.grid_ = std::move(grid);
  return copy;
}

DiscreteWavefunction DiscreteWavefunction::with_quant(QuantizationParams quant) const {
  quant.validate();
  DiscreteWavefunction copy = *this;
  copy.quant_ = quant;
  if (copy.quantized_ && (quant.f0 != quant_.f0 || quant.phase_levels != quant_.phase_levels)) {
    copy.quantized_ = false;
    copy.magnitude_levels_.clear();
    copy.phase_levels_.clear();
    copy.level_scale_ = 1.0;
  }
  return copy;
}

DiscreteWavefunction quantize(const ConfigGrid& grid, std::span<const cplx> raw_cell_amplitudes,
                              const QuantizationParams& quant) {
  quant.validate();
  if (raw_cell_amplitudes.size() != grid.total_cells())
    throw_config("amplitude count does not match the configuration grid");
  std::vector<std::uint32_t> levels(raw_cell_amplitudes.size());
  std::vector<std::uint32_t> phases(raw_cell_amplitudes.size());
  kernels::quantize_cells(raw_cell_amplitudes, quant.f0, quant.phase_levels, levels, phases);
  return DiscreteWavefunction::from_levels(grid, std::move(levels), std::move(phases), quant);
}

DiscreteWavefunction quantize(const DiscreteWavefunction& psi) {
  return quantize(psi.grid(), psi.amplitudes(), psi.quant());
}

std::size_t relative_volume(const DiscreteWavefunction& psi) {
  if (!psi.is_quantized())
    throw std::logic_error("relative_volume needs a quantized wavefunction");
  return kernels::level_moments(psi.magnitude_levels()).support;
}

DiscreteWavefunction normalize(const DiscreteWavefunction& psi) {
  const double n2 = psi.norm_squared();
  if (!(n2 > 0.0)) throw Error(ErrorCode::ZeroWavefunction, "cannot normalize a zero wavefunction");
  const double factor = 1.0 / std::sqrt(n2);
  DiscreteWavefunction out = psi;
  kernels::scale(out.amplitudes_, factor);
  if (out.quantized_) out.level_scale_ *= factor;
  return out;
}

double DensityTable::cell_measure() const { return std::pow(cell_length, spatial_dims); }

double DensityTable::total_probability() const {
  double s = 0.0;
  for (double g : density) s += g;
  return s * cell_measure();
}

DensityTable project_density(const DiscreteWavefunction& psi, std::size_t k) {
  const ConfigGrid& grid = psi.grid();
  if (k >= grid.num_particles()) throw_config("particle index out of range");
  DensityTable table;
  table.particle = k;
  table.spatial_dims = grid.spatial_dims();
  const auto ext = grid.particle_extents(k);
  table.extents.assign(ext.begin(), ext.end());
  table.cell_length = grid.cell_length(k);
  table.density.resize(grid.cells_per_particle(k));
  kernels::marginal_probability(grid, psi.amplitudes(), k, table.density);
  const double inv_measure = 1.0 / grid.particle_cell_measure(k);
  for (double& g : table.density) g *= inv_measure;
  return table;
}

namespace {

struct SymmetryGroups {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<bool> antisymmetric;
};

SymmetryGroups symmetry_groups(const ConfigGrid& grid) {
  SymmetryGroups sg;
  sg.groups = grid.identical_groups();
  for (const auto& g : sg.groups) {
    for (std::size_t m = 1; m < g.size(); ++m)
      if (!grid.same_particle_geometry(g[0], g[m]))
        throw_config("identical particles must share grid geometry to be symmetrized");
    sg.antisymmetric.push_back(grid.particle(g[0]).statistics == Statistics::Fermion);
  }
  return sg;
}

}  // namespace

std::vector<cplx> apply_symmetrizer(const ConfigGrid& grid, std::span<const cplx> cell_amplitudes) {
  const SymmetryGroups sg = symmetry_groups(grid);
  std::vector<cplx> out(cell_amplitudes.begin(), cell_amplitudes.end());
  if (sg.groups.empty()) return out;
  const auto perms = group_permutations(grid.num_particles(), sg.groups, sg.antisymmetric);
  kernels::symmetrize(grid, perms, cell_amplitudes, out);
  return out;
}

DiscreteWavefunction symmetrize(const DiscreteWavefunction& psi) {
  const SymmetryGroups sg = symmetry_groups(psi.grid());
  const bool has_fermions =
      std::find(sg.antisymmetric.begin(), sg.antisymmetric.end(), true) != sg.antisymmetric.end();
  if (has_fermions && psi.quant().phase_levels % 2 != 0)
    throw_config("antisymmetric states need an even number of phase levels");

  const double before = psi.norm_squared();
  auto symmetric = apply_symmetrizer(psi.grid(), psi.amplitudes());
  const double after = kernels::norm_squared(symmetric);
  if (!(after > 1e-24 * before)) {
    if (has_fermions)
      throw Error(ErrorCode::PauliExclusion,
                  "Pauli exclusion: antisymmetrization annihilates the state");
    throw Error(ErrorCode::ZeroWavefunction, "symmetrization annihilates the state");
  }
  const double factor = 1.0 / std::sqrt(after);
  kernels::scale(symmetric, factor);
  return quantize(psi.grid(), symmetric, psi.quant());
}

DiscreteWavefunction exchange_particles(const DiscreteWavefunction& psi, std::size_t i, std::size_t j) {
  const ConfigGrid& grid = psi.grid();
  if (i >= grid.num_particles() || j >= grid.num_particles())
    throw_config("particle index out of range");
  if (!grid.same_particle_geometry(i, j))
    throw_config("exchanged particles must share grid geometry");
  std::vector<cplx> out(psi.size());
  std::vector<std::size_t> blocks(grid.num_particles());
  for (std::size_t cell = 0; cell < psi.size(); ++cell) {
    grid.decompose(cell, blocks);
    std::swap(blocks[i], blocks[j]);
    out[grid.compose(blocks)] = psi.amplitudes()[cell];
  }
  return psi.with_amplitudes(std::move(out));
}

DiscreteWavefunction tensor_product(const DiscreteWavefunction& left, const DiscreteWavefunction& right) {
  ConfigGrid grid = ConfigGrid::concatenate(left.grid(), right.grid());
  const std::size_t nl = left.size();
  const std::size_t nr = right.size();
  std::vector<cplx> out(nl * nr);
  const auto a = left.amplitudes();
  const auto b = right.amplitudes();
  const auto n = static_cast<std::ptrdiff_t>(nl);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < nr; ++j) out[static_cast<std::size_t>(i) * nr + j] = a[i] * b[j];
  return DiscreteWavefunction(std::move(grid), std::move(out), left.quant());
}

DiscreteWavefunction make_wavefunction(const ConfigGrid& grid, const QuantizationParams& quant,
                                       const AmplitudeFunction& fn) {
  const std::size_t n = grid.num_particles();
  std::vector<cplx> amps(grid.total_cells());
  std::vector<std::size_t> blocks(n);
  std::vector<Position> positions(n);
  const double root_measure = std::sqrt(grid.cell_measure());
  for (std::size_t cell = 0; cell < amps.size(); ++cell) {
    grid.decompose(cell, blocks);
    for (std::size_t k = 0; k < n; ++k) positions[k] = grid.position(k, blocks[k]);
    amps[cell] = fn(positions) * root_measure;
  }
  return normalize(DiscreteWavefunction(grid, std::move(amps), quant));
}

double mean_de_broglie_wavelength(const DiscreteWavefunction& psi, std::size_t k) {
  const ConfigGrid& grid = psi.grid();
  if (k >= grid.num_particles()) throw_config("particle index out of range");
  std::vector<cplx> spectrum(psi.amplitudes().begin(), psi.amplitudes().end());
  FftPlan plan(grid.extents());
  plan.forward(spectrum);

  std::vector<double> marginal(grid.cells_per_particle(k));
  kernels::marginal_probability(grid, spectrum, k, marginal);

  const int dims = grid.spatial_dims();
  const auto ext = grid.particle_extents(k);
  std::vector<std::vector<double>> momenta;
  for (int d = 0; d < dims; ++d) momenta.push_back(fft_momenta(ext[d], grid.cell_length(k)));

  double total = 0.0;
  double weighted = 0.0;
  std::array<std::size_t, 3> axes{};
  for (std::size_t b = 0; b < marginal.size(); ++b) {
    grid.block_axes(k, b, std::span<std::size_t>(axes.data(), dims));
    double p2 = 0.0;
    for (int d = 0; d < dims; ++d) p2 += momenta[d][axes[d]] * momenta[d][axes[d]];
    total += marginal[b];
    weighted += marginal[b] * std::sqrt(p2);
  }
  if (!(weighted > 0.0))
    throw Error(ErrorCode::InvalidConfig, "mean momentum is zero; de Broglie wavelength undefined");
  return 2.0 * std::numbers::pi / (weighted / total);
}

DiscreteWavefunction refresh_de_broglie_wavelengths(const DiscreteWavefunction& psi) {
  auto particles = psi.grid().particles();
  for (std::size_t k = 0; k < particles.size(); ++k)
    particles[k].mean_de_broglie_wavelength = mean_de_broglie_wavelength(psi, k);
  return psi.with_grid(psi.grid().with_particles(std::move(particles)));
}

}  // namespace ccqm
