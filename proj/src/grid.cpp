#include "ccqm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ccqm/error.hpp"

namespace ccqm {

std::string_view to_string(Statistics s) noexcept {
  switch (s) {
    case Statistics::Boson: return "boson";
    case Statistics::Fermion: return "fermion";
    case Statistics::Distinguishable: return "distinguishable";
  }
  return "distinguishable";
}

Statistics statistics_from_string(std::string_view s) {
  if (s == "boson") return Statistics::Boson;
  if (s == "fermion") return Statistics::Fermion;
  if (s == "distinguishable") return Statistics::Distinguishable;
  throw_config("unknown particle statistics '" + std::string(s) + "'");
}

ConfigGrid::ConfigGrid(std::vector<ParticleMeta> particles, int spatial_dims,
                       std::vector<std::size_t> per_axis_extents,
                       std::vector<double> cell_lengths)
    : particles_(std::move(particles)),
      dims_(spatial_dims),
      extents_(std::move(per_axis_extents)),
      cell_lengths_(std::move(cell_lengths)) {
  const std::size_t n = particles_.size();
  if (n == 0) throw_config("grid needs at least one particle");
  if (dims_ < 1 || dims_ > 3) throw_config("spatial_dims must be 1, 2 or 3");
  if (extents_.size() != n * static_cast<std::size_t>(dims_))
    throw_config("grid needs one extent per particle axis");
  if (cell_lengths_.size() != n) throw_config("grid needs one cell length per particle");

  std::map<std::string, Statistics> species_stats;
  for (const auto& p : particles_) {
    if (!(p.mass > 0.0) || !std::isfinite(p.mass)) throw_config("particle mass must be positive");
    auto [it, inserted] = species_stats.emplace(p.species_id, p.statistics);
    if (!inserted && it->second != p.statistics)
      throw_config("particles of species '" + p.species_id + "' disagree on statistics");
  }
  for (double a : cell_lengths_)
    if (!(a > 0.0) || !std::isfinite(a)) throw_config("cell lengths must be positive");
  for (std::size_t e : extents_)
    if (e == 0) throw_config("grid extents must be positive");

  block_sizes_.assign(n, 1);
  for (std::size_t k = 0; k < n; ++k)
    for (int d = 0; d < dims_; ++d) block_sizes_[k] *= extents_[k * dims_ + d];

  block_strides_.assign(n, 1);
  total_cells_ = 1;
  for (std::size_t k = n; k-- > 0;) {
    block_strides_[k] = total_cells_;
    if (block_sizes_[k] > std::numeric_limits<std::size_t>::max() / total_cells_)
      throw Error(ErrorCode::MemoryBudget, "configuration grid size overflows");
    total_cells_ *= block_sizes_[k];
  }

  cell_measure_ = 1.0;
  for (std::size_t k = 0; k < n; ++k) cell_measure_ *= particle_cell_measure(k);
}

ConfigGrid ConfigGrid::uniform(std::vector<ParticleMeta> particles, int spatial_dims,
                               std::size_t extent, double cell_length) {
  const std::size_t n = particles.size();
  return ConfigGrid(std::move(particles), spatial_dims,
                    std::vector<std::size_t>(n * static_cast<std::size_t>(spatial_dims), extent),
                    std::vector<double>(n, cell_length));
}

std::span<const std::size_t> ConfigGrid::particle_extents(std::size_t k) const {
  return std::span<const std::size_t>(extents_).subspan(k * dims_, dims_);
}

double ConfigGrid::particle_cell_measure(std::size_t k) const {
  return std::pow(cell_lengths_.at(k), dims_);
}

void ConfigGrid::decompose(std::size_t cell, std::span<std::size_t> blocks) const {
  for (std::size_t k = num_particles(); k-- > 0;) {
    blocks[k] = cell % block_sizes_[k];
    cell /= block_sizes_[k];
  }
}

std::size_t ConfigGrid::compose(std::span<const std::size_t> blocks) const {
  std::size_t cell = 0;
  for (std::size_t k = 0; k < num_particles(); ++k) cell += blocks[k] * block_strides_[k];
  return cell;
}

void ConfigGrid::block_axes(std::size_t k, std::size_t block, std::span<std::size_t> axes) const {
  const auto ext = particle_extents(k);
  for (int d = dims_; d-- > 0;) {
    axes[d] = block % ext[d];
    block /= ext[d];
  }
}

double ConfigGrid::axis_position(std::size_t k, int axis, std::size_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(extents_[k * dims_ + axis]);
  return static_cast<double>(static_cast<std::ptrdiff_t>(i) - n / 2) * cell_lengths_[k];
}

Position ConfigGrid::position(std::size_t k, std::size_t block) const {
  std::array<std::size_t, 3> axes{};
  block_axes(k, block, std::span<std::size_t>(axes.data(), dims_));
  Position x{0.0, 0.0, 0.0};
  for (int d = 0; d < dims_; ++d) x[d] = axis_position(k, d, axes[d]);
  return x;
}

std::size_t ConfigGrid::nearest_block(std::size_t k, const Position& x) const {
  const auto ext = particle_extents(k);
  std::size_t block = 0;
  for (int d = 0; d < dims_; ++d) {
    const auto n = static_cast<std::ptrdiff_t>(ext[d]);
    auto i = static_cast<std::ptrdiff_t>(std::llround(x[d] / cell_lengths_[k])) + n / 2;
    i = std::clamp<std::ptrdiff_t>(i, 0, n - 1);
    block = block * ext[d] + static_cast<std::size_t>(i);
  }
  return block;
}

bool ConfigGrid::same_particle_geometry(std::size_t i, std::size_t j) const {
  if (cell_lengths_.at(i) != cell_lengths_.at(j)) return false;
  const auto a = particle_extents(i);
  const auto b = particle_extents(j);
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

bool ConfigGrid::same_position_geometry(const ConfigGrid& other) const {
  if (dims_ != other.dims_) return false;
  for (std::size_t i = 0; i < num_particles(); ++i)
    for (std::size_t j = 0; j < other.num_particles(); ++j) {
      if (cell_lengths_[i] != other.cell_lengths_[j]) return false;
      const auto a = particle_extents(i);
      const auto b = other.particle_extents(j);
      if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) return false;
    }
  return true;
}

std::vector<std::vector<std::size_t>> ConfigGrid::identical_groups() const {
  std::map<std::string, std::vector<std::size_t>> by_species;
  for (std::size_t k = 0; k < particles_.size(); ++k)
    if (particles_[k].statistics != Statistics::Distinguishable)
      by_species[particles_[k].species_id].push_back(k);
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [species, members] : by_species)
    if (members.size() >= 2) groups.push_back(std::move(members));
  return groups;
}

ConfigGrid ConfigGrid::with_particles(std::vector<ParticleMeta> particles) const {
  return ConfigGrid(std::move(particles), dims_, extents_, cell_lengths_);
}

ConfigGrid ConfigGrid::with_cell_lengths(std::vector<double> cell_lengths) const {
  return ConfigGrid(particles_, dims_, extents_, std::move(cell_lengths));
}

ConfigGrid ConfigGrid::concatenate(const ConfigGrid& left, const ConfigGrid& right) {
  if (left.dims_ != right.dims_) throw_config("cannot combine grids of different spatial_dims");
  auto particles = left.particles_;
  particles.insert(particles.end(), right.particles_.begin(), right.particles_.end());
  auto extents = left.extents_;
  extents.insert(extents.end(), right.extents_.begin(), right.extents_.end());
  auto lengths = left.cell_lengths_;
  lengths.insert(lengths.end(), right.cell_lengths_.begin(), right.cell_lengths_.end());
  return ConfigGrid(std::move(particles), left.dims_, std::move(extents), std::move(lengths));
}

ConfigGrid ConfigGrid::subset(std::span<const std::size_t> particle_indices) const {
  std::vector<ParticleMeta> particles;
  std::vector<std::size_t> extents;
  std::vector<double> lengths;
  for (std::size_t k : particle_indices) {
    particles.push_back(particles_.at(k));
    const auto ext = particle_extents(k);
    extents.insert(extents.end(), ext.begin(), ext.end());
    lengths.push_back(cell_lengths_[k]);
  }
  return ConfigGrid(std::move(particles), dims_, std::move(extents), std::move(lengths));
}

}  // namespace ccqm
