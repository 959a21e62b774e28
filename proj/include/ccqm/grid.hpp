#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ccqm {

enum class Statistics { Boson, Fermion, Distinguishable };

std::string_view to_string(Statistics s) noexcept;
Statistics statistics_from_string(std::string_view s);

struct ParticleMeta {
  double mass = 1.0;
  std::string species_id = "p";
  Statistics statistics = Statistics::Distinguishable;
  // Only consulted by the variable cell-length mode; 0 means "not yet estimated".
  double mean_de_broglie_wavelength = 0.0;
  // World-unique identity, used for ownership and conservation bookkeeping.
  std::uint64_t label = 0;

  bool operator==(const ParticleMeta&) const = default;
};

using Position = std::array<double, 3>;

/// Geometry of an N-particle configuration-space grid.
///
/// Every particle has `spatial_dims` axes. The configuration index is
/// row-major over all N*spatial_dims axes, ordered particle-major, so it can
/// equally be read as a row-major index over per-particle "block" indices.
/// Cell centres along an axis of n cells sit at (i - n/2) * a_k.
class ConfigGrid {
 public:
  ConfigGrid() = default;
  ConfigGrid(std::vector<ParticleMeta> particles, int spatial_dims,
             std::vector<std::size_t> per_axis_extents,
             std::vector<double> cell_lengths);

  // Same extent on every axis of every particle, one shared cell length.
  static ConfigGrid uniform(std::vector<ParticleMeta> particles, int spatial_dims,
                            std::size_t extent, double cell_length);

  std::size_t num_particles() const noexcept { return particles_.size(); }
  int spatial_dims() const noexcept { return dims_; }
  std::size_t num_axes() const noexcept { return extents_.size(); }
  const std::vector<ParticleMeta>& particles() const noexcept { return particles_; }
  const ParticleMeta& particle(std::size_t k) const { return particles_.at(k); }
  std::span<const std::size_t> extents() const noexcept { return extents_; }
  std::span<const std::size_t> particle_extents(std::size_t k) const;
  std::span<const double> cell_lengths() const noexcept { return cell_lengths_; }
  double cell_length(std::size_t k) const { return cell_lengths_.at(k); }

  std::size_t total_cells() const noexcept { return total_cells_; }
  std::size_t cells_per_particle(std::size_t k) const { return block_sizes_.at(k); }
  std::size_t particle_stride(std::size_t k) const { return block_strides_.at(k); }

  /// Product of all a_k^dims: the measure of one configuration-space cell.
  double cell_measure() const noexcept { return cell_measure_; }
  /// a_k^dims: the measure of one position-space cell of particle k.
  double particle_cell_measure(std::size_t k) const;

  std::size_t block_index(std::size_t cell, std::size_t k) const {
    return (cell / block_strides_[k]) % block_sizes_[k];
  }
  void decompose(std::size_t cell, std::span<std::size_t> blocks) const;
  std::size_t compose(std::span<const std::size_t> blocks) const;

  /// Axis indices of particle k's block index.
  void block_axes(std::size_t k, std::size_t block, std::span<std::size_t> axes) const;
  double axis_position(std::size_t k, int axis, std::size_t i) const;
  Position position(std::size_t k, std::size_t block) const;

  /// Block index of the cell nearest to `x` for particle k (clamped to the grid).
  std::size_t nearest_block(std::size_t k, const Position& x) const;

  bool same_particle_geometry(std::size_t i, std::size_t j) const;
  bool same_position_geometry(const ConfigGrid& other) const;

  /// Groups of indistinguishable particles (same species, boson or fermion, size >= 2).
  std::vector<std::vector<std::size_t>> identical_groups() const;

  ConfigGrid with_particles(std::vector<ParticleMeta> particles) const;
  ConfigGrid with_cell_lengths(std::vector<double> cell_lengths) const;

  /// Grid for the concatenation of two particle sets (left particles first).
  static ConfigGrid concatenate(const ConfigGrid& left, const ConfigGrid& right);
  /// Grid restricted to a subset of particles, in the given order.
  ConfigGrid subset(std::span<const std::size_t> particle_indices) const;

  bool operator==(const ConfigGrid&) const = default;

 private:
  std::vector<ParticleMeta> particles_;
  int dims_ = 1;
  std::vector<std::size_t> extents_;
  std::vector<double> cell_lengths_;
  std::vector<std::size_t> block_sizes_;
  std::vector<std::size_t> block_strides_;
  std::size_t total_cells_ = 0;
  double cell_measure_ = 1.0;
};

}  // namespace ccqm
