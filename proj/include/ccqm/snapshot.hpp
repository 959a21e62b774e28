#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>

#include "ccqm/wavefunction.hpp"

namespace ccqm {

// Text snapshot of a wavefunction; layout documented in docs/snapshot_format.md.
inline constexpr int kSnapshotVersion = 1;

struct Snapshot {
  DiscreteWavefunction wavefunction;
  std::uint64_t seed = 0;
};

void write_snapshot(std::ostream& out, const DiscreteWavefunction& psi, std::uint64_t seed);
Snapshot read_snapshot(std::istream& in);

void save_snapshot(const std::filesystem::path& path, const DiscreteWavefunction& psi,
                   std::uint64_t seed);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace ccqm
