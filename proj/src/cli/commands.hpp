#pragma once

#include <vector>

#include "ccqm/collapse.hpp"
#include "ccqm/ensemble.hpp"
#include "ccqm/evolution.hpp"
#include "ccqm/wavefunction.hpp"
#include "ccqm/world.hpp"
#include "config.hpp"
#include "run_context.hpp"

namespace ccqm::cli {

// Subcommands. Each one reads and validates its whole config, calls
// Config::finish(), and only then starts computing.
void cmd_simulate(const Config& config, RunContext& ctx);
void cmd_collapse_stats(const Config& config, RunContext& ctx);
void cmd_starlight(const Config& config, RunContext& ctx);
void cmd_cmb(const Config& config, RunContext& ctx);
void cmd_world(const Config& config, RunContext& ctx);

// Shared config readers for the dynamics commands (natural units).
struct GridSpec {
  std::size_t particles = 1;
  int spatial_dims = 1;
  std::size_t cells_per_axis = 512;
  double cell_length = 0.25;
  double mass = 1.0;
  std::string species = "p";
  Statistics statistics = Statistics::Distinguishable;
  double de_broglie_wavelength = 0.0;
};

GridSpec read_grid(const Block& b, const GridSpec& defaults);
QuantizationParams read_quantization(const Block& b, const QuantizationParams& defaults);
EvolutionConfig read_evolution(const Block& b, const EvolutionConfig& defaults);
PotentialSpec read_potential(const Block& b);
CCQMParams read_ccqm(const Block& b, const CCQMParams& defaults);
SpreadOptions read_spread(const Block& b);
MergeRule read_merge(const Block& b, const MergeRule& defaults = {});
SplitRule read_split(const Block& b);

/// Builds the grid; variable cell mode derives the cell length from the
/// configured de Broglie wavelength.
ConfigGrid build_grid(const GridSpec& spec, const QuantizationParams& quant, std::uint64_t first_label = 0);

struct StateSpec {
  std::string kind = "gaussian";  // gaussian | two_packets | uniform
  std::vector<double> center;     // one entry per particle axis (broadcast if single)
  double width = 1.0;
  std::vector<double> momentum;
  double separation = 24.0;
  std::vector<double> weights = {0.5, 0.5};
};

StateSpec read_state(const Block& b, const StateSpec& defaults);

/// Normalized, symmetrized (if identical particles are present) and quantized.
DiscreteWavefunction build_state(const ConfigGrid& grid, const QuantizationParams& quant, const StateSpec& spec);

}  // namespace ccqm::cli
