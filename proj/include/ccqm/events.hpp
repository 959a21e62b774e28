#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "ccqm/grid.hpp"

namespace ccqm {

enum class EventKind { GRWHit, CCQMCollapse, Merge, Split };

std::string_view to_string(EventKind kind) noexcept;

struct CollapseEvent {
  double time = 0.0;
  EventKind kind = EventKind::CCQMCollapse;
  // Hit particle for GRWHit events.
  std::optional<std::size_t> particle;
  // Collapse centre x' as a configuration cell and one position per particle.
  std::optional<std::size_t> center_cell;
  std::vector<Position> center;
  // epsilon (CCQM) or alpha (GRW).
  double width_param = 0.0;
  std::size_t v_pre = 0;
  std::size_t v_post = 0;
  // Generator state for replay: seed, draw count before the event, draws used.
  std::uint64_t seed = 0;
  std::uint64_t rng_offset = 0;
  std::uint64_t rng_draws = 0;
  // Split: |<A x B|psi>|^2. Merge: interaction strength is stored in width_param.
  std::optional<double> fidelity;
  // Particle labels involved, and the trajectory the event belongs to.
  std::vector<std::uint64_t> labels;
  std::size_t trajectory = 0;
};

/// One JSON object per line, keys in a fixed order. Output is byte-stable.
void write_event_jsonl(std::ostream& out, const CollapseEvent& event, int spatial_dims);
void write_events_jsonl(std::ostream& out, std::span<const CollapseEvent> events, int spatial_dims);

}  // namespace ccqm
