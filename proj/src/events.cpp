#include "ccqm/events.hpp"

#include <json.hpp>

namespace ccqm {

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::GRWHit: return "grw_hit";
    case EventKind::CCQMCollapse: return "ccqm_collapse";
    case EventKind::Merge: return "merge";
    case EventKind::Split: return "split";
  }
  return "unknown";
}

void write_event_jsonl(std::ostream& out, const CollapseEvent& e, int spatial_dims) {
  nlohmann::ordered_json j;
  j["trajectory"] = e.trajectory;
  j["time"] = e.time;
  j["kind"] = to_string(e.kind);
  j["particle"] = e.particle ? nlohmann::ordered_json(*e.particle) : nlohmann::ordered_json(nullptr);
  j["center_cell"] = e.center_cell ? nlohmann::ordered_json(*e.center_cell) : nlohmann::ordered_json(nullptr);
  auto center = nlohmann::ordered_json::array();
  for (const Position& x : e.center) {
    auto p = nlohmann::ordered_json::array();
    for (int d = 0; d < spatial_dims; ++d) p.push_back(x[d]);
    center.push_back(std::move(p));
  }
  j["center"] = std::move(center);
  j["width_param"] = e.width_param;
  j["v_pre"] = e.v_pre;
  j["v_post"] = e.v_post;
  j["seed"] = e.seed;
  j["rng_offset"] = e.rng_offset;
  j["rng_draws"] = e.rng_draws;
  j["fidelity"] = e.fidelity ? nlohmann::ordered_json(*e.fidelity) : nlohmann::ordered_json(nullptr);
  j["labels"] = e.labels;
  out << j.dump() << '\n';
}

void write_events_jsonl(std::ostream& out, std::span<const CollapseEvent> events, int spatial_dims) {
  for (const auto& e : events) write_event_jsonl(out, e, spatial_dims);
}

}  // namespace ccqm
