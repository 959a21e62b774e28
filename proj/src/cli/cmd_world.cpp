#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>

#include "ccqm/csv.hpp"
#include "ccqm/error.hpp"
#include "ccqm/events.hpp"
#include "ccqm/snapshot.hpp"
#include "ccqm/world.hpp"
#include "commands.hpp"

namespace ccqm::cli {

namespace {

struct MemberSpec {
  GridSpec grid;
  StateSpec state;
};

std::vector<MemberSpec> default_members(const GridSpec& grid) {
  std::vector<MemberSpec> out(2);
  for (std::size_t i = 0; i < 2; ++i) {
    out[i].grid = grid;
    out[i].state.kind = "gaussian";
    out[i].state.center = {i == 0 ? -2.0 : 2.0};
    out[i].state.width = 1.0;
  }
  return out;
}

}  // namespace

void cmd_world(const Config& config, RunContext& ctx) {
  const Block root = config.root();
  GridSpec grid_defaults;
  grid_defaults.cells_per_axis = 256;
  const GridSpec shared_grid = read_grid(root.child("grid"), grid_defaults);

  WorldRules rules;
  QuantizationParams q;
  q.f0 = 0.01;
  rules.quant = read_quantization(root.child("quantization"), q);
  const Block evo = root.child("evolution");
  rules.evolution = read_evolution(evo, EvolutionConfig{});
  rules.potential = read_potential(evo.child("potential"));
  if (rules.potential.kind == PotentialKind::PairGaussianWell)
    throw_config("world members share a single-particle potential; use merge.model for pair wells");
  CCQMParams c;
  c.v_c = 150;
  c.epsilon_min = 1e-6;
  c.epsilon_max = 1e6;
  rules.ccqm = read_ccqm(root.child("ccqm"), c);
  MergeRule mr;
  mr.coupling_scale = 200.0;
  rules.merge = read_merge(root.child("merge"), mr);
  rules.split = read_split(root.child("split"));

  std::vector<MemberSpec> specs;
  const auto blocks = root.children("members");
  if (blocks.empty()) specs = default_members(shared_grid);
  for (const auto& mb : blocks) {
    MemberSpec m;
    GridSpec g = shared_grid;
    g.particles = mb.count("particles", 1);
    g.species = mb.text("species", shared_grid.species);
    m.grid = read_grid(mb.child("grid"), g);
    m.state = read_state(mb.child("initial_state"), StateSpec{});
    specs.push_back(std::move(m));
  }

  const std::size_t steps = root.count("steps", 10);
  const double dt = root.quantity("dt", Dimension::Natural, 0.5);
  if (!(dt > 0.0)) throw_config("dt must be positive");
  const bool snapshot_every_step = root.flag("snapshot_every_step", false);
  config.finish();

  WorldState world;
  std::uint64_t next_label = 0;
  for (const auto& s : specs) {
    const ConfigGrid grid = build_grid(s.grid, rules.quant, next_label);
    next_label += s.grid.particles;
    world.members.push_back(build_state(grid, rules.quant, s.state));
  }
  world_labels(world);

  Rng rng(ctx.seed());
  std::vector<CollapseEvent> log;

  std::optional<std::ofstream> trace_file;
  std::optional<CsvWriter> trace;
  if (ctx.emits(Format::Csv)) {
    trace_file.emplace(ctx.open("world_trace.csv"));
    trace.emplace(*trace_file);
    trace->header({"step", "time", "members", "particles", "max_relative_volume", "events"});
  }
  const auto record = [&](std::size_t step) {
    if (!trace) return;
    std::size_t particles = 0, vmax = 0;
    for (const auto& m : world.members) {
      particles += m.grid().num_particles();
      vmax = std::max(vmax, relative_volume(quantize(m.grid(), m.amplitudes(), rules.quant)));
    }
    trace->field(static_cast<std::uint64_t>(step))
        .field(world.time)
        .field(static_cast<std::uint64_t>(world.members.size()))
        .field(static_cast<std::uint64_t>(particles))
        .field(static_cast<std::uint64_t>(vmax))
        .field(static_cast<std::uint64_t>(log.size()))
        .end_row();
  };

  std::vector<std::string> snapshots;
  const auto save_members = [&](const std::string& prefix) {
    if (!ctx.emits(Format::Snapshot)) return;
    for (std::size_t i = 0; i < world.members.size(); ++i) {
      const std::string name = prefix + "member_" + std::to_string(i) + ".snap";
      auto out = ctx.open(name);
      write_snapshot(out, world.members[i], ctx.seed());
      snapshots.push_back(name);
    }
  };

  record(0);
  for (std::size_t step = 1; step <= steps; ++step) {
    world = step_world(world, dt, rules, rng, log);
    record(step);
    if (snapshot_every_step && step < steps) save_members("step_" + std::to_string(step) + "_");
  }
  if (trace_file) trace_file->close();
  save_members("final_");

  if (ctx.emits(Format::Jsonl)) {
    auto out = ctx.open("events.jsonl");
    write_events_jsonl(out, log, shared_grid.spatial_dims);
  }

  nlohmann::ordered_json j;
  j["command"] = "world";
  j["seed"] = ctx.seed();
  j["config_hash"] = hex64(ctx.config_hash());
  j["steps"] = steps;
  j["time"] = world.time;
  j["event_log"] = ctx.emits(Format::Jsonl) ? nlohmann::ordered_json("events.jsonl") : nlohmann::ordered_json();
  j["events"] = log.size();
  auto members = nlohmann::ordered_json::array();
  for (const auto& m : world.members) {
    nlohmann::ordered_json e;
    auto labels = nlohmann::ordered_json::array();
    for (const auto& p : m.grid().particles()) labels.push_back(p.label);
    e["labels"] = std::move(labels);
    e["relative_volume"] = relative_volume(quantize(m.grid(), m.amplitudes(), rules.quant));
    members.push_back(std::move(e));
  }
  j["members"] = std::move(members);
  j["snapshots"] = snapshots;
  auto out = ctx.open("world_manifest.json");
  out << j.dump(2) << '\n';
}

}  // namespace ccqm::cli
