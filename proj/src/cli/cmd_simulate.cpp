#include <cmath>
#include <exception>

#include <boost/math/distributions/normal.hpp>

#include "ccqm/csv.hpp"
#include "ccqm/error.hpp"
#include "ccqm/events.hpp"
#include "ccqm/snapshot.hpp"
#include "commands.hpp"

namespace ccqm::cli {

namespace {

struct SimulateSetup {
  std::string mode;
  GridSpec grid;
  QuantizationParams quant;
  EvolutionConfig evolution;
  PotentialSpec potential;
  CCQMParams ccqm;
  SpreadOptions spread;
  StateSpec state;
  std::size_t cycles = 0;
  std::size_t trajectories = 0;
};

SimulateSetup read_setup(const Config& config) {
  const Block root = config.root();
  SimulateSetup s;
  s.mode = root.text("mode", "cycles");
  if (s.mode != "cycles" && s.mode != "ensemble") throw_config("mode must be 'cycles' or 'ensemble'");
  const bool ensemble = s.mode == "ensemble";

  GridSpec grid_defaults;
  grid_defaults.cells_per_axis = ensemble ? 256 : 512;
  s.grid = read_grid(root.child("grid"), grid_defaults);

  QuantizationParams q;
  q.f0 = 0.01;
  s.quant = read_quantization(root.child("quantization"), q);

  const Block evo = root.child("evolution");
  s.evolution = read_evolution(evo, EvolutionConfig{});
  s.potential = read_potential(evo.child("potential"));

  CCQMParams c;
  c.v_c = ensemble ? 50 : 200;
  c.epsilon_min = 1e-6;
  c.epsilon_max = 1e6;
  s.ccqm = read_ccqm(root.child("ccqm"), c);
  s.spread = read_spread(root.child("spread"));

  StateSpec st;
  st.kind = ensemble ? "two_packets" : "gaussian";
  st.weights = {0.7, 0.3};
  s.state = read_state(root.child("initial_state"), st);

  s.cycles = root.count("cycles", 5);
  s.trajectories = root.count("trajectories", 100);
  if (ensemble && s.trajectories == 0) throw_config("trajectories must be positive");
  return s;
}

void write_trace(RunContext& ctx, const std::vector<VolumeSample>& trace) {
  if (!ctx.emits(Format::Csv)) return;
  auto out = ctx.open("volume_trace.csv");
  write_volume_trace_csv(out, trace);
}

void run_cycles(const SimulateSetup& s, RunContext& ctx) {
  const ConfigGrid grid = build_grid(s.grid, s.quant);
  const DiscreteWavefunction psi = build_state(grid, s.quant, s.state);
  Rng rng(ctx.seed());
  const CycleResult r =
      spread_collapse_cycles(psi, s.potential, s.evolution, s.ccqm, s.quant, s.cycles, rng, s.spread);

  write_trace(ctx, r.trace);
  if (ctx.emits(Format::Jsonl)) {
    auto out = ctx.open("events.jsonl");
    write_events_jsonl(out, r.events, grid.spatial_dims());
  }
  if (ctx.emits(Format::Snapshot)) {
    auto out = ctx.open("final_state.snap");
    write_snapshot(out, r.state, ctx.seed());
  }

  nlohmann::ordered_json j;
  j["command"] = "simulate";
  j["mode"] = "cycles";
  j["seed"] = ctx.seed();
  j["config_hash"] = hex64(ctx.config_hash());
  j["v_c"] = s.ccqm.v_c;
  j["collapse_fraction"] = s.ccqm.collapse_fraction;
  j["cycles"] = r.events.size();
  j["elapsed_time_nat"] = r.time;
  auto pre = nlohmann::ordered_json::array(), post = nlohmann::ordered_json::array();
  bool below = true, within = true;
  for (const auto& e : r.events) {
    pre.push_back(e.v_pre);
    post.push_back(e.v_post);
    below = below && e.v_post < s.ccqm.v_c;
    const std::size_t target = s.ccqm.target_volume(e.v_pre);
    within = within && e.v_post + 1 >= target && e.v_post <= target + 1;
  }
  j["v_pre"] = std::move(pre);
  j["v_post"] = std::move(post);
  j["all_v_post_below_v_c"] = below;
  j["all_v_post_within_one_of_target"] = within;
  auto out = ctx.open("summary.json");
  out << j.dump(2) << '\n';
}

void run_ensemble(const SimulateSetup& s, RunContext& ctx) {
  if (s.state.kind != "two_packets") throw_config("ensemble mode needs initial_state.kind = two_packets");
  const ConfigGrid grid = build_grid(s.grid, s.quant);
  const DiscreteWavefunction psi = build_state(grid, s.quant, s.state);
  if (relative_volume(psi) < s.ccqm.v_c)
    throw_config("ensemble mode: the initial relative volume " + std::to_string(relative_volume(psi)) +
                 " is below v_c; lower ccqm.v_c");

  // Packets are split at the midpoint of the first axis of particle 0.
  const double midpoint = s.state.center.empty() ? 0.0 : s.state.center[0];
  double p_left = 0.0;
  {
    std::vector<std::size_t> blocks(grid.num_particles());
    for (std::size_t cell = 0; cell < psi.size(); ++cell) {
      grid.decompose(cell, blocks);
      if (grid.position(0, blocks[0])[0] < midpoint) p_left += std::norm(psi.amplitudes()[cell]);
    }
  }

  const std::size_t n = s.trajectories;
  std::vector<CollapseEvent> events(n);
  std::vector<int> left(n, 0);
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    try {
      Rng rng(derive_seed(ctx.seed(), static_cast<std::uint64_t>(t)));
      CollapseOutcome c = ccqm_collapse(psi, s.ccqm, s.quant, rng);
      c.event.trajectory = static_cast<std::size_t>(t);
      left[t] = c.event.center[0][0] < midpoint ? 1 : 0;
      events[t] = std::move(c.event);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  // The first failure in trajectory order is reported, independent of scheduling.
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::size_t n_left = 0;
  for (int l : left) n_left += static_cast<std::size_t>(l);
  const double nn = static_cast<double>(n);
  const double sd = std::sqrt(nn * p_left * (1.0 - p_left));
  const double z = sd > 0.0 ? (static_cast<double>(n_left) - nn * p_left) / sd : 0.0;
  const boost::math::normal normal;
  const double p_value = 2.0 * boost::math::cdf(boost::math::complement(normal, std::abs(z)));

  if (ctx.emits(Format::Jsonl)) {
    auto out = ctx.open("events.jsonl");
    write_events_jsonl(out, events, grid.spatial_dims());
  }
  if (ctx.emits(Format::Csv)) {
    auto out = ctx.open("trajectories.csv");
    CsvWriter csv(out);
    csv.header({"trajectory", "seed", "center_x", "packet", "v_pre", "v_post", "epsilon"});
    for (std::size_t t = 0; t < n; ++t)
      csv.field(static_cast<std::uint64_t>(t))
          .field(events[t].seed)
          .field(events[t].center[0][0])
          .field(left[t] ? std::string_view("left") : std::string_view("right"))
          .field(static_cast<std::uint64_t>(events[t].v_pre))
          .field(static_cast<std::uint64_t>(events[t].v_post))
          .field(events[t].width_param)
          .end_row();
  }

  nlohmann::ordered_json j;
  j["command"] = "simulate";
  j["mode"] = "ensemble";
  j["seed"] = ctx.seed();
  j["config_hash"] = hex64(ctx.config_hash());
  j["trajectories"] = n;
  j["v_pre"] = relative_volume(psi);
  j["born_probability_left"] = p_left;
  j["count_left"] = n_left;
  j["count_right"] = n - n_left;
  j["expected_left"] = nn * p_left;
  j["binomial_sigma"] = sd;
  j["z_score"] = z;
  j["two_sided_p_value"] = p_value;
  j["within_3_sigma"] = std::abs(z) <= 3.0;
  auto out = ctx.open("summary.json");
  out << j.dump(2) << '\n';
}

}  // namespace

void cmd_simulate(const Config& config, RunContext& ctx) {
  const SimulateSetup s = read_setup(config);
  config.finish();
  if (s.mode == "cycles") run_cycles(s, ctx);
  else run_ensemble(s, ctx);
}

}  // namespace ccqm::cli
