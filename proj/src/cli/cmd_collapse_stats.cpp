#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "ccqm/csv.hpp"
#include "ccqm/error.hpp"
#include "commands.hpp"

namespace ccqm::cli {

namespace {

struct SamplingSetup {
  GridSpec grid;
  QuantizationParams quant;
  StateSpec state;
  std::size_t draws = 10000;
};

struct GrwSetup {
  std::size_t particles = 1000;
  double hit_rate = 0.01;  // 1/s
  double horizon = 10.0;   // s
  std::size_t runs = 100;
};

struct AnalyticSetup {
  std::vector<double> particles = {1.0, 1e23};
  double hit_rate = 1e-16;
};

// Consecutive cells are pooled until each bin expects at least this many draws.
constexpr double kMinExpected = 5.0;

struct ChiSquared {
  double statistic = 0.0;
  std::size_t bins = 0;
  double p_value = 1.0;
};

ChiSquared chi_squared_test(const std::vector<double>& expected, const std::vector<std::uint64_t>& observed) {
  std::vector<double> e_bins, o_bins;
  double e = 0.0, o = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    e += expected[i];
    o += static_cast<double>(observed[i]);
    if (e >= kMinExpected) {
      e_bins.push_back(e);
      o_bins.push_back(o);
      e = o = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (e_bins.empty()) {
      e_bins.push_back(e);
      o_bins.push_back(o);
    } else {
      e_bins.back() += e;
      o_bins.back() += o;
    }
  }
  ChiSquared r;
  r.bins = e_bins.size();
  for (std::size_t i = 0; i < e_bins.size(); ++i) {
    const double d = o_bins[i] - e_bins[i];
    r.statistic += d * d / e_bins[i];
  }
  if (r.bins >= 2) {
    const boost::math::chi_squared dist(static_cast<double>(r.bins - 1));
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  }
  return r;
}

nlohmann::ordered_json run_sampling(const SamplingSetup& s, RunContext& ctx) {
  const ConfigGrid grid = build_grid(s.grid, s.quant);
  const DiscreteWavefunction psi = build_state(grid, s.quant, s.state);
  const CenterSampler sampler(psi);
  Rng rng(derive_seed(ctx.seed(), 0));
  std::vector<std::uint64_t> observed(psi.size(), 0);
  for (std::size_t i = 0; i < s.draws; ++i) ++observed[sampler(rng)];

  std::vector<double> expected(psi.size());
  for (std::size_t cell = 0; cell < psi.size(); ++cell)
    expected[cell] = static_cast<double>(s.draws) * std::norm(psi.amplitudes()[cell]);
  const ChiSquared chi = chi_squared_test(expected, observed);

  if (ctx.emits(Format::Csv)) {
    auto out = ctx.open("center_histogram.csv");
    CsvWriter csv(out);
    csv.header({"cell", "probability", "expected", "observed"});
    for (std::size_t cell = 0; cell < psi.size(); ++cell)
      csv.field(static_cast<std::uint64_t>(cell))
          .field(std::norm(psi.amplitudes()[cell]))
          .field(expected[cell])
          .field(observed[cell])
          .end_row();
  }

  nlohmann::ordered_json j;
  j["cells"] = psi.size();
  j["relative_volume"] = relative_volume(psi);
  j["draws"] = s.draws;
  j["chi_squared"] = chi.statistic;
  j["bins"] = chi.bins;
  j["degrees_of_freedom"] = chi.bins > 0 ? chi.bins - 1 : 0;
  j["p_value"] = chi.p_value;
  j["passes_p_above_0.001"] = chi.p_value > 0.001;
  return j;
}

nlohmann::ordered_json run_grw(const GrwSetup& s, RunContext& ctx) {
  std::vector<std::uint64_t> counts(s.runs, 0);
  const auto n = static_cast<std::ptrdiff_t>(s.runs);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    Rng rng(derive_seed(ctx.seed(), 1 + static_cast<std::uint64_t>(r)));
    counts[r] = grw_schedule(s.particles, s.hit_rate, s.horizon, rng).size();
  }

  const double mu = static_cast<double>(s.particles) * s.hit_rate * s.horizon;
  double total = 0.0;
  std::size_t within = 0;
  for (std::uint64_t c : counts) {
    total += static_cast<double>(c);
    if (std::abs(static_cast<double>(c) - mu) <= 3.0 * std::sqrt(mu)) ++within;
  }
  const double runs = static_cast<double>(s.runs);
  const double mean = s.runs > 0 ? total / runs : 0.0;
  // The mean of `runs` Poisson(mu) counts has standard deviation sqrt(mu / runs).
  const double sigma = mu > 0.0 && s.runs > 0 ? std::sqrt(mu / runs) : 0.0;
  const double z = sigma > 0.0 ? (mean - mu) / sigma : 0.0;

  if (ctx.emits(Format::Csv)) {
    auto out = ctx.open("grw_counts.csv");
    CsvWriter csv(out);
    csv.header({"run", "events"});
    for (std::size_t r = 0; r < counts.size(); ++r) csv.field(static_cast<std::uint64_t>(r)).field(counts[r]).end_row();
  }

  nlohmann::ordered_json j;
  j["particles"] = s.particles;
  j["hit_rate_per_s"] = s.hit_rate;
  j["horizon_s"] = s.horizon;
  j["runs"] = s.runs;
  j["expected_count"] = mu;
  j["mean_count"] = mean;
  j["z_score_of_mean"] = z;
  j["mean_within_3_sigma"] = std::abs(z) <= 3.0;
  j["runs_within_3_sigma"] = within;
  return j;
}

nlohmann::ordered_json run_analytic(const AnalyticSetup& s) {
  auto rows = nlohmann::ordered_json::array();
  for (double n : s.particles) {
    nlohmann::ordered_json r;
    r["particles"] = n;
    r["hit_rate_per_s"] = s.hit_rate;
    r["mean_interval_s"] = grw_mean_interval(n, s.hit_rate);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

void cmd_collapse_stats(const Config& config, RunContext& ctx) {
  const Block root = config.root();

  SamplingSetup sampling;
  const Block cs = root.child("center_sampling");
  GridSpec g;
  g.cells_per_axis = 256;
  sampling.grid = read_grid(cs.child("grid"), g);
  QuantizationParams q;
  q.f0 = 0.01;
  sampling.quant = read_quantization(cs.child("quantization"), q);
  StateSpec st;
  st.width = 6.0;
  sampling.state = read_state(cs.child("initial_state"), st);
  sampling.draws = cs.count("draws", sampling.draws);
  if (sampling.draws == 0) throw_config("center_sampling.draws must be positive");

  GrwSetup grw;
  const Block gb = root.child("grw");
  grw.particles = gb.count("particles", grw.particles);
  grw.hit_rate = gb.quantity("hit_rate", Dimension::Frequency, grw.hit_rate);
  grw.horizon = gb.quantity("horizon", Dimension::Time, grw.horizon);
  grw.runs = gb.count("runs", grw.runs);
  if (grw.particles == 0) throw_config("grw.particles must be positive");
  if (!(grw.hit_rate > 0.0)) throw_config("grw.hit_rate must be positive");
  if (!(grw.horizon >= 0.0)) throw_config("grw.horizon must be non-negative");

  AnalyticSetup analytic;
  const Block ab = root.child("analytic");
  analytic.particles = ab.numbers("particles", analytic.particles);
  analytic.hit_rate = ab.quantity("hit_rate", Dimension::Frequency, analytic.hit_rate);
  for (double n : analytic.particles)
    if (!(n > 0.0)) throw_config("analytic.particles must be positive");
  if (!(analytic.hit_rate > 0.0)) throw_config("analytic.hit_rate must be positive");
  config.finish();

  nlohmann::ordered_json j;
  j["command"] = "collapse-stats";
  j["seed"] = ctx.seed();
  j["config_hash"] = hex64(ctx.config_hash());
  j["center_sampling"] = run_sampling(sampling, ctx);
  j["grw_schedule"] = run_grw(grw, ctx);
  j["analytic_mean_interval"] = run_analytic(analytic);
  auto out = ctx.open("collapse_stats.json");
  out << j.dump(2) << '\n';
}

}  // namespace ccqm::cli
