#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <sstream>

#include "ccqm/collapse.hpp"
#include "ccqm/error.hpp"
#include "helpers.hpp"

namespace ccqm {
namespace {

using test::line_grid;
using test::quant;

CCQMParams params(std::size_t v_c, double f = 0.5) {
  CCQMParams p;
  p.v_c = v_c;
  p.collapse_fraction = f;
  p.epsilon_min = 1e-6;
  p.epsilon_max = 1e6;
  return p;
}

// Pearson chi-squared p-value with bins pooled to at least 5 expected draws.
double chi_squared_p(const std::vector<double>& prob, const std::vector<int>& counts, int draws) {
  double stat = 0.0, e = 0.0, o = 0.0;
  int bins = 0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    e += prob[i] * draws;
    o += counts[i];
    if (e >= 5.0 || i + 1 == prob.size()) {
      if (e > 0.0) {
        stat += (o - e) * (o - e) / e;
        ++bins;
      }
      e = o = 0.0;
    }
  }
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(bins - 1), stat));
}

TEST(CenterSampling, FollowsBornWeights) {
  const ConfigGrid g = line_grid(256, 0.25);
  const auto psi = quantize(test::gaussian(g, quant(0.01), {3.0}, 5.0));
  std::vector<double> prob(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) prob[i] = std::norm(psi.amplitudes()[i]);
  const CenterSampler sampler(psi);
  Rng rng(1);
  const int draws = 20000;
  std::vector<int> counts(psi.size(), 0);
  for (int i = 0; i < draws; ++i) {
    const std::size_t c = sampler(rng);
    ASSERT_GT(prob[c], 0.0);
    ++counts[c];
  }
  EXPECT_GT(chi_squared_p(prob, counts, draws), 0.001);
}

TEST(CenterSampling, DetectsWrongDistribution) {
  // The same test must reject draws from a shifted state.
  const ConfigGrid g = line_grid(256, 0.25);
  const auto psi = quantize(test::gaussian(g, quant(0.01), {0.0}, 5.0));
  const auto shifted = quantize(test::gaussian(g, quant(0.01), {2.0}, 5.0));
  std::vector<double> prob(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) prob[i] = std::norm(psi.amplitudes()[i]);
  const CenterSampler sampler(shifted);
  Rng rng(2);
  std::vector<int> counts(psi.size(), 0);
  for (int i = 0; i < 20000; ++i) ++counts[sampler(rng)];
  EXPECT_LT(chi_squared_p(prob, counts, 20000), 1e-6);
}

TEST(EpsilonSolver, HitsTargetWithinOneCellAgainstBruteForceScan) {
  Rng pick(77);
  for (int trial = 0; trial < 6; ++trial) {
    const ConfigGrid g = line_grid(4096, 0.25);
    const double width = 10.0 + 60.0 * pick.uniform();
    const auto q = quant(0.003);
    const auto psi = quantize(test::gaussian(g, q, {0.0}, width, {0.3}));
    const std::size_t v = relative_volume(psi);
    const auto p = params(v, 0.3 + 0.4 * pick.uniform());
    const std::size_t centre = sample_collapse_center(psi, pick);
    const EpsilonSolution s = ccqm_solve_epsilon(psi, centre, p, q);
    EXPECT_EQ(s.v_pre, v);
    EXPECT_EQ(s.target, p.target_volume(v));
    EXPECT_LE(std::max(s.v_post, s.target) - std::min(s.v_post, s.target), 1u);
    EXPECT_EQ(post_collapse_volume(psi, centre, s.epsilon, q), s.v_post);
    // The scan brackets the solution: some scanned epsilon lands on each side of the target.
    bool above = false, below = false;
    for (int i = 0; i < 400; ++i) {
      const double eps = 1e-6 * std::pow(1e12, i / 399.0);
      const std::size_t vs = post_collapse_volume(psi, centre, eps, q);
      above = above || vs >= s.target;
      below = below || vs <= s.target;
    }
    EXPECT_TRUE(above && below);
  }
}

TEST(EpsilonSolver, BracketFailures) {
  const ConfigGrid g = line_grid(1024, 0.25);
  const auto q = quant(0.005);
  const auto psi = quantize(test::gaussian(g, q, {0.0}, 20.0));
  const std::size_t v = relative_volume(psi);
  auto p = params(v);
  p.epsilon_max = 1e-5;  // far too wide to collapse anything
  try {
    ccqm_solve_epsilon(psi, psi.size() / 2, p, q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Bracket);
  }
  p = params(v);
  p.epsilon_min = 1e3;  // already a single cell
  EXPECT_THROW(ccqm_solve_epsilon(psi, psi.size() / 2, p, q), Error);
}

TEST(CcqmCollapse, ReducesVolumeBelowCriticalAndRecordsEvent) {
  const ConfigGrid g = line_grid(1024, 0.25);
  const auto q = quant(0.005);
  const auto psi = quantize(test::gaussian(g, q, {0.0}, 15.0));
  const std::size_t v = relative_volume(psi);
  const auto p = params(v - 10, 0.5);
  Rng rng(5);
  const auto out = ccqm_collapse(psi, p, q, rng, 2.5);
  EXPECT_LT(out.event.v_post, p.v_c);
  EXPECT_EQ(out.event.v_post, relative_volume(out.state));
  EXPECT_EQ(out.event.v_pre, v);
  EXPECT_EQ(out.event.kind, EventKind::CCQMCollapse);
  EXPECT_EQ(out.event.time, 2.5);
  EXPECT_EQ(out.event.seed, 5u);
  EXPECT_EQ(out.event.rng_offset, 0u);
  EXPECT_EQ(out.event.rng_draws, rng.draws());
  ASSERT_TRUE(out.event.center_cell.has_value());
  EXPECT_EQ(out.event.center[0][0], g.position(0, *out.event.center_cell)[0]);
  EXPECT_NEAR(out.state.norm_squared(), 1.0, 1e-12);

  Rng again(5);
  const auto replay = ccqm_collapse(psi, p, q, again, 2.5);
  EXPECT_EQ(replay.event.center_cell, out.event.center_cell);
  EXPECT_EQ(replay.event.width_param, out.event.width_param);
}

TEST(CcqmCollapse, RefusesStatesBelowCriticalVolume) {
  const ConfigGrid g = line_grid(256, 0.25);
  const auto q = quant(0.01);
  const auto psi = quantize(test::gaussian(g, q, {0.0}, 2.0));
  Rng rng(1);
  EXPECT_THROW(ccqm_collapse(psi, params(relative_volume(psi) + 1), q, rng), Error);
  EXPECT_THROW(ccqm_collapse(test::gaussian(g, q, {0.0}, 2.0), params(2), q, rng), Error);
}

TEST(CcqmParams, Validation) {
  EXPECT_THROW(params(1).validate(), Error);
  EXPECT_THROW(params(10, 0.0).validate(), Error);
  EXPECT_THROW(params(10, 1.0).validate(), Error);
  auto p = params(10);
  p.epsilon_min = p.epsilon_max;
  EXPECT_THROW(p.validate(), Error);
  EXPECT_EQ(params(150, 0.5).target_volume(201), 101u);
  EXPECT_EQ(params(150, 0.5).target_volume(1), 1u);
  // Far above v_c the target is capped so the result still ends below it.
  EXPECT_EQ(params(100, 0.5).target_volume(1000), 98u);
  EXPECT_EQ(params(2, 0.5).target_volume(1000), 1u);
}

DiscreteWavefunction two_identical(Statistics s, const QuantizationParams& q) {
  auto p = test::particles(2, s);
  const ConfigGrid g = ConfigGrid::uniform(p, 1, 96, 0.25);
  // Two distinct single-particle orbitals so that fermions survive antisymmetrization.
  return symmetrize(make_wavefunction(g, q, [](std::span<const Position> x) {
    const double a = x[0][0], b = x[1][0];
    return std::exp(cplx(-(a + 2) * (a + 2) / 8.0 - (b - 3) * (b - 3) / 12.0, 0.4 * a - 0.2 * b));
  }));
}

double exchange_asymmetry(const DiscreteWavefunction& psi, double sign) {
  const auto swapped = exchange_particles(psi, 0, 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    worst = std::max(worst, std::abs(swapped.amplitudes()[i] - sign * psi.amplitudes()[i]));
  return worst;
}

class SymmetryContrast : public ::testing::TestWithParam<Statistics> {};

TEST_P(SymmetryContrast, CcqmPreservesExchangeSymmetryAndGrwBreaksIt) {
  const auto q = quant(0.002, 16);
  const auto psi = two_identical(GetParam(), q);
  const double sign = GetParam() == Statistics::Fermion ? -1.0 : 1.0;
  ASSERT_LE(exchange_asymmetry(psi, sign), 1e-15);
  const std::size_t v = relative_volume(psi);

  Rng rng(11);
  for (int i = 0; i < 3; ++i) {
    const auto out = ccqm_collapse(psi, params(v / 2), q, rng);
    EXPECT_LE(exchange_asymmetry(out.state, sign), 1e-9);
  }
  GRWParams grw;
  grw.alpha = 1.0;
  const auto hit = grw_hit(psi, 0, grw, rng);
  EXPECT_GT(exchange_asymmetry(hit.state, sign), 1e-3);
}

INSTANTIATE_TEST_SUITE_P(Statistics, SymmetryContrast, ::testing::Values(Statistics::Boson, Statistics::Fermion));

TEST(JumpFactor, IsExchangeSymmetricForIdenticalParticles) {
  const ConfigGrid g = ConfigGrid::uniform(test::particles(2, Statistics::Fermion), 1, 32, 0.5);
  const std::size_t centre[] = {10, 20};
  const auto f = ccqm_jump_factor(g, centre, 0.3);
  for (std::size_t a = 0; a < 32; ++a)
    for (std::size_t b = 0; b < 32; ++b) {
      const std::size_t ab[] = {a, b}, ba[] = {b, a};
      ASSERT_EQ(f[g.compose(ab)], f[g.compose(ba)]);
    }
  const ConfigGrid d = ConfigGrid::uniform(test::particles(2), 1, 32, 0.5);
  const auto fd = ccqm_jump_factor(d, centre, 0.3);
  const std::size_t ab[] = {10, 20}, ba[] = {20, 10};
  EXPECT_GT(fd[d.compose(ab)], fd[d.compose(ba)]);
}

TEST(Grw, CentreDistributionIsBornSmearedByJumpWidth) {
  const ConfigGrid g = line_grid(512, 0.1);
  const double w = 1.5, alpha = 2.0;
  const auto psi = quantize(test::gaussian(g, quant(1e-3), {1.0}, w));
  Rng rng(3);
  double s = 0, s2 = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double x = sample_grw_center(psi, 0, alpha, rng)[0];
    s += x;
    s2 += x * x;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  const double expect_var = w * w + 1.0 / (2.0 * alpha);
  EXPECT_NEAR(mean, 1.0, 4.0 * std::sqrt(expect_var / n));
  EXPECT_NEAR(var / expect_var, 1.0, 0.03);
}

TEST(Grw, LocalizationNarrowsTheHitParticleOnly) {
  const ConfigGrid g = ConfigGrid::uniform(test::particles(2), 1, 128, 0.25);
  const auto q = quant(1e-5);
  const auto psi = quantize(test::gaussian(g, q, {0.0, 0.0}, 3.0));
  const auto out = grw_localize(psi, 0, Position{1.0, 0, 0}, 4.0);
  EXPECT_LT(position_spread(out.state, 0), 0.5);
  EXPECT_NEAR(position_spread(out.state, 1), position_spread(psi, 1), 1e-3);
  EXPECT_EQ(out.event.kind, EventKind::GRWHit);
  EXPECT_EQ(out.event.particle, 0u);
  EXPECT_LT(out.event.v_post, out.event.v_pre);
}

TEST(Grw, FarCentreVanishes) {
  const ConfigGrid g = line_grid(64, 0.25);
  const auto psi = quantize(test::gaussian(g, quant(0.01), {0.0}, 1.0));
  try {
    grw_localize(psi, 0, Position{1e4, 0, 0}, 1e3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::VanishingWavefunction);
  }
}

TEST(GrwSchedule, PoissonCountsAndUniformParticles) {
  const std::size_t n = 50;
  const double lambda = 0.2, horizon = 10.0;  // N lambda T = 100
  const int runs = 400;
  double s = 0, s2 = 0;
  std::vector<int> per_particle(n, 0);
  for (int r = 0; r < runs; ++r) {
    Rng rng(derive_seed(9, r));
    const auto hits = grw_schedule(n, lambda, horizon, rng);
    double last = 0.0;
    for (const auto& h : hits) {
      ASSERT_GE(h.time, last);
      ASSERT_LT(h.time, horizon);
      last = h.time;
      ++per_particle[h.particle];
    }
    s += hits.size();
    s2 += static_cast<double>(hits.size()) * hits.size();
  }
  const double mean = s / runs, var = s2 / runs - mean * mean;
  EXPECT_NEAR(mean, 100.0, 3.0 * std::sqrt(100.0 / runs));
  EXPECT_NEAR(var / 100.0, 1.0, 0.25);
  const double per = s / n;
  for (int c : per_particle) EXPECT_NEAR(c, per, 5.0 * std::sqrt(per));
}

TEST(GrwSchedule, ZeroHorizonIsEmptyAndMeanIntervals) {
  Rng rng(1);
  EXPECT_TRUE(grw_schedule(10, 1.0, 0.0, rng).empty());
  EXPECT_THROW(grw_schedule(0, 1.0, 1.0, rng), Error);
  EXPECT_DOUBLE_EQ(grw_mean_interval(1.0, 1e-16), 1e16);
  EXPECT_NEAR(grw_mean_interval(1e23, 1e-16), 1e-7, 1e-22);
}

TEST(Cycles, SawtoothVolumeTrace) {
  const ConfigGrid g = line_grid(512, 0.25);
  const auto q = quant(0.01);
  const auto psi = quantize(test::gaussian(g, q, {0.0}, 1.0));
  EvolutionConfig evo;
  evo.dt = 0.01;
  evo.steps_per_report = 10;
  const auto p = params(120);
  Rng a(4), b(4);
  const auto r = spread_collapse_cycles(psi, PotentialSpec::free_particle(), evo, p, q, 4, a);
  ASSERT_EQ(r.events.size(), 4u);
  for (const auto& e : r.events) {
    EXPECT_GE(e.v_pre, p.v_c);
    EXPECT_LT(e.v_post, p.v_c);
    EXPECT_LE(std::max(e.v_post, p.target_volume(e.v_pre)) - std::min(e.v_post, p.target_volume(e.v_pre)), 1u);
  }
  for (std::size_t i = 1; i < r.events.size(); ++i) EXPECT_GT(r.events[i].time, r.events[i - 1].time);
  const auto r2 = spread_collapse_cycles(psi, PotentialSpec::free_particle(), evo, p, q, 4, b);
  std::ostringstream x, y;
  write_events_jsonl(x, r.events, 1);
  write_events_jsonl(y, r2.events, 1);
  EXPECT_EQ(x.str(), y.str());
}

TEST(Events, JsonlLayout) {
  CollapseEvent e;
  e.time = 1.5;
  e.kind = EventKind::GRWHit;
  e.particle = 1;
  e.center = {Position{0, 0, 0}, Position{2.5, 0, 0}};
  e.width_param = 1.0;
  e.v_pre = 10;
  e.v_post = 4;
  e.seed = 3;
  e.labels = {7, 8};
  std::ostringstream out;
  write_event_jsonl(out, e, 1);
  EXPECT_EQ(out.str(),
            "{\"trajectory\":0,\"time\":1.5,\"kind\":\"grw_hit\",\"particle\":1,\"center_cell\":null,"
            "\"center\":[[0.0],[2.5]],\"width_param\":1.0,\"v_pre\":10,\"v_post\":4,\"seed\":3,"
            "\"rng_offset\":0,\"rng_draws\":0,\"fidelity\":null,\"labels\":[7,8]}\n");
}

}  // namespace
}  // namespace ccqm
