#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "ccqm/error.hpp"
#include "ccqm/evolution.hpp"
#include "helpers.hpp"

namespace ccqm {
namespace {

using test::line_grid;
using test::quant;

double free_width(double sigma0, double mass, double t) {
  const double tau = t / (2.0 * mass * sigma0 * sigma0);
  return sigma0 * std::sqrt(1.0 + tau * tau);
}

EvolutionConfig config(Scheme s, double dt) {
  EvolutionConfig c;
  c.scheme = s;
  c.dt = dt;
  c.steps_per_report = 50;
  return c;
}

class FreeSpreading : public ::testing::TestWithParam<Scheme> {};

TEST_P(FreeSpreading, WidthFollowsAnalyticLaw) {
  auto p = test::particles(1);
  p[0].mass = 2.0;
  const ConfigGrid g = ConfigGrid::uniform(p, 1, 1024, 0.05);
  const double s0 = 1.0;
  const auto psi = test::gaussian(g, quant(1e-4), {0.0}, s0);
  EXPECT_NEAR(position_spread(psi, 0), s0, 1e-9);
  const EvolutionConfig cfg = config(GetParam(), 0.005);
  DiscreteWavefunction state = psi;
  for (int r = 1; r <= 4; ++r) {
    state = evolve(state, PotentialSpec::free_particle(), cfg, 400);
    const double t = r * 400 * cfg.dt;
    EXPECT_NEAR(position_spread(state, 0) / free_width(s0, 2.0, t), 1.0, 2e-3) << "t=" << t;
  }
}

TEST_P(FreeSpreading, NormDriftBelowTenToMinusTenPerThousandSteps) {
  const ConfigGrid g = line_grid(512, 0.1);
  const auto psi = test::gaussian(g, quant(1e-4), {-2.0}, 1.0, {1.5});
  const auto out = evolve(psi, PotentialSpec::free_particle(), config(GetParam(), 0.002), 1000);
  EXPECT_LT(std::abs(out.norm_squared() - psi.norm_squared()), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Schemes, FreeSpreading,
                         ::testing::Values(Scheme::SplitStepSpectral, Scheme::CrankNicolson));

TEST(Evolution, PacketCentroidMovesWithGroupVelocity) {
  const ConfigGrid g = line_grid(1024, 0.05);
  const double k0 = 2.0;
  const auto psi = test::gaussian(g, quant(1e-4), {-6.0}, 1.0, {k0});
  const auto out = evolve(psi, PotentialSpec::free_particle(), config(Scheme::SplitStepSpectral, 0.01), 300);
  const DensityTable d = project_density(out, 0);
  double mean = 0.0;
  for (std::size_t b = 0; b < d.density.size(); ++b) mean += d.probability(b) * g.position(0, b)[0];
  EXPECT_NEAR(mean, -6.0 + k0 * 3.0, 1e-6);
}

TEST(Evolution, HarmonicGroundStateIsStationary) {
  const double omega = 1.0;
  const ConfigGrid g = line_grid(256, 0.08);
  // Ground state exp(-m omega x^2 / 2), m = 1: Gaussian of width w with 1/(4 w^2) = omega/2.
  const auto psi = test::gaussian(g, quant(1e-4), {0.0}, std::sqrt(1.0 / (2.0 * omega)));
  const double period = 2.0 * std::numbers::pi / omega;
  const std::size_t steps = 4000;
  const auto out =
      evolve(psi, PotentialSpec::harmonic({omega}), config(Scheme::SplitStepSpectral, period / steps), steps);
  double drift = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    drift = std::max(drift, std::abs(std::norm(out.amplitudes()[i]) - std::norm(psi.amplitudes()[i])));
  EXPECT_LT(drift, 1e-8);
  EXPECT_NEAR(energy_expectation(psi, PotentialSpec::harmonic({omega}), Scheme::SplitStepSpectral), 0.5, 1e-9);
}

TEST(Evolution, EnergyIsConserved) {
  const ConfigGrid g = line_grid(256, 0.1);
  const auto pot = PotentialSpec::harmonic({0.5});
  const auto psi = test::gaussian(g, quant(1e-4), {2.0}, 0.8, {0.4});
  for (Scheme s : {Scheme::SplitStepSpectral, Scheme::CrankNicolson}) {
    const double e0 = energy_expectation(psi, pot, s);
    const auto out = evolve(psi, pot, config(s, 0.002), 2000);
    EXPECT_NEAR(energy_expectation(out, pot, s), e0, 1e-5 * std::abs(e0));
  }
}

TEST(Evolution, BackwardEvolutionUndoesForward) {
  const ConfigGrid g = ConfigGrid::uniform(test::particles(2), 1, 128, 0.25);
  const auto psi = test::gaussian(g, quant(1e-4), {-1.0, 1.0}, 0.8, {0.5, -0.3});
  for (Scheme s : {Scheme::SplitStepSpectral, Scheme::CrankNicolson}) {
    const auto cfg = config(s, 0.01);
    const auto back = evolve_backward(evolve(psi, PotentialSpec::harmonic({0.3}), cfg, 200),
                                      PotentialSpec::harmonic({0.3}), cfg, 200);
    double err = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) err = std::max(err, std::abs(back.amplitudes()[i] - psi.amplitudes()[i]));
    EXPECT_LT(err, 1e-10);
  }
}

TEST(Evolution, SchemesAgreeOnFinelyResolvedPacket) {
  const ConfigGrid g = line_grid(1024, 0.04);
  const auto psi = test::gaussian(g, quant(1e-4), {0.0}, 1.0, {0.5});
  const auto a = evolve(psi, PotentialSpec::free_particle(), config(Scheme::SplitStepSpectral, 0.004), 500);
  const auto b = evolve(psi, PotentialSpec::free_particle(), config(Scheme::CrankNicolson, 0.004), 500);
  EXPECT_NEAR(position_spread(a, 0), position_spread(b, 0), 1e-3);
}

TEST(Evolution, GuardBandOverflowIsReported) {
  const ConfigGrid g = line_grid(64, 0.25);
  const auto psi = test::gaussian(g, quant(0.01), {0.0}, 0.5);
  try {
    evolve(psi, PotentialSpec::free_particle(), config(Scheme::SplitStepSpectral, 0.01), 5000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridOverflow);
  }
  EvolutionConfig periodic = config(Scheme::SplitStepSpectral, 0.01);
  periodic.boundary = BoundaryPolicy::Periodic;
  EXPECT_NO_THROW(evolve(psi, PotentialSpec::free_particle(), periodic, 5000));
}

TEST(Evolution, ConfigValidation) {
  EvolutionConfig c;
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = EvolutionConfig{};
  c.scheme = Scheme::CrankNicolson;
  c.boundary = BoundaryPolicy::Periodic;
  EXPECT_THROW(c.validate(), Error);
  c = EvolutionConfig{};
  c.boundary_guard_cells = 1;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Evolution, StrictModeKeepsStateQuantized) {
  QuantizationParams q = quant(0.01);
  q.quantize_during_evolution = true;
  const ConfigGrid g = line_grid(256, 0.25);
  const auto psi = quantize(test::gaussian(g, q, {0.0}, 1.0));
  const auto out = evolve(psi, PotentialSpec::free_particle(), config(Scheme::SplitStepSpectral, 0.01), 20);
  EXPECT_TRUE(out.is_quantized());
  EXPECT_NEAR(out.norm_squared(), 1.0, 1e-12);
}

TEST(Evolution, PairGaussianWellBindsOnlyListedPairs) {
  const ConfigGrid g = ConfigGrid::uniform(test::particles(3), 1, 8, 1.0);
  const auto v = potential_on_grid(PotentialSpec::pair_gaussian_well(2.0, 1.0, {{0, 1}}), g);
  const std::size_t same01[] = {3, 3, 0}, same12[] = {0, 5, 5};
  EXPECT_DOUBLE_EQ(v[g.compose(same01)], -2.0);
  EXPECT_NEAR(v[g.compose(same12)], -2.0 * std::exp(-0.5 * 25.0), 1e-15);
}

TEST(Spreading, StopsAtTargetVolume) {
  const ConfigGrid g = line_grid(512, 0.25);
  const auto q = quant(0.01);
  const auto psi = test::gaussian(g, q, {0.0}, 1.0);
  const std::size_t v0 = relative_volume(quantize(psi));
  const auto r = spread_until_volume(psi, PotentialSpec::free_particle(), config(Scheme::SplitStepSpectral, 0.01),
                                     2 * v0, q);
  EXPECT_GE(r.trace.back().relative_volume, 2 * v0);
  EXPECT_GT(r.elapsed, 0.0);
  for (std::size_t i = 1; i + 1 < r.trace.size(); ++i) EXPECT_LT(r.trace[i].relative_volume, 2 * v0);
  std::ostringstream csv;
  write_volume_trace_csv(csv, r.trace);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "time,relative_volume,max_cell_magnitude_over_f0");
}

TEST(Spreading, BoundStateStalls) {
  const ConfigGrid g = line_grid(128, 0.1);
  const auto q = quant(0.01);
  const auto psi = test::gaussian(g, q, {0.0}, std::sqrt(0.5));
  SpreadOptions opt;
  opt.patience_reports = 10;
  try {
    spread_until_volume(psi, PotentialSpec::harmonic({1.0}), config(Scheme::SplitStepSpectral, 0.01),
                        10 * relative_volume(quantize(psi)), q, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Stalled);
  }
}

TEST(Spreading, RejectsTargetAlreadyReached) {
  const ConfigGrid g = line_grid(128, 0.25);
  const auto psi = test::gaussian(g, quant(0.01), {0.0}, 1.0);
  EXPECT_THROW(spread_until_volume(psi, PotentialSpec::free_particle(), EvolutionConfig{}, 2, quant(0.01)), Error);
}

}  // namespace
}  // namespace ccqm
