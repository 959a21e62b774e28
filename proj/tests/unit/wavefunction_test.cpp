#include <gtest/gtest.h>

#include <numbers>

#include "ccqm/error.hpp"
#include "helpers.hpp"

namespace ccqm {
namespace {

using test::line_grid;
using test::quant;

// Uniform (box) state on `width` consecutive cells starting at `first`.
DiscreteWavefunction box(const ConfigGrid& grid, std::size_t first, std::size_t width, const QuantizationParams& q) {
  std::vector<cplx> c(grid.total_cells(), 0.0);
  for (std::size_t i = first; i < first + width; ++i) c[i] = 1.0;
  return quantize(grid, c, q);
}

TEST(Wavefunction, MakeWavefunctionNormalizesCellAmplitudes) {
  const ConfigGrid g = line_grid(200, 0.1);
  const auto psi = test::gaussian(g, quant(0.01), {0.0}, 1.0);
  EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-14);
  // Density amplitude integrates to one: sum |psi|^2 a = 1.
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) s += std::norm(psi.density_amplitude(i)) * 0.1;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Wavefunction, NormalizeRejectsZero) {
  const ConfigGrid g = line_grid(16, 1.0);
  try {
    normalize(DiscreteWavefunction(g, std::vector<cplx>(16, 0.0), quant(0.1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroWavefunction);
  }
}

TEST(Wavefunction, ProjectedDensityMatchesGaussian) {
  const ConfigGrid g = line_grid(256, 0.1);
  const double w = 1.3;
  const auto psi = test::gaussian(g, quant(0.01), {0.5}, w);
  const DensityTable d = project_density(psi, 0);
  EXPECT_NEAR(d.total_probability(), 1.0, 1e-12);
  for (std::size_t b = 100; b < 160; b += 7) {
    const double x = g.position(0, b)[0];
    const double expect = std::exp(-(x - 0.5) * (x - 0.5) / (2 * w * w)) / std::sqrt(2 * std::numbers::pi * w * w);
    EXPECT_NEAR(d.density[b], expect, 1e-9);
  }
}

class Exchange : public ::testing::TestWithParam<Statistics> {};

TEST_P(Exchange, SymmetrizedStatesHaveExactExchangeSymmetry) {
  auto p = test::particles(2, GetParam());
  const ConfigGrid g = ConfigGrid::uniform(p, 1, 48, 0.4);
  const auto psi = symmetrize(test::random_state(g, quant(0.004), 21, 3.0));
  ASSERT_TRUE(psi.is_quantized());
  const auto swapped = exchange_particles(psi, 0, 1);
  const double sign = GetParam() == Statistics::Fermion ? -1.0 : 1.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    worst = std::max(worst, std::abs(swapped.amplitudes()[i] - sign * psi.amplitudes()[i]));
  EXPECT_LE(worst, 1e-15);
  if (GetParam() == Statistics::Fermion)
    for (std::size_t b = 0; b < 48; ++b) {
      const std::size_t diag[] = {b, b};
      EXPECT_EQ(psi.magnitude_levels()[g.compose(diag)], 0u);
    }
}

INSTANTIATE_TEST_SUITE_P(Statistics, Exchange, ::testing::Values(Statistics::Boson, Statistics::Fermion));

TEST(Wavefunction, PauliExclusionForIdenticalFermionsInOneState) {
  const ConfigGrid g = ConfigGrid::uniform(test::particles(2, Statistics::Fermion), 1, 32, 0.5);
  // A product psi(x1) psi(x2) antisymmetrizes to zero.
  const auto same = test::gaussian(g, quant(0.01), {0.0, 0.0}, 1.0);
  try {
    symmetrize(same);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PauliExclusion);
  }
}

TEST(Wavefunction, DistinguishableStateIsOnlyQuantizedBySymmetrize) {
  const ConfigGrid g = ConfigGrid::uniform(test::particles(2), 1, 32, 0.5);
  const auto raw = test::random_state(g, quant(0.01), 8, 2.0);
  const auto a = symmetrize(raw), b = quantize(raw);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.amplitudes()[i], b.amplitudes()[i]);
}

TEST(Wavefunction, TensorProductOfNormalizedStatesIsNormalized) {
  const ConfigGrid a = line_grid(40, 0.5, 1, Statistics::Distinguishable, 0);
  const ConfigGrid b = line_grid(30, 0.5, 1, Statistics::Distinguishable, 1);
  const auto pa = test::gaussian(a, quant(0.01), {1.0}, 1.0), pb = test::gaussian(b, quant(0.01), {-1.0}, 2.0);
  const auto ab = tensor_product(pa, pb);
  EXPECT_EQ(ab.grid().num_particles(), 2u);
  EXPECT_EQ(ab.size(), 1200u);
  EXPECT_NEAR(ab.norm_squared(), 1.0, 1e-13);
  const std::size_t blocks[] = {17, 9};
  EXPECT_EQ(ab.amplitudes()[ab.grid().compose(blocks)], pa.amplitudes()[17] * pb.amplitudes()[9]);
}

// Relative volume of a product of compact-support factors is the product of
// the factor volumes, as long as f0 resolves the smallest product amplitude.
TEST(Wavefunction, VolumeOfDistinguishableProductStates) {
  const std::size_t vs = 7;
  for (std::size_t n = 1; n <= 3; ++n) {
    const QuantizationParams q = quant(1e-4);
    DiscreteWavefunction psi = box(line_grid(24, 1.0, 1, Statistics::Distinguishable, 0), 5, vs, q);
    for (std::size_t k = 1; k < n; ++k)
      psi = quantize(tensor_product(psi, box(line_grid(24, 1.0, 1, Statistics::Distinguishable, k), 3 + k, vs, q)));
    EXPECT_EQ(relative_volume(psi), static_cast<std::size_t>(std::pow(vs, n))) << n;
  }
}

TEST(Wavefunction, PlaneWaveDeBroglieWavelength) {
  const ConfigGrid g = line_grid(512, 0.1);
  const double k0 = 4.0;
  const auto psi = test::gaussian(g, quant(0.01), {0.0}, 4.0, {k0});
  EXPECT_NEAR(mean_de_broglie_wavelength(psi, 0), 2.0 * std::numbers::pi / k0, 0.02);
}

TEST(Wavefunction, VariableCellLengthsFollowDeBroglieWavelength) {
  QuantizationParams q = quant(0.01);
  q.cell_mode = CellMode::Variable;
  q.cell_parameter = 0.1;
  auto p = test::particles(2);
  p[0].mean_de_broglie_wavelength = 2.0;
  p[1].mean_de_broglie_wavelength = 5.0;
  const auto lengths = resolve_cell_lengths(q, p);
  EXPECT_DOUBLE_EQ(lengths[0], 0.2);
  EXPECT_DOUBLE_EQ(lengths[1], 0.5);
  p[1].mean_de_broglie_wavelength = 0.0;
  EXPECT_THROW(resolve_cell_lengths(q, p), Error);
}

}  // namespace
}  // namespace ccqm
