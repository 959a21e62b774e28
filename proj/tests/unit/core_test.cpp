// Grid indexing, quantization, kernels (parallel vs serial reference), RNG and snapshots.

#include <gtest/gtest.h>
#include <omp.h>

#include <numbers>
#include <set>
#include <sstream>

#include "ccqm/csv.hpp"
#include "ccqm/error.hpp"
#include "ccqm/kernels.hpp"
#include "ccqm/reference.hpp"
#include "ccqm/snapshot.hpp"
#include "helpers.hpp"

namespace ccqm {
namespace {

using test::line_grid;
using test::quant;

TEST(Grid, ComposeDecomposeRoundTrip) {
  const ConfigGrid g(test::particles(3), 2, {4, 5, 3, 2, 6, 3}, {0.5, 1.0, 0.25});
  EXPECT_EQ(g.total_cells(), 4u * 5 * 3 * 2 * 6 * 3);
  std::vector<std::size_t> blocks(3);
  for (std::size_t cell = 0; cell < g.total_cells(); cell += 7) {
    g.decompose(cell, blocks);
    EXPECT_EQ(g.compose(blocks), cell);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(g.block_index(cell, k), blocks[k]);
  }
}

TEST(Grid, PositionsAreCentredAndNearestBlockInverts) {
  const ConfigGrid g = line_grid(16, 0.5);
  EXPECT_DOUBLE_EQ(g.position(0, 8)[0], 0.0);
  EXPECT_DOUBLE_EQ(g.position(0, 0)[0], -4.0);
  for (std::size_t b = 0; b < 16; ++b) EXPECT_EQ(g.nearest_block(0, g.position(0, b)), b);
  EXPECT_EQ(g.nearest_block(0, Position{100.0, 0, 0}), 15u);
}

TEST(Grid, IdenticalGroupsNeedSameSpeciesAndQuantumStatistics) {
  auto p = test::particles(4, Statistics::Boson);
  p[2].species_id = "q";
  p[3].species_id = "r";
  const ConfigGrid g = ConfigGrid::uniform(p, 1, 8, 1.0);
  const auto groups = g.identical_groups();
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0], (std::vector<std::size_t>{0, 1}));
}

TEST(Grid, SubsetAndConcatenateAreInverse) {
  const ConfigGrid g(test::particles(3), 1, {8, 6, 4}, {1.0, 0.5, 0.25});
  const std::vector<std::size_t> left = {0}, right = {1, 2};
  EXPECT_EQ(ConfigGrid::concatenate(g.subset(left), g.subset(right)), g);
}

TEST(Quantization, RejectsBadParameters) {
  EXPECT_THROW(quant(0.0).validate(), Error);
  EXPECT_THROW(quant(0.01, 3).validate(), Error);
  EXPECT_NO_THROW(quant(0.01, 4).validate());
}

TEST(Quantization, LatticeIsExactAndNormalized) {
  const ConfigGrid g = line_grid(256, 0.25);
  const auto psi = quantize(test::gaussian(g, quant(0.01), {0.0}, 2.0, {0.7}));
  ASSERT_TRUE(psi.is_quantized());
  EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-12);
  const double theta0 = psi.quant().theta0();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto nf = psi.magnitude_levels()[i];
    const cplx expect = psi.level_scale() * nf * 0.01 * std::polar(1.0, psi.phase_levels()[i] * theta0);
    EXPECT_NEAR(std::abs(psi.amplitudes()[i] - expect), 0.0, 1e-15);
    if (nf == 0) EXPECT_EQ(psi.amplitudes()[i], cplx(0.0, 0.0));
  }
}

TEST(Quantization, IsIdempotent) {
  const ConfigGrid g = line_grid(128, 0.25);
  const auto once = quantize(test::random_state(g, quant(0.02), 11, 3.0));
  const auto twice = quantize(once);
  EXPECT_EQ(relative_volume(once), relative_volume(twice));
  for (std::size_t i = 0; i < once.size(); ++i) {
    EXPECT_EQ(once.magnitude_levels()[i], twice.magnitude_levels()[i]);
    EXPECT_EQ(once.phase_levels()[i], twice.phase_levels()[i]);
  }
}

TEST(Quantization, RelativeVolumeCountsCellsAtOrAboveHalfQuantum) {
  const ConfigGrid g = line_grid(64, 1.0);
  std::vector<cplx> c(64, 0.0);
  c[10] = 0.5;    // rounds to 50 quanta
  c[11] = 0.005;  // exactly half a quantum: ties up
  c[12] = 0.0049; // below half a quantum
  const auto psi = quantize(g, c, quant(0.01));
  EXPECT_EQ(relative_volume(psi), 2u);
  EXPECT_EQ(psi.magnitude_levels()[10], 50u);
  EXPECT_EQ(psi.magnitude_levels()[11], 1u);
  EXPECT_EQ(psi.magnitude_levels()[12], 0u);
}

TEST(Quantization, EverythingBelowHalfQuantumVanishes) {
  const ConfigGrid g = line_grid(16, 1.0);
  std::vector<cplx> c(16, cplx(0.25, 0.0));
  try {
    quantize(g, c, quant(0.6));
    FAIL() << "expected a vanishing wavefunction";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::VanishingWavefunction);
  }
}

TEST(Quantization, NegationShiftsPhaseByExactlyHalfTurn) {
  Rng rng(3);
  for (int i = 0; i < 20000; ++i) {
    const cplx z(rng.normal(), rng.normal());
    for (std::uint32_t m : {4u, 16u, 64u}) {
      const auto a = nearest_phase_level(z, m), b = nearest_phase_level(-z, m);
      ASSERT_EQ((a + m / 2) % m, b) << z;
    }
  }
}

TEST(Quantization, PhaseRoundingIsNearest) {
  Rng rng(5);
  const std::uint32_t m = 16;
  const double theta0 = 2.0 * std::numbers::pi / m;
  for (int i = 0; i < 5000; ++i) {
    const cplx z(rng.normal(), rng.normal());
    const double err = std::abs(std::arg(z * std::polar(1.0, -theta0 * nearest_phase_level(z, m))));
    EXPECT_LE(err, theta0 / 2 + 1e-12);
  }
}

class KernelAgreement : public ::testing::Test {
 protected:
  ConfigGrid grid = ConfigGrid::uniform(test::particles(2, Statistics::Boson), 1, 96, 0.3);
  std::vector<cplx> a = [this] {
    Rng rng(17);
    std::vector<cplx> v(grid.total_cells());
    for (auto& z : v) z = cplx(rng.normal(), rng.normal()) * 0.01;
    return v;
  }();
};

TEST_F(KernelAgreement, QuantizeCellsBitIdentical) {
  std::vector<std::uint32_t> nf1(a.size()), nt1(a.size()), nf2(a.size()), nt2(a.size());
  kernels::quantize_cells(a, 0.004, 16, nf1, nt1);
  reference::quantize_cells(a, 0.004, 16, nf2, nt2);
  EXPECT_EQ(nf1, nf2);
  EXPECT_EQ(nt1, nt2);
  const auto m1 = kernels::level_moments(nf1), m2 = reference::level_moments(nf2);
  EXPECT_EQ(m1.support, m2.support);
  EXPECT_EQ(m1.sum_sq, m2.sum_sq);
  EXPECT_EQ(m1.max_level, m2.max_level);
  std::vector<cplx> r1(a.size()), r2(a.size());
  kernels::reconstruct_levels(nf1, nt1, 0.004, 16, 1.3, r1);
  reference::reconstruct_levels(nf2, nt2, 0.004, 16, 1.3, r2);
  EXPECT_EQ(r1, r2);
}

TEST_F(KernelAgreement, Reductions) {
  EXPECT_NEAR(kernels::norm_squared(a), reference::norm_squared(a), 1e-12 * reference::norm_squared(a));
  EXPECT_EQ(kernels::max_abs(a), reference::max_abs(a));
}

TEST_F(KernelAgreement, ElementwiseProducts) {
  std::vector<double> f(a.size());
  std::vector<cplx> fc(a.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = std::cos(0.01 * static_cast<double>(i));
    fc[i] = std::polar(1.0, 0.02 * static_cast<double>(i));
  }
  auto x = a, y = a;
  kernels::multiply(x, std::span<const double>(f));
  reference::multiply(y, std::span<const double>(f));
  EXPECT_EQ(x, y);
  kernels::multiply(x, std::span<const cplx>(fc));
  reference::multiply(y, std::span<const cplx>(fc));
  EXPECT_EQ(x, y);
  kernels::scale(x, 0.7);
  reference::scale(y, 0.7);
  EXPECT_EQ(x, y);
  std::vector<double> block(grid.cells_per_particle(1));
  for (std::size_t b = 0; b < block.size(); ++b) block[b] = 1.0 / (1.0 + b);
  kernels::multiply_particle_factor(grid, 1, block, x);
  reference::multiply_particle_factor(grid, 1, block, y);
  EXPECT_EQ(x, y);
}

TEST_F(KernelAgreement, MarginalsAndFields) {
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<double> m1(grid.cells_per_particle(k)), m2(m1.size());
    kernels::marginal_probability(grid, a, k, m1);
    reference::marginal_probability(grid, a, k, m2);
    for (std::size_t b = 0; b < m1.size(); ++b) EXPECT_NEAR(m1[b], m2[b], 1e-14);
  }
  const std::vector<std::size_t> centre = {40, 55};
  std::vector<double> g1(a.size()), g2(a.size());
  kernels::gaussian_product_field(grid, centre, 0.8, g1);
  reference::gaussian_product_field(grid, centre, 0.8, g2);
  for (std::size_t i = 0; i < g1.size(); ++i) EXPECT_NEAR(g1[i], g2[i], 1e-15);
}

TEST_F(KernelAgreement, Symmetrizers) {
  for (bool anti : {false, true}) {
    const auto perms = group_permutations(2, {{0, 1}}, {anti});
    std::vector<cplx> s1(a.size()), s2(a.size());
    kernels::symmetrize(grid, perms, std::span<const cplx>(a), std::span<cplx>(s1));
    reference::symmetrize(grid, perms, std::span<const cplx>(a), std::span<cplx>(s2));
    EXPECT_EQ(s1, s2);
  }
}

TEST_F(KernelAgreement, ReductionsDoNotDependOnThreadCount) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = kernels::norm_squared(a);
  std::vector<double> m1(grid.cells_per_particle(0));
  kernels::marginal_probability(grid, a, 0, m1);
  omp_set_num_threads(4);
  const double four = kernels::norm_squared(a);
  std::vector<double> m4(m1.size());
  kernels::marginal_probability(grid, a, 0, m4);
  omp_set_num_threads(saved);
  EXPECT_EQ(one, four);
  EXPECT_EQ(m1, m4);
}

TEST(GroupPermutations, CountsAndSigns) {
  const auto p = group_permutations(4, {{0, 1, 2}}, {true});
  ASSERT_EQ(p.size(), 6u);
  int odd = 0;
  for (const auto& s : p) odd += s.sign < 0;
  EXPECT_EQ(odd, 3);
  EXPECT_EQ(group_permutations(4, {{0, 1}, {2, 3}}, {false, true}).size(), 4u);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(a.draws(), 1000u);
}

TEST(Rng, UniformRangeAndDerivedSeedsDiffer) {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  std::set<std::uint64_t> seeds;
  for (std::uint64_t t = 0; t < 1000; ++t) seeds.insert(derive_seed(7, t));
  EXPECT_EQ(seeds.size(), 1000u);
}

TEST(Rng, UniformIndexIsUnbiased) {
  Rng r(9);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[r.uniform_index(7)];
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5.0 * std::sqrt(n / 7.0));
}

TEST(Rng, NormalMoments) {
  Rng r(13);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Csv, FormatDoubleRoundTrips) {
  Rng r(2);
  for (int i = 0; i < 2000; ++i) {
    const double x = (r.uniform() - 0.5) * std::pow(10.0, static_cast<double>(r.uniform_index(40)) - 20.0);
    ASSERT_EQ(parse_double(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_THROW(parse_double("abc"), Error);
}

TEST(Snapshot, QuantizedRoundTripIsExact) {
  auto p = test::particles(2, Statistics::Fermion, 5);
  p[0].species_id = p[1].species_id = "e";
  const ConfigGrid g = ConfigGrid::uniform(p, 1, 32, 0.5);
  const auto psi = symmetrize(test::random_state(g, quant(0.01), 4, 3.0));
  std::stringstream ss;
  write_snapshot(ss, psi, 99);
  const Snapshot back = read_snapshot(ss);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.wavefunction.grid(), psi.grid());
  EXPECT_EQ(back.wavefunction.quant(), psi.quant());
  ASSERT_TRUE(back.wavefunction.is_quantized());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    EXPECT_EQ(back.wavefunction.magnitude_levels()[i], psi.magnitude_levels()[i]);
    EXPECT_EQ(back.wavefunction.phase_levels()[i], psi.phase_levels()[i]);
    EXPECT_EQ(back.wavefunction.amplitudes()[i], psi.amplitudes()[i]);
  }
  std::stringstream again;
  write_snapshot(again, back.wavefunction, 99);
  std::stringstream first;
  write_snapshot(first, psi, 99);
  EXPECT_EQ(again.str(), first.str());
}

TEST(Snapshot, ContinuousRoundTripIsExact) {
  const ConfigGrid g = line_grid(40, 0.5);
  const auto psi = test::gaussian(g, quant(0.01), {1.0}, 1.5, {0.3});
  std::stringstream ss;
  write_snapshot(ss, psi, 1);
  const Snapshot back = read_snapshot(ss);
  EXPECT_FALSE(back.wavefunction.is_quantized());
  for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_EQ(back.wavefunction.amplitudes()[i], psi.amplitudes()[i]);
}

TEST(Snapshot, MalformedInputIsRejected) {
  std::stringstream bad("format ccqm-snapshot 99\n");
  try {
    read_snapshot(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidFormat);
  }
  const ConfigGrid g = line_grid(16, 0.5);
  std::stringstream ss;
  write_snapshot(ss, test::gaussian(g, quant(0.01), {0.0}, 1.0), 1);
  std::string text = ss.str();
  text.resize(text.size() / 2);
  std::stringstream truncated(text);
  EXPECT_THROW(read_snapshot(truncated), Error);
}

TEST(Errors, CategoriesMapToExitCodes) {
  EXPECT_EQ(exit_code_for(category_of(ErrorCode::InvalidConfig)), 2);
  EXPECT_EQ(exit_code_for(category_of(ErrorCode::GridOverflow)), 3);
  EXPECT_EQ(exit_code_for(category_of(ErrorCode::Bracket)), 3);
  EXPECT_EQ(exit_code_for(category_of(ErrorCode::VanishingWavefunction)), 4);
  EXPECT_EQ(exit_code_for(category_of(ErrorCode::PauliExclusion)), 4);
}

}  // namespace
}  // namespace ccqm
