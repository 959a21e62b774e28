#include "ccqm/ensemble.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ccqm/error.hpp"

namespace ccqm {

void MergeRule::validate() const {
  if (!(coupling_scale > 0.0) || !std::isfinite(coupling_scale)) throw_config("merge coupling kappa must be positive");
  if (!(pair_range > 0.0)) throw_config("merge pair_range must be positive");
  if (max_cells == 0) throw_config("merge max_cells must be positive");
}

void SplitRule::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw_config("split threshold eta must lie strictly between 0 and 1");
  if (max_partitions_examined == 0) throw_config("max_partitions_examined must be positive");
}

namespace {

void require_same_geometry(const ConfigGrid& a, const ConfigGrid& b) {
  if (!a.same_position_geometry(b))
    throw_config("interaction strength needs wavefunctions on a shared position-space grid");
}

double expected_separation(const ConfigGrid& grid, const DensityTable& gi, const DensityTable& gj) {
  const int dims = grid.spatial_dims();
  double s = 0.0;
  for (std::size_t x = 0; x < gi.density.size(); ++x) {
    const double px = gi.probability(x);
    if (px == 0.0) continue;
    const Position a = grid.position(0, x);
    for (std::size_t y = 0; y < gj.density.size(); ++y) {
      const double py = gj.probability(y);
      if (py == 0.0) continue;
      const Position b = grid.position(0, y);
      double r2 = 0.0;
      for (int d = 0; d < dims; ++d) r2 += (a[d] - b[d]) * (a[d] - b[d]);
      s += px * py * std::sqrt(r2);
    }
  }
  return s / (gi.total_probability() * gj.total_probability());
}

}  // namespace

double interaction_strength(const DiscreteWavefunction& a, const DiscreteWavefunction& b, const MergeRule& rule) {
  rule.validate();
  require_same_geometry(a.grid(), b.grid());
  std::vector<DensityTable> da, db;
  for (std::size_t i = 0; i < a.grid().num_particles(); ++i) da.push_back(project_density(a, i));
  for (std::size_t j = 0; j < b.grid().num_particles(); ++j) db.push_back(project_density(b, j));

  double total = 0.0;
  for (const auto& gi : da)
    for (const auto& gj : db) {
      double overlap = 0.0;
      for (std::size_t x = 0; x < gi.density.size(); ++x) overlap += gi.density[x] * gj.density[x];
      overlap *= gi.cell_measure();
      if (overlap == 0.0) continue;
      if (rule.model == InteractionModel::PotentialWeightedOverlap) {
        const double r = expected_separation(a.grid(), gi, gj);
        overlap *= std::abs(rule.pair_depth) * std::exp(-r * r / (2.0 * rule.pair_range * rule.pair_range));
      }
      total += overlap;
    }
  return total;
}

double merge_probability(double strength, double dt, const MergeRule& rule) {
  rule.validate();
  if (!(dt > 0.0)) throw_config("merge dt must be positive");
  if (!(strength >= 0.0)) throw_config("interaction strength must be non-negative");
  return -std::expm1(-rule.coupling_scale * strength * dt);
}

DiscreteWavefunction merge(const DiscreteWavefunction& a, const DiscreteWavefunction& b, std::size_t max_cells) {
  for (const auto& p : a.grid().particles())
    for (const auto& q : b.grid().particles())
      if (p.label == q.label)
        throw_config("merge: particle label " + std::to_string(p.label) + " appears in both wavefunctions");
  if (a.size() > max_cells / std::max<std::size_t>(1, b.size()))
    throw Error(ErrorCode::MemoryBudget, "memory budget: merged grid of " + std::to_string(a.size()) + " x " +
                                             std::to_string(b.size()) + " cells exceeds " +
                                             std::to_string(max_cells));
  return symmetrize(tensor_product(a, b));
}

namespace {

struct Unfolding {
  Eigen::MatrixXcd matrix;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

Unfolding unfold(const DiscreteWavefunction& psi, const Bipartition& part) {
  const ConfigGrid& grid = psi.grid();
  Unfolding u;
  u.rows = 1;
  u.cols = 1;
  for (std::size_t k : part.part_a) u.rows *= grid.cells_per_particle(k);
  for (std::size_t k : part.part_b) u.cols *= grid.cells_per_particle(k);
  u.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(u.rows), static_cast<Eigen::Index>(u.cols));
  std::vector<std::size_t> blocks(grid.num_particles());
  const auto amps = psi.amplitudes();
  for (std::size_t cell = 0; cell < amps.size(); ++cell) {
    grid.decompose(cell, blocks);
    std::size_t r = 0, c = 0;
    for (std::size_t k : part.part_a) r = r * grid.cells_per_particle(k) + blocks[k];
    for (std::size_t k : part.part_b) c = c * grid.cells_per_particle(k) + blocks[k];
    u.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = amps[cell];
  }
  return u;
}

void check_partition(const ConfigGrid& grid, const Bipartition& part) {
  std::vector<bool> seen(grid.num_particles(), false);
  for (const auto* side : {&part.part_a, &part.part_b}) {
    if (side->empty()) throw_config("bipartition sides must be non-empty");
    for (std::size_t k : *side) {
      if (k >= grid.num_particles() || seen[k]) throw_config("bipartition must partition the particles");
      seen[k] = true;
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw_config("bipartition must cover every particle");
}

std::vector<Bipartition> enumerate_bipartitions(std::size_t n, std::size_t limit) {
  std::vector<Bipartition> out;
  std::vector<std::uint64_t> masks;
  for (std::size_t cut = 1; cut < n; ++cut) masks.push_back((std::uint64_t{1} << cut) - 1);
  for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << n); ++m) {
    if (!(m & 1)) continue;
    if (std::find(masks.begin(), masks.end(), m) == masks.end()) masks.push_back(m);
  }
  for (std::uint64_t m : masks) {
    if (out.size() >= limit) break;
    Bipartition p;
    for (std::size_t k = 0; k < n; ++k) ((m >> k) & 1 ? p.part_a : p.part_b).push_back(k);
    out.push_back(std::move(p));
  }
  return out;
}

// Rotates v so that its largest-magnitude element is real and positive.
void fix_phase(Eigen::VectorXcd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  const double m = std::abs(v[best]);
  if (m > 0.0) v *= std::conj(v[best]) / m;
}

}  // namespace

double schmidt_weight(const DiscreteWavefunction& psi, const Bipartition& partition) {
  check_partition(psi.grid(), partition);
  const Unfolding u = unfold(psi, partition);
  const double n2 = psi.norm_squared();
  if (!(n2 > 0.0)) throw Error(ErrorCode::ZeroWavefunction, "Schmidt weight of a zero state");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(u.matrix);
  const double s = svd.singularValues()(0);
  return s * s / n2;
}

std::vector<SplitCandidate> split_candidates(const DiscreteWavefunction& psi, const SplitRule& rule) {
  rule.validate();
  const std::size_t n = psi.grid().num_particles();
  if (n < 2) throw_config("split candidates need at least two particles");
  if (n > 20) throw_config("split candidates support at most 20 particles");
  std::vector<SplitCandidate> out;
  for (auto& part : enumerate_bipartitions(n, rule.max_partitions_examined)) {
    SplitCandidate c;
    c.score = schmidt_weight(psi, part);
    c.qualifies = c.score >= 1.0 - rule.eta;
    c.partition = std::move(part);
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SplitCandidate& x, const SplitCandidate& y) { return x.score > y.score; });
  return out;
}

SplitOutcome split(const DiscreteWavefunction& psi, const Bipartition& partition, const SplitRule& rule,
                   double time) {
  rule.validate();
  const ConfigGrid& grid = psi.grid();
  check_partition(grid, partition);
  const Unfolding u = unfold(psi, partition);
  const double n2 = psi.norm_squared();
  if (!(n2 > 0.0)) throw Error(ErrorCode::ZeroWavefunction, "cannot split a zero state");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(u.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double s = svd.singularValues()(0);
  const double weight = s * s / n2;
  if (weight < 1.0 - rule.eta)
    throw Error(ErrorCode::SplitRefused, "split refused: Schmidt weight " + std::to_string(weight) +
                                             " is below 1 - eta = " + std::to_string(1.0 - rule.eta));

  // psi ~ s * U(:,0) * V(:,0)^H, so factor B is conj(V(:,0)).
  Eigen::VectorXcd left = svd.matrixU().col(0);
  Eigen::VectorXcd right = svd.matrixV().col(0).conjugate();
  fix_phase(left);
  fix_phase(right);

  const QuantizationParams& q = psi.quant();
  ConfigGrid grid_a = grid.subset(partition.part_a);
  ConfigGrid grid_b = grid.subset(partition.part_b);
  std::vector<cplx> amps_a(left.data(), left.data() + left.size());
  std::vector<cplx> amps_b(right.data(), right.data() + right.size());

  SplitOutcome out;
  out.a = quantize(grid_a, amps_a, q);
  out.b = quantize(grid_b, amps_b, q);
  out.fidelity = weight;
  CollapseEvent& e = out.event;
  e.time = time;
  e.kind = EventKind::Split;
  e.v_pre = psi.is_quantized() ? relative_volume(psi) : relative_volume(quantize(psi));
  e.v_post = relative_volume(out.a) * relative_volume(out.b);
  e.fidelity = weight;
  for (const auto& p : grid.particles()) e.labels.push_back(p.label);
  return out;
}

}  // namespace ccqm
