#include "ccqm/snapshot.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ccqm/csv.hpp"
#include "ccqm/error.hpp"

namespace ccqm {

namespace {

[[noreturn]] void bad_format(const std::string& what) {
  throw Error(ErrorCode::InvalidFormat, "snapshot: " + what);
}

std::string_view cell_mode_name(CellMode mode) {
  return mode == CellMode::Fixed ? "fixed" : "variable";
}

// Reads one line and splits it into whitespace-separated tokens; the first
// token must equal `key`.
std::vector<std::string> expect_line(std::istream& in, std::string_view key) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string t; ss >> t;) tokens.push_back(t);
    if (tokens.empty() || tokens[0] != key) bad_format("expected '" + std::string(key) + "'");
    return tokens;
  }
  bad_format("unexpected end of file, expected '" + std::string(key) + "'");
}

void require_count(const std::vector<std::string>& tokens, std::size_t n) {
  if (tokens.size() != n) bad_format("wrong field count on '" + tokens[0] + "' line");
}

}  // namespace

void write_snapshot(std::ostream& out, const DiscreteWavefunction& psi, std::uint64_t seed) {
  const ConfigGrid& grid = psi.grid();
  const QuantizationParams& q = psi.quant();
  out << "# ccqm wavefunction snapshot\n";
  out << "format ccqm-snapshot " << kSnapshotVersion << '\n';
  out << "particles " << grid.num_particles() << '\n';
  for (std::size_t k = 0; k < grid.num_particles(); ++k) {
    const ParticleMeta& p = grid.particle(k);
    if (p.species_id.empty() || p.species_id.find_first_of(" \t\r\n") != std::string::npos)
      throw Error(ErrorCode::InvalidFormat, "species ids must be non-empty and whitespace-free");
    out << "particle " << k << " label " << p.label << " species " << p.species_id
        << " statistics " << to_string(p.statistics) << " mass " << format_double(p.mass)
        << " debroglie " << format_double(p.mean_de_broglie_wavelength) << '\n';
  }
  out << "spatial_dims " << grid.spatial_dims() << '\n';
  out << "extents";
  for (std::size_t e : grid.extents()) out << ' ' << e;
  out << '\n' << "cell_lengths";
  for (double a : grid.cell_lengths()) out << ' ' << format_double(a);
  out << '\n';
  out << "f0 " << format_double(q.f0) << '\n';
  out << "phase_levels " << q.phase_levels << '\n';
  out << "theta0 " << format_double(q.theta0()) << '\n';
  out << "cell_mode " << cell_mode_name(q.cell_mode) << ' ' << format_double(q.cell_parameter) << '\n';
  out << "quantize_during_evolution " << (q.quantize_during_evolution ? 1 : 0) << '\n';
  out << "seed " << seed << '\n';
  out << "state " << (psi.is_quantized() ? "quantized" : "continuous") << '\n';
  out << "cells " << psi.size() << '\n';
  const auto amps = psi.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    out << format_double(amps[i].real()) << ' ' << format_double(amps[i].imag());
    if (psi.is_quantized())
      out << ' ' << psi.magnitude_levels()[i] << ' ' << psi.phase_levels()[i];
    out << '\n';
  }
  out << "end\n";
}

Snapshot read_snapshot(std::istream& in) {
  auto t = expect_line(in, "format");
  require_count(t, 3);
  if (t[1] != "ccqm-snapshot") bad_format("not a ccqm snapshot");
  if (parse_u64(t[2]) != static_cast<std::uint64_t>(kSnapshotVersion))
    bad_format("unsupported snapshot version " + t[2]);

  t = expect_line(in, "particles");
  require_count(t, 2);
  const std::size_t n = parse_u64(t[1]);
  std::vector<ParticleMeta> particles(n);
  for (std::size_t k = 0; k < n; ++k) {
    t = expect_line(in, "particle");
    require_count(t, 12);
    if (parse_u64(t[1]) != k || t[2] != "label" || t[4] != "species" || t[6] != "statistics" ||
        t[8] != "mass" || t[10] != "debroglie")
      bad_format("malformed particle line");
    particles[k].label = parse_u64(t[3]);
    particles[k].species_id = t[5];
    particles[k].statistics = statistics_from_string(t[7]);
    particles[k].mass = parse_double(t[9]);
    particles[k].mean_de_broglie_wavelength = parse_double(t[11]);
  }

  t = expect_line(in, "spatial_dims");
  require_count(t, 2);
  const int dims = static_cast<int>(parse_u64(t[1]));
  t = expect_line(in, "extents");
  std::vector<std::size_t> extents;
  for (std::size_t i = 1; i < t.size(); ++i) extents.push_back(parse_u64(t[i]));
  t = expect_line(in, "cell_lengths");
  std::vector<double> lengths;
  for (std::size_t i = 1; i < t.size(); ++i) lengths.push_back(parse_double(t[i]));

  QuantizationParams q;
  t = expect_line(in, "f0");
  require_count(t, 2);
  q.f0 = parse_double(t[1]);
  t = expect_line(in, "phase_levels");
  require_count(t, 2);
  q.phase_levels = static_cast<std::uint32_t>(parse_u64(t[1]));
  expect_line(in, "theta0");  // derived from phase_levels
  t = expect_line(in, "cell_mode");
  require_count(t, 3);
  if (t[1] == "fixed") q.cell_mode = CellMode::Fixed;
  else if (t[1] == "variable") q.cell_mode = CellMode::Variable;
  else bad_format("unknown cell_mode '" + t[1] + "'");
  q.cell_parameter = parse_double(t[2]);
  t = expect_line(in, "quantize_during_evolution");
  require_count(t, 2);
  q.quantize_during_evolution = parse_u64(t[1]) != 0;

  t = expect_line(in, "seed");
  require_count(t, 2);
  const std::uint64_t seed = parse_u64(t[1]);
  t = expect_line(in, "state");
  require_count(t, 2);
  const bool quantized = t[1] == "quantized";
  if (!quantized && t[1] != "continuous") bad_format("unknown state '" + t[1] + "'");
  t = expect_line(in, "cells");
  require_count(t, 2);
  const std::size_t cells = parse_u64(t[1]);

  ConfigGrid grid(std::move(particles), dims, std::move(extents), std::move(lengths));
  if (grid.total_cells() != cells) bad_format("cell count does not match extents");

  std::vector<cplx> amps(cells);
  std::vector<std::uint32_t> levels(quantized ? cells : 0);
  std::vector<std::uint32_t> phases(quantized ? cells : 0);
  std::string line;
  for (std::size_t i = 0; i < cells; ++i) {
    if (!std::getline(in, line)) bad_format("truncated amplitude list");
    std::istringstream ss(line);
    std::string re, im, nf, nt;
    ss >> re >> im;
    amps[i] = {parse_double(re), parse_double(im)};
    if (quantized) {
      ss >> nf >> nt;
      levels[i] = static_cast<std::uint32_t>(parse_u64(nf));
      phases[i] = static_cast<std::uint32_t>(parse_u64(nt));
    }
  }
  expect_line(in, "end");

  if (quantized)
    return {DiscreteWavefunction::from_levels(std::move(grid), std::move(levels), std::move(phases), q),
            seed};
  return {DiscreteWavefunction(std::move(grid), std::move(amps), q), seed};
}

void save_snapshot(const std::filesystem::path& path, const DiscreteWavefunction& psi,
                   std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write snapshot " + path.string());
  write_snapshot(out, psi, seed);
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidFormat, "cannot open snapshot " + path.string());
  return read_snapshot(in);
}

}  // namespace ccqm
