#include <cmath>
#include <limits>

#include "ccqm/astro.hpp"
#include "ccqm/csv.hpp"
#include "ccqm/error.hpp"
#include "ccqm/report.hpp"
#include "commands.hpp"

namespace ccqm::cli {

namespace {

double positive(const Block& b, std::string_view base, Dimension dim, double fallback) {
  const double v = b.quantity(base, dim, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) throw_config("'" + std::string(base) + "' must be positive and finite");
  return v;
}

void write_report(RunContext& ctx, const std::string& name, ConstraintReport& report) {
  report.input("seed", std::to_string(ctx.seed()));
  report.input("config_hash", hex64(ctx.config_hash()));
  auto out = ctx.open(name);
  report.write_json(out);
}

}  // namespace

void cmd_starlight(const Config& config, RunContext& ctx) {
  namespace a = astro;
  const Block b = config.root();
  const double d = positive(b, "distance", Dimension::Length, 530.0 * a::kLightYear);
  const double dphi = positive(b, "resolution", Dimension::Angle, 9.7e-9);
  const double lambda = positive(b, "wavelength", Dimension::Length, 6e-7);
  const double t_tilde = b.number("t_tilde", 3e7);
  const double divergence = b.quantity("divergence", Dimension::Angle, 1e-5);
  const double path_1 = positive(b, "path_1", Dimension::Length, 1.2e6);
  const double path_2 = positive(b, "path_2", Dimension::Length, 1.2e6);
  const double reference_rc = positive(b, "reference_r_c", Dimension::Length, 544.0);
  const std::string cone = b.text("cone_convention", "full_angle");
  if (!(t_tilde > 0.0)) throw_config("t_tilde must be positive");
  if (!(divergence >= 0.0)) throw_config("divergence must be non-negative");
  if (cone != "full_angle" && cone != "half_angle") throw_config("cone_convention must be full_angle or half_angle");
  config.finish();

  ConstraintReport r("starlight");
  r.input("distance", d, "m");
  r.input("distance_ly", d / a::kLightYear, "ly");
  r.input("resolution", dphi, "rad");
  r.input("wavelength", lambda, "m");
  r.input("t_tilde", t_tilde, "1");
  r.input("divergence", divergence, "rad");
  r.input("path_1", path_1, "m");
  r.input("path_2", path_2, "m");
  r.input("reference_r_c", reference_rc, "m");
  r.input("cone_convention", cone);
  r.input("light_year", a::kLightYear, "m");

  const a::CollapseCount cc = a::max_collapse_count(d, dphi, lambda);
  const double thickness = t_tilde * lambda;
  const double rc = a::min_rc_from_resolution(d, cc.n);
  r.result("log10_rhs", cc.rhs, "1", "log10(pi d dphi / lambda)");
  r.result("n_max", static_cast<double>(cc.n), "1", "largest n with log10(n-1) + (n-5)/2 log10(2) <= rhs");
  r.result("thickness", thickness, "m", "t_tilde lambda");
  r.result("r_c", rc, "m", "d 2^((1-n)/2)");
  r.result("r_c_relative_to_reference", rc / reference_rc - 1.0, "1", "r_c / reference_r_c - 1");
  r.result("critical_volume", a::min_critical_volume(rc, thickness), "m3", "4 pi r_c^2 t");
  r.result("critical_volume_at_reference_r_c", a::min_critical_volume(reference_rc, thickness), "m3",
           "4 pi reference_r_c^2 t");
  if (cc.n >= 2) {
    r.result("deviation_at_n_max", a::deviation_for_count(cc.n, d, lambda), "rad",
             "(n-1) lambda 2^((n-5)/2) / (pi d)");
    r.result("deviation_at_n_max_plus_1", a::deviation_for_count(cc.n + 1, d, lambda), "rad",
             "(n-1) lambda 2^((n-5)/2) / (pi d)");
    r.result("deviation_small_angle", a::angular_deviation(cc.n, lambda, rc), "rad", "(n-1) lambda / (4 pi r_c)");
    r.result("deviation_exact_geometry", a::angular_deviation_exact(cc.n, lambda, rc), "rad",
             "sum_{m=2..n} lambda / (4 pi r_c sqrt(1 - 2^-(m+1)))");
    r.result("momentum_kick", a::momentum_kick(rc), "kg m/s", "h / (4 pi r_c)");
  } else {
    r.note("resolution too coarse for even two collapses; no kicks are constrained");
  }
  const a::CollapseCount half = a::max_collapse_count(d, 0.5 * dphi, lambda);
  r.result("n_max_at_half_resolution", static_cast<double>(half.n), "1", "n_max with dphi / 2");
  r.result("n_decreases_when_resolution_halved", half.n < cc.n ? 1.0 : 0.0, "bool",
           "n_max(dphi/2) < n_max(dphi)");
  const auto convention = cone == "full_angle" ? a::ConeConvention::FullAngle : a::ConeConvention::HalfAngle;
  r.result("teleportation_volume", a::teleportation_volume(divergence, path_1, path_2, convention), "m3",
           "sum over paths of (pi/3) R^2 L");
  write_report(ctx, "starlight_report.json", r);
}

void cmd_cmb(const Config& config, RunContext& ctx) {
  namespace a = astro;
  const Block b = config.root();
  const double temperature = positive(b, "temperature", Dimension::Temperature, a::kCmbTemperature);
  const double delta_limit = b.number("delta_limit", 1e-5);
  const double lambda = positive(b, "wavelength", Dimension::Length, 0.019);
  const double u = b.number("u", 0.282);
  const double t_tilde = b.number("t_tilde", 3e7);
  const double magnification = b.number("magnification", 5000.0);
  const Block sb = b.child("spectrum");
  const double nu_min = positive(sb, "nu_min", Dimension::Frequency, 1e8);
  const double nu_max = positive(sb, "nu_max", Dimension::Frequency, 1e12);
  const std::size_t points = sb.count("points", 1000);
  const bool override_vc = sb.has_quantity("critical_volume");
  const double vc_override = override_vc ? positive(sb, "critical_volume", Dimension::Volume, 1.0) : 0.0;
  const bool override_k = sb.has("k");
  const double k_override = sb.number("k", 0.0);
  std::vector<double> redshifts = b.numbers("redshifts", a::default_collapse_epochs());
  if (!(delta_limit > 0.0 && delta_limit < 1.0)) throw_config("delta_limit must lie in (0, 1)");
  if (!(u > 0.0)) throw_config("u must be positive");
  if (!(t_tilde > 0.0)) throw_config("t_tilde must be positive");
  if (!(magnification > 0.0)) throw_config("magnification must be positive");
  if (override_k && !(k_override >= 0.0)) throw_config("spectrum.k must be non-negative");
  config.finish();

  ConstraintReport r("cmb");
  r.input("temperature", temperature, "K");
  r.input("delta_limit", delta_limit, "1");
  r.input("wavelength", lambda, "m");
  r.input("u", u, "1");
  r.input("t_tilde", t_tilde, "1");
  r.input("magnification", magnification, "1");
  r.input("nu_min", nu_min, "Hz");
  r.input("nu_max", nu_max, "Hz");
  r.input("points", static_cast<double>(points), "1");
  r.input("redshift_count", static_cast<double>(redshifts.size()), "1");

  const a::CmbBound bound = a::min_vc_cmb(delta_limit, lambda, u, t_tilde);
  r.result("bracket_at_u", a::bracket(u), "1", "1 - 2 (e^u - 1) / (u e^u)");
  r.result("r_c", bound.r_c, "m", "lambda |bracket(u)| / (4 pi delta)");
  r.result("frequency_shift", a::collapse_frequency_shift(bound.r_c), "Hz", "c / (4 pi r_c)");
  r.result("critical_volume", bound.critical_volume, "m3", "4 pi r_c^2 t_tilde lambda");
  r.result("a_cubed_v_c", bound.a_cubed_v_c, "1", "V_c / lambda^3");
  r.result("k", bound.k, "1", "sqrt(t_tilde / (4 pi a^3 v_c))");
  r.result("delta_z_coefficient", bound.delta_z_coefficient, "m^(3/2)",
           "lambda^(3/2) / (4 pi) sqrt(4 pi t_tilde) bracket(u)");
  r.result("bracket_root_u", a::bracket_root(), "1", "bracket(u) = 0");
  r.result("number_density_peak_u", a::bracket_root(), "1", "argmax u^2 / (e^u - 1)");
  r.result("energy_density_peak_u", a::energy_density_peak_u(), "1", "argmax u^3 / (e^u - 1)");

  const a::RedshiftBound rz = a::redshift_summed_constraint(redshifts, delta_limit, bound.delta_z_coefficient);
  r.result("redshift_sum_inverse_cube", rz.sum_inverse_cube, "1", "sum (z+1)^-3");
  r.result("redshift_sum_inverse_three_halves", rz.sum_inverse_three_halves, "1", "sum (z+1)^-3/2");
  r.result("critical_volume_redshift_quadrature", rz.inverse_cube_form, "m3",
           "coefficient^2 / delta^2 sum (z+1)^-3");
  r.result("critical_volume_redshift_linear", rz.linear_sum_form, "m3",
           "coefficient^2 / delta^2 (sum (z+1)^-3/2)^2");
  const a::RedshiftBound today = a::redshift_summed_constraint({0.0}, delta_limit, bound.delta_z_coefficient);
  r.result("critical_volume_z0_only", today.inverse_cube_form, "m3", "coefficient^2 / delta^2");

  a::SpectrumModel model;
  model.temperature = temperature;
  model.t_tilde = t_tilde;
  model.critical_volume = override_vc ? vc_override : bound.critical_volume;
  model.k = override_k ? k_override : bound.k;
  r.input("spectrum_critical_volume", model.critical_volume, "m3");
  r.input("spectrum_k", model.k, "1");
  const auto rows = a::perturbed_spectrum(model, a::log_frequency_grid(nu_min, nu_max, points));
  r.note("spectrum.csv: N_fixed and N_variable are N + magnification (N_perturbed - N)");

  if (ctx.emits(Format::Csv)) {
    auto out = ctx.open("spectrum.csv");
    CsvWriter csv(out);
    csv.header({"nu_Hz", "u", "N", "N_fixed", "N_variable", "magnification"});
    for (const auto& row : rows)
      csv.field(row.nu)
          .field(row.u)
          .field(row.n)
          .field(row.n + magnification * (row.n_fixed - row.n))
          .field(row.n + magnification * (row.n_variable - row.n))
          .field(magnification)
          .end_row();
  }
  write_report(ctx, "cmb_report.json", r);
}

}  // namespace ccqm::cli
