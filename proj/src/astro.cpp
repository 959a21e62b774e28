#include "ccqm/astro.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ccqm/error.hpp"

namespace ccqm::astro {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw_config(std::string(what) + " must be positive and finite");
}

double solve_root(double (*f)(double), double lo, double hi) {
  boost::uintmax_t iterations = 200;
  const auto r = boost::math::tools::toms748_solve([f](double u) { return f(u); }, lo, hi,
                                                   boost::math::tools::eps_tolerance<double>(52), iterations);
  return 0.5 * (r.first + r.second);
}

}  // namespace

double first_collapse_radius(double critical_volume, double thickness) {
  require_positive(critical_volume, "critical volume");
  require_positive(thickness, "shell thickness");
  return std::sqrt(critical_volume / (4.0 * kPi * thickness));
}

double min_critical_volume(double r_c, double thickness) {
  require_positive(r_c, "r_c");
  require_positive(thickness, "shell thickness");
  return 4.0 * kPi * r_c * r_c * thickness;
}

double collapse_count_lhs(std::size_t n) {
  if (n < 2) throw_config("collapse count must be at least 2");
  const double nn = static_cast<double>(n);
  return std::log10(nn - 1.0) + 0.5 * (nn - 5.0) * std::log10(2.0);
}

double deviation_for_count(std::size_t n, double distance, double wavelength) {
  if (n < 1) throw_config("collapse count must be at least 1");
  require_positive(distance, "distance");
  require_positive(wavelength, "wavelength");
  const double nn = static_cast<double>(n);
  return (nn - 1.0) * wavelength * std::exp2(0.5 * (nn - 5.0)) / (kPi * distance);
}

CollapseCount max_collapse_count(double distance, double delta_phi, double wavelength) {
  require_positive(distance, "distance");
  require_positive(wavelength, "wavelength");
  if (!(delta_phi >= 0.0)) throw_config("angular resolution must be non-negative");
  CollapseCount out;
  out.rhs = std::log10(kPi * distance * delta_phi / wavelength);
  if (!(collapse_count_lhs(2) <= out.rhs)) return out;
  out.kicks_permitted = true;
  std::size_t n = 2;
  // The left side grows without bound, so the scan terminates.
  while (collapse_count_lhs(n + 1) <= out.rhs) ++n;
  out.n = n;
  return out;
}

double min_rc_from_resolution(double distance, std::size_t n) {
  require_positive(distance, "distance");
  if (n < 1) throw_config("collapse count must be at least 1");
  return distance * std::exp2(0.5 * (1.0 - static_cast<double>(n)));
}

double momentum_kick(double dx) {
  require_positive(dx, "transverse width");
  return kPlanck / (4.0 * kPi * dx);
}

double angular_deviation(std::size_t n, double wavelength, double r_c) {
  if (n < 2) throw_config("angular deviation needs at least 2 collapses");
  require_positive(wavelength, "wavelength");
  require_positive(r_c, "r_c");
  return static_cast<double>(n - 1) * wavelength / (4.0 * kPi * r_c);
}

double exact_transverse_width(std::size_t m, double r_c) {
  require_positive(r_c, "r_c");
  return r_c * std::sqrt(1.0 - std::exp2(-static_cast<double>(m + 1)));
}

double angular_deviation_exact(std::size_t n, double wavelength, double r_c) {
  if (n < 2) throw_config("angular deviation needs at least 2 collapses");
  require_positive(wavelength, "wavelength");
  double s = 0.0;
  for (std::size_t m = 2; m <= n; ++m) s += 1.0 / exact_transverse_width(m, r_c);
  return wavelength * s / (4.0 * kPi);
}

double teleportation_volume(double divergence, double path_1, double path_2, ConeConvention convention) {
  if (!(divergence >= 0.0)) throw_config("beam divergence must be non-negative");
  require_positive(path_1, "path length");
  require_positive(path_2, "path length");
  const double f = convention == ConeConvention::FullAngle ? 0.5 : 1.0;
  auto cone = [&](double l) {
    const double r = f * divergence * l;
    return kPi / 3.0 * r * r * l;
  };
  return cone(path_1) + cone(path_2);
}

double reduced_frequency(double nu, double temperature) {
  require_positive(nu, "frequency");
  require_positive(temperature, "temperature");
  return kPlanck * nu / (kBoltzmann * temperature);
}

double planck_number_density(double nu, double temperature) {
  const double u = reduced_frequency(nu, temperature);
  const double c = kSpeedOfLight;
  return 8.0 * kPi * nu * nu / (c * c * c) / std::expm1(u);
}

double bracket(double u) {
  require_positive(u, "u");
  // 2 (e^u - 1) / (u e^u) = -2 expm1(-u) / u
  return 1.0 + 2.0 * std::expm1(-u) / u;
}

double bracket_root() {
  return solve_root([](double u) { return bracket(u); }, 0.5, 5.0);
}

double energy_density_peak_u() {
  return solve_root([](double u) { return u + 3.0 * std::expm1(-u); }, 1.0, 5.0);
}

double collapse_frequency_shift(double r_c) {
  require_positive(r_c, "r_c");
  return kSpeedOfLight / (4.0 * kPi * r_c);
}

double temperature_fluctuation(double wavelength, double r_c, double u) {
  require_positive(wavelength, "wavelength");
  require_positive(r_c, "r_c");
  return wavelength / (4.0 * kPi * r_c) * bracket(u);
}

double min_rc_cmb(double delta_limit, double wavelength, double u) {
  if (!(delta_limit > 0.0 && delta_limit < 1.0)) throw_config("delta limit must lie in (0, 1)");
  require_positive(wavelength, "wavelength");
  return wavelength * std::abs(bracket(u)) / (4.0 * kPi * delta_limit);
}

CmbBound min_vc_cmb(double delta_limit, double wavelength, double u, double t_tilde) {
  require_positive(t_tilde, "t_tilde");
  CmbBound b;
  b.r_c = min_rc_cmb(delta_limit, wavelength, u);
  b.critical_volume = min_critical_volume(b.r_c, t_tilde * wavelength);
  b.a_cubed_v_c = b.critical_volume / (wavelength * wavelength * wavelength);
  b.k = variable_cell_k(t_tilde, b.a_cubed_v_c);
  b.delta_z_coefficient = std::pow(wavelength, 1.5) / (4.0 * kPi) * std::sqrt(4.0 * kPi * t_tilde) * bracket(u);
  return b;
}

double variable_cell_k(double t_tilde, double a_cubed_v_c) {
  require_positive(t_tilde, "t_tilde");
  require_positive(a_cubed_v_c, "a^3 v_c");
  return std::sqrt(t_tilde / (4.0 * kPi * a_cubed_v_c));
}

double delta_at_redshift(double coefficient, double critical_volume, double z) {
  require_positive(critical_volume, "critical volume");
  if (!(z >= 0.0)) throw_config("redshift must be non-negative");
  return coefficient * std::sqrt(1.0 / (critical_volume * std::pow(z + 1.0, 3.0)));
}

std::vector<double> default_collapse_epochs() {
  std::vector<double> z;
  for (int j = 0;; ++j) {
    const double one_plus_z = 1101.0 * std::exp2(-0.5 * j);
    if (one_plus_z <= 1.0) break;
    z.push_back(one_plus_z - 1.0);
  }
  z.push_back(0.0);
  return z;
}

RedshiftBound redshift_summed_constraint(const std::vector<double>& redshifts, double delta_limit,
                                         double coefficient) {
  if (redshifts.empty()) throw_config("redshift list must not be empty");
  if (!(delta_limit > 0.0 && delta_limit < 1.0)) throw_config("delta limit must lie in (0, 1)");
  RedshiftBound b;
  for (double z : redshifts) {
    if (!(z >= 0.0)) throw_config("redshifts must be non-negative");
    b.sum_inverse_cube += std::pow(z + 1.0, -3.0);
    b.sum_inverse_three_halves += std::pow(z + 1.0, -1.5);
  }
  const double scale = coefficient * coefficient / (delta_limit * delta_limit);
  b.inverse_cube_form = scale * b.sum_inverse_cube;
  b.linear_sum_form = scale * b.sum_inverse_three_halves * b.sum_inverse_three_halves;
  return b;
}

double perturbed_number_density(double nu, double temperature, double delta) {
  const double u = reduced_frequency(nu, temperature);
  // u e^u / (e^u - 1) = u / (1 - e^-u)
  return planck_number_density(nu, temperature) * (1.0 + u * delta / std::expm1(-u));
}

double fixed_cell_delta(double nu, double temperature, double critical_volume, double t_tilde) {
  if (std::isinf(critical_volume)) return 0.0;
  require_positive(critical_volume, "critical volume");
  require_positive(t_tilde, "t_tilde");
  const double lambda = kSpeedOfLight / nu;
  const double u = reduced_frequency(nu, temperature);
  return std::pow(lambda, 1.5) / (4.0 * kPi) * std::sqrt(4.0 * kPi * t_tilde / critical_volume) * bracket(u);
}

double variable_cell_delta(double nu, double temperature, double k) {
  if (!(k >= 0.0)) throw_config("k must be non-negative");
  return k * bracket(reduced_frequency(nu, temperature));
}

std::vector<double> log_frequency_grid(double nu_min, double nu_max, std::size_t points) {
  require_positive(nu_min, "nu_min");
  if (!(nu_max > nu_min) || !std::isfinite(nu_max)) throw_config("nu_max must exceed nu_min");
  if (points < 2) throw_config("frequency grid needs at least 2 points");
  std::vector<double> nu(points);
  const double lo = std::log(nu_min), hi = std::log(nu_max);
  for (std::size_t i = 0; i < points; ++i)
    nu[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  nu.front() = nu_min;
  nu.back() = nu_max;
  return nu;
}

std::vector<SpectrumRow> perturbed_spectrum(const SpectrumModel& model, const std::vector<double>& nu_grid) {
  require_positive(model.temperature, "temperature");
  std::vector<SpectrumRow> rows;
  rows.reserve(nu_grid.size());
  for (std::size_t i = 0; i < nu_grid.size(); ++i) {
    if (i > 0 && !(nu_grid[i] > nu_grid[i - 1])) throw_config("frequency grid must be strictly increasing");
    SpectrumRow r;
    r.nu = nu_grid[i];
    r.u = reduced_frequency(r.nu, model.temperature);
    r.n = planck_number_density(r.nu, model.temperature);
    const double d_fixed = fixed_cell_delta(r.nu, model.temperature, model.critical_volume, model.t_tilde);
    const double d_var = variable_cell_delta(r.nu, model.temperature, model.k);
    r.n_fixed = d_fixed == 0.0 ? r.n : perturbed_number_density(r.nu, model.temperature, d_fixed);
    r.n_variable = d_var == 0.0 ? r.n : perturbed_number_density(r.nu, model.temperature, d_var);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ccqm::astro
