#pragma once

// Photon-collapse constraint calculators. All inputs and outputs are SI.

#include <cstddef>
#include <optional>
#include <vector>

namespace ccqm::astro {

inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kPlanck = 6.62607015e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kLightYear = 9.4607e15;        // m
inline constexpr double kCmbTemperature = 2.725;       // K

// --- Photon shell (starlight) ---

/// r_c = sqrt(V_c / (4 pi t)).
double first_collapse_radius(double critical_volume, double thickness);

/// V_c = 4 pi r_c^2 t.
double min_critical_volume(double r_c, double thickness);

/// Left side of the collapse-count condition: log10(n-1) + (n-5)/2 log10(2).
double collapse_count_lhs(std::size_t n);

/// Angular deviation after n collapses when the first one sits at r_c = d 2^((1-n)/2):
/// (n-1) lambda 2^((n-5)/2) / (pi d).
double deviation_for_count(std::size_t n, double distance, double wavelength);

struct CollapseCount {
  // Largest admissible n; 1 when not even a single kick is allowed.
  std::size_t n = 1;
  bool kicks_permitted = false;
  double rhs = 0.0;  // log10(pi d delta_phi / lambda)
};

/// Largest n with collapse_count_lhs(n) <= log10(pi d delta_phi / lambda), by integer scan.
CollapseCount max_collapse_count(double distance, double delta_phi, double wavelength);

/// r_c = d 2^((1-n)/2).
double min_rc_from_resolution(double distance, std::size_t n);

/// Transverse momentum kick h / (4 pi dx).
double momentum_kick(double dx);

/// (n-1) lambda / (4 pi r_c): every kick after the first has dx = r_c.
double angular_deviation(std::size_t n, double wavelength, double r_c);

/// Transverse width at the m-th collapse without the small-angle shortcut:
/// dx_m = r_c sqrt(1 - 2^-(m+1)).
double exact_transverse_width(std::size_t m, double r_c);

/// Sum over collapses m = 2..n of lambda / (4 pi dx_m).
double angular_deviation_exact(std::size_t n, double wavelength, double r_c);

enum class ConeConvention {
  // Divergence is the full apex angle: cone radius = divergence * L / 2.
  FullAngle,
  // Divergence is the half angle: cone radius = divergence * L.
  HalfAngle,
};

/// Two cones from the source to each receiver, (pi/3) R^2 L each.
double teleportation_volume(double divergence, double path_1, double path_2,
                            ConeConvention convention = ConeConvention::FullAngle);

// --- CMB ---

/// u = h nu / (k_B T).
double reduced_frequency(double nu, double temperature);

/// N(nu) = (8 pi nu^2 / c^3) / (e^u - 1), photons per m^3 per Hz.
double planck_number_density(double nu, double temperature);

/// 1 - 2 (e^u - 1) / (u e^u).
double bracket(double u);

/// Positive root of bracket(u), which is also the maximum of u^2/(e^u - 1).
double bracket_root();

/// Maximum of u^3/(e^u - 1) (energy density per unit frequency).
double energy_density_peak_u();

/// Delta nu = c / (4 pi r_c).
double collapse_frequency_shift(double r_c);

/// delta = lambda / (4 pi r_c) * bracket(u). Signed; negative below the bracket root.
double temperature_fluctuation(double wavelength, double r_c, double u);

/// Inverse of temperature_fluctuation for |delta|: r_c = lambda |bracket(u)| / (4 pi delta).
double min_rc_cmb(double delta_limit, double wavelength, double u);

struct CmbBound {
  double r_c = 0.0;
  double critical_volume = 0.0;      // 4 pi r_c^2 t_tilde lambda
  double a_cubed_v_c = 0.0;          // V_c / lambda^3
  double k = 0.0;                    // sqrt(t_tilde / (4 pi a^3 v_c))
  double delta_z_coefficient = 0.0;  // lambda^(3/2)/(4 pi) sqrt(4 pi t_tilde) bracket(u), m^(3/2)
};

CmbBound min_vc_cmb(double delta_limit, double wavelength, double u, double t_tilde);

/// k = sqrt(t_tilde / (4 pi a_cubed_v_c)).
double variable_cell_k(double t_tilde, double a_cubed_v_c);

/// delta(z) = coefficient * sqrt(1 / (V_c (z+1)^3)).
double delta_at_redshift(double coefficient, double critical_volume, double z);

/// Last-scattering to today: 1 + z_j = 1101 * 2^(-j/2), ending with z = 0.
std::vector<double> default_collapse_epochs();

struct RedshiftBound {
  // Bound from requiring sum delta(z)^2 <= delta_limit^2 (quadrature sum):
  // coefficient^2 / delta^2 * sum (z+1)^-3.
  double inverse_cube_form = 0.0;
  // Bound from requiring sum |delta(z)| <= delta_limit:
  // coefficient^2 / delta^2 * (sum (z+1)^-3/2)^2.
  double linear_sum_form = 0.0;
  double sum_inverse_cube = 0.0;
  double sum_inverse_three_halves = 0.0;
};

RedshiftBound redshift_summed_constraint(const std::vector<double>& redshifts, double delta_limit,
                                         double coefficient);

// --- Spectra ---

enum class CellModel { FixedCell, VariableCell };

/// N [1 - u delta e^u / (e^u - 1)].
double perturbed_number_density(double nu, double temperature, double delta);

/// Fixed cell: V_c fixed, t = t_tilde lambda, lambda = c / nu.
double fixed_cell_delta(double nu, double temperature, double critical_volume, double t_tilde);

/// Variable cell: k * bracket(u), independent of epoch.
double variable_cell_delta(double nu, double temperature, double k);

struct SpectrumRow {
  double nu = 0.0;
  double u = 0.0;
  double n = 0.0;
  double n_fixed = 0.0;
  double n_variable = 0.0;
};

struct SpectrumModel {
  double temperature = kCmbTemperature;
  // Fixed-cell parameters; critical_volume = inf disables the perturbation.
  double critical_volume = 9.0e10;
  double t_tilde = 3e7;
  // Variable-cell constant; 0 disables the perturbation.
  double k = 1.3e-5;
};

/// Log-spaced frequency grid, both ends included, strictly increasing.
std::vector<double> log_frequency_grid(double nu_min, double nu_max, std::size_t points);

std::vector<SpectrumRow> perturbed_spectrum(const SpectrumModel& model, const std::vector<double>& nu_grid);

}  // namespace ccqm::astro
