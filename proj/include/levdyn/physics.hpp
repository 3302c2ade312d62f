#pragma once

// Trap, inertia and nonlinearity parameters of a prolate dielectric
// ellipsoid held in a linearly polarized Gaussian beam.
//
// Conventions: SI lengths/masses; every frequency, rate and nonlinear
// coefficient is an angular frequency in rad/s.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levdyn/constants.hpp"

namespace levdyn {

struct ParticleGeometry {
  double r_a = 50e-9;   // long semi-axis [m]
  double r_b = 25e-9;   // short semi-axes r_b = r_c [m]
  double density = 2200.0;             // [kg/m^3]
  double relative_permittivity = 2.1;  // fused silica

  double aspect_ratio() const { return r_a / r_b; }

  void validate() const {
    if (!(r_a > 0.0) || !(r_b > 0.0)) throw DomainError("particle semi-axes must be positive");
    if (!(density > 0.0)) throw DomainError("particle density must be positive");
    if (!(relative_permittivity > 1.0)) throw DomainError("relative permittivity must exceed 1");
    if (r_a < r_b) throw DomainError("prolate convention violated: r_a < r_b");
  }
};

struct TrapBeam {
  double power = 0.1;   // P0 [W]
  double waist = 0.6e-6;  // w0 [m]

  void validate() const {
    if (!(power > 0.0)) throw DomainError("beam power must be positive");
    if (!(waist > 0.0)) throw DomainError("beam waist must be positive");
  }
};

/// Damping rates measured at one (pressure, temperature) point.
struct DampingReference {
  double gamma_theta = hz_to_rad(137.2);
  double gamma_y = hz_to_rad(47.0);
  double pressure = 1e-3;  // [Pa]
  double temperature = 300.0;  // [K]
};

struct Environment {
  double pressure = 1e-3;  // [Pa]
  double temperature = 300.0;  // [K]
  std::optional<DampingReference> damping_reference = DampingReference{};
  std::optional<double> gamma_theta_override;
  std::optional<double> gamma_y_override;

  void validate() const {
    if (!(pressure >= 0.0)) throw DomainError("pressure must be non-negative");
    if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
    if (damping_reference) {
      const auto& r = *damping_reference;
      if (!(r.gamma_theta > 0.0) || !(r.gamma_y > 0.0) || !(r.pressure > 0.0) || !(r.temperature > 0.0))
        throw DomainError("damping reference values must be positive");
    }
    if (gamma_theta_override && !(*gamma_theta_override >= 0.0))
      throw DomainError("gamma_theta override must be non-negative");
    if (gamma_y_override && !(*gamma_y_override >= 0.0))
      throw DomainError("gamma_y override must be non-negative");
  }
};

struct OpticalResponse {
  double kappa_x = 0.0;
  double kappa_y = 0.0;
  double kappa_xy = 0.0;
  double L_a = 1.0 / 3.0;
  double L_b = 1.0 / 3.0;
};

enum class Mode { theta, y };

/// Which closed form is used for the theta-y quartic coupling.
enum class CouplingFormula {
  quartic,  // coefficient of theta^2 y^2 in the expanded potential
  printed,  // the literal published expression (dimensionally inconsistent)
};

/// Everything the dynamics needs, derived from geometry/beam/environment.
struct ModeParams {
  double mass = 0.0;        // [kg]
  double volume = 0.0;      // [m^3]
  double inertia = 0.0;     // [kg m^2]
  double intensity_0 = 0.0; // [W/m^2]
  double u0_mag = 0.0;      // [J]
  double waist = 0.0;       // [m], kept for the identity checks
  OpticalResponse optics;
  double omega_theta = 0.0;
  double omega_y = 0.0;
  double eta_theta = 0.0;
  double eta_y = 0.0;
  double eta_thetay = 0.0;
  double eta_1 = 0.0;
  double eta_2 = 0.0;
  double eta_3 = 0.0;
  double gamma_theta = 0.0;
  double gamma_y = 0.0;
  double nbar_theta = 0.0;
  double nbar_y = 0.0;
  double temperature = 300.0;
  bool librationally_untrapped = false;
};

// ---------------------------------------------------------------------------

/// Depolarization factors (L_a, L_b) of a prolate spheroid with
/// a/b = aspect_ratio. L_a + 2 L_b = 1.
struct Depolarization {
  double L_a;
  double L_b;
};

inline Depolarization depolarization_factors(double aspect_ratio) {
  if (!(aspect_ratio >= 1.0)) throw DomainError("aspect ratio must be >= 1");
  if (std::isinf(aspect_ratio)) return {0.0, 0.5};
  const double one_minus_e2 = 1.0 / (aspect_ratio * aspect_ratio);
  const double e2 = 1.0 - one_minus_e2;
  double L_a;
  if (e2 < 1e-2) {
    // (1-e^2) * sum_k e^{2k}/(2k+3); converges to machine precision by k=8
    double sum = 0.0;
    double p = 1.0;
    for (int k = 0; k < 12; ++k) {
      sum += p / (2.0 * k + 3.0);
      p *= e2;
    }
    L_a = one_minus_e2 * sum;
  } else {
    const double e = std::sqrt(e2);
    const double one_minus_e = one_minus_e2 / (1.0 + e);
    const double atanh_e = 0.5 * std::log((1.0 + e) / one_minus_e);
    L_a = one_minus_e2 / e2 * (atanh_e / e - 1.0);
  }
  return {L_a, 0.5 * (1.0 - L_a)};
}

/// Quasi-static susceptibility kappa = (eps-1)/(1 + L (eps-1)) along each axis.
inline OpticalResponse susceptibilities(double aspect_ratio, double relative_permittivity) {
  if (!(relative_permittivity >= 1.0)) throw DomainError("relative permittivity must be >= 1");
  const auto [L_a, L_b] = depolarization_factors(aspect_ratio);
  const double chi = relative_permittivity - 1.0;
  OpticalResponse r;
  r.L_a = L_a;
  r.L_b = L_b;
  r.kappa_x = chi / (1.0 + L_a * chi);
  r.kappa_y = chi / (1.0 + L_b * chi);
  r.kappa_xy = r.kappa_x - r.kappa_y;
  return r;
}

inline OpticalResponse susceptibilities(const ParticleGeometry& g) {
  g.validate();
  return susceptibilities(g.aspect_ratio(), g.relative_permittivity);
}

/// Gas damping gamma(P, T) = gamma_ref (P/P_ref) sqrt(T/T_ref), or the override.
inline double gas_damping(const Environment& env, Mode mode) {
  const auto& override_rate = mode == Mode::theta ? env.gamma_theta_override : env.gamma_y_override;
  if (override_rate) return *override_rate;
  if (!env.damping_reference)
    throw ConfigurationError("no damping reference and no damping override supplied");
  const auto& ref = *env.damping_reference;
  if (env.pressure == 0.0) return 0.0;
  const double g_ref = mode == Mode::theta ? ref.gamma_theta : ref.gamma_y;
  return g_ref * (env.pressure / ref.pressure) * std::sqrt(env.temperature / ref.temperature);
}

/// Bose-Einstein occupation 1/(exp(hbar w / kT) - 1).
inline double thermal_occupation(double omega, double temperature) {
  if (!(omega > 0.0)) throw DomainError("thermal occupation needs omega > 0");
  if (!(temperature > 0.0)) throw DomainError("thermal occupation needs T > 0");
  return 1.0 / std::expm1(kHbar * omega / (kBoltzmann * temperature));
}

struct DeriveOptions {
  CouplingFormula coupling = CouplingFormula::quartic;
  /// Bypasses the depolarization closure when set.
  std::optional<OpticalResponse> optics;
};

namespace detail {

struct HigherOrder {
  double eta_1, eta_2, eta_3;
};

// 6th and 8th order coefficients in the published closed forms.
inline HigherOrder higher_order_coefficients(const ParticleGeometry& g, const TrapBeam& beam, double mass,
                                             double inertia, const OpticalResponse& k) {
  const double hb = kHbar;
  const double w0 = beam.waist;
  const double r2 = g.r_a * g.r_a + g.r_b * g.r_b;
  const double cpr = kSpeedOfLight * std::numbers::pi * g.density;
  // sqrt(kappa_xy) pulled out of the square root so the sphere limit is 0, not NaN
  const double eta_1 = hb * hb * std::sqrt(k.kappa_xy) / (16.0 * mass * inertia * w0 * w0 * k.kappa_x) *
                       std::sqrt(cpr * w0 * w0 * r2 * r2 / (10.0 * beam.power));
  const double eta_2 = hb * hb / (48.0 * mass * inertia) * std::sqrt(cpr / (k.kappa_x * beam.power));
  const double eta_3 = hb * hb * hb * cpr / (192.0 * mass * mass * inertia * k.kappa_x * beam.power);
  return {eta_1, eta_2, eta_3};
}

}  // namespace detail

/// Derives the full parameter set. A sphere (r_a == r_b) is returned with
/// omega_theta = eta_thetay = 0 and `librationally_untrapped` set.
inline ModeParams derive_mode_params(const ParticleGeometry& g, const TrapBeam& beam, const Environment& env,
                                     const DeriveOptions& opt = {}) {
  g.validate();
  beam.validate();
  env.validate();

  ModeParams p;
  p.optics = opt.optics ? *opt.optics : susceptibilities(g);
  const auto& k = p.optics;
  if (!(k.kappa_x > 0.0) || k.kappa_xy < 0.0) throw DomainError("need kappa_x > 0 and kappa_x >= kappa_y");

  const double r2 = g.r_a * g.r_a + g.r_b * g.r_b;
  p.volume = 4.0 * std::numbers::pi * g.r_a * g.r_b * g.r_b / 3.0;
  p.mass = g.density * p.volume;
  p.inertia = 4.0 * std::numbers::pi * g.density * g.r_a * g.r_b * g.r_b * r2 / 15.0;
  p.waist = beam.waist;
  p.intensity_0 = 2.0 * beam.power / (std::numbers::pi * beam.waist * beam.waist);
  p.u0_mag = p.volume * p.intensity_0 / (2.0 * kSpeedOfLight);

  const double w0sq = beam.waist * beam.waist;
  p.omega_y = std::sqrt(4.0 * p.u0_mag * k.kappa_x / (p.mass * w0sq));
  p.omega_theta = std::sqrt(2.0 * p.u0_mag * k.kappa_xy / p.inertia);
  p.librationally_untrapped = !(p.omega_theta > 0.0);

  p.eta_theta = kHbar / (24.0 * p.inertia);
  p.eta_y = kHbar / (8.0 * p.mass * w0sq);
  if (opt.coupling == CouplingFormula::printed) {
    p.eta_thetay = kHbar / (4.0 * beam.waist * p.inertia) * std::sqrt(r2 * r2 * k.kappa_xy / (10.0 * k.kappa_x));
  } else if (p.librationally_untrapped) {
    p.eta_thetay = 0.0;
  } else {
    // hbar eta_thetay = |U0| (2 kappa_xy / w0^2) theta_zpf^2 y_zpf^2
    const double theta_zpf2 = kHbar / (2.0 * p.inertia * p.omega_theta);
    const double y_zpf2 = kHbar / (2.0 * p.mass * p.omega_y);
    p.eta_thetay = p.u0_mag * (2.0 * k.kappa_xy / w0sq) * theta_zpf2 * y_zpf2 / kHbar;
  }
  const auto ho = detail::higher_order_coefficients(g, beam, p.mass, p.inertia, k);
  p.eta_1 = ho.eta_1;
  p.eta_2 = ho.eta_2;
  p.eta_3 = ho.eta_3;

  p.gamma_theta = gas_damping(env, Mode::theta);
  p.gamma_y = gas_damping(env, Mode::y);
  p.temperature = env.temperature;
  p.nbar_y = thermal_occupation(p.omega_y, env.temperature);
  p.nbar_theta = p.librationally_untrapped ? std::numeric_limits<double>::infinity()
                                           : thermal_occupation(p.omega_theta, env.temperature);
  return p;
}

// ---------------------------------------------------------------------------
// Published spot values for the 50 nm x 25 nm glass ellipsoid, 0.1 W, 0.6 um
// beam, 1 mPa, 300 K. Read as cyclic frequencies (Hz).

struct ReportedValues {
  double omega_theta_hz = 2.34e6;
  double omega_y_hz = 24.5e3;
  double eta_theta_hz = 0.202;
  double eta_y_hz = 0.105e-3;
  double eta_thetay_hz = 2.01e-3;
  double gamma_theta_hz = 137.2;
  double gamma_y_hz = 47.0;
};

/// Replaces the derived frequencies and quartic coefficients by the
/// published ones (Hz -> rad/s) and recomputes the bath occupations. Damping
/// keeps whatever the environment produced.
inline ModeParams with_reported_values(ModeParams p, const ReportedValues& v = {}) {
  p.omega_theta = hz_to_rad(v.omega_theta_hz);
  p.omega_y = hz_to_rad(v.omega_y_hz);
  p.eta_theta = hz_to_rad(v.eta_theta_hz);
  p.eta_y = hz_to_rad(v.eta_y_hz);
  p.eta_thetay = hz_to_rad(v.eta_thetay_hz);
  p.librationally_untrapped = false;
  p.nbar_theta = thermal_occupation(p.omega_theta, p.temperature);
  p.nbar_y = thermal_occupation(p.omega_y, p.temperature);
  return p;
}

/// One row of the comparison between derived and published spot values.
struct ComparisonRow {
  std::string name;
  double derived_hz;
  double reported_hz;
  double ratio;          // derived / reported
  bool within_factor_10;
};

inline std::vector<ComparisonRow> compare_with_reported(const ModeParams& p, const ReportedValues& v = {}) {
  auto row = [](std::string name, double derived_rad, double reported_hz) {
    const double d = rad_to_hz(derived_rad);
    const double ratio = d / reported_hz;
    return ComparisonRow{std::move(name), d, reported_hz, ratio, ratio <= 10.0 && ratio >= 0.1};
  };
  return {row("omega_theta", p.omega_theta, v.omega_theta_hz), row("omega_y", p.omega_y, v.omega_y_hz),
          row("eta_theta", p.eta_theta, v.eta_theta_hz), row("eta_y", p.eta_y, v.eta_y_hz),
          row("eta_thetay", p.eta_thetay, v.eta_thetay_hz)};
}

// ---------------------------------------------------------------------------

struct CoefficientRow {
  double r_b;
  double eta_theta, eta_y, eta_thetay, eta_1, eta_2, eta_3;
};

/// Nonlinear coefficients along a short-axis sweep at fixed r_a.
inline std::vector<CoefficientRow> coefficient_sweep(const ParticleGeometry& shape, const TrapBeam& beam,
                                                     std::span<const double> r_b_values,
                                                     CouplingFormula coupling = CouplingFormula::quartic) {
  Environment env;  // damping is irrelevant to the coefficients
  std::vector<CoefficientRow> rows;
  rows.reserve(r_b_values.size());
  for (double r_b : r_b_values) {
    if (!(r_b > 0.0) || r_b > shape.r_a) throw DomainError("coefficient sweep needs 0 < r_b <= r_a");
    ParticleGeometry g = shape;
    g.r_b = r_b;
    const auto p = derive_mode_params(g, beam, env, {coupling, std::nullopt});
    rows.push_back({r_b, p.eta_theta, p.eta_y, p.eta_thetay, p.eta_1, p.eta_2, p.eta_3});
  }
  return rows;
}

}  // namespace levdyn
