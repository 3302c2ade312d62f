#pragma once

// Rotating-frame mean-field model of the driven librational (theta) and
// translational (y) modes:
//
//   d beta_t/dt = -[g_t/2 + i D_t] beta_t - i W1/2,
//   D_t = d1 - 12 e_t (|beta_t|^2 + 1) - 4 e_ty |beta_y|^2
//
// and the y counterpart. Fixed points satisfy
//   (g^2/4 + D^2) n = W^2/4,  n = |beta|^2.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string_view>

#include "levdyn/constants.hpp"
#include "levdyn/physics.hpp"

namespace levdyn {

using cplx = std::complex<double>;

enum class Units { si, normalized };

inline std::string_view to_string(Units u) { return u == Units::si ? "si" : "normalized"; }

/// Drive amplitudes and effective detunings, in rad/s (si) or in units of
/// omega_theta (normalized). Detunings follow delta = omega_t - omega_l - 2 eta_thetay.
struct DriveConfig {
  double omega_1 = 0.0;
  double omega_2 = 0.0;
  double delta_1 = 0.0;
  double delta_2 = 0.0;
  Units units = Units::normalized;

  void validate() const {
    if (!(omega_1 >= 0.0) || !(omega_2 >= 0.0)) throw DomainError("drive amplitudes must be non-negative");
    if (!std::isfinite(delta_1) || !std::isfinite(delta_2)) throw DomainError("detunings must be finite");
  }
};

/// Damping and Kerr coefficients expressed in the same units as a DriveConfig.
struct CoupledKerr {
  double gamma_theta = 0.0;
  double gamma_y = 0.0;
  double eta_theta = 0.0;
  double eta_y = 0.0;
  double eta_thetay = 0.0;
  /// omega_theta in these units; sets the marginal-stability scale.
  double frequency_scale = 1.0;

  void validate() const {
    if (!(gamma_theta > 0.0) || !(gamma_y > 0.0)) throw DomainError("damping rates must be positive");
    if (!(eta_theta >= 0.0) || !(eta_y >= 0.0) || !(eta_thetay >= 0.0))
      throw DomainError("Kerr coefficients must be non-negative");
  }
};

inline CoupledKerr kerr_system(const ModeParams& p, Units units) {
  CoupledKerr k{p.gamma_theta, p.gamma_y, p.eta_theta, p.eta_y, p.eta_thetay, p.omega_theta};
  if (units == Units::normalized) {
    if (!(p.omega_theta > 0.0)) throw DomainError("normalized units need a trapped librational mode");
    const double s = p.omega_theta;
    k = {p.gamma_theta / s, p.gamma_y / s, p.eta_theta / s, p.eta_y / s, p.eta_thetay / s, 1.0};
  }
  return k;
}

/// Nonlinear detunings (D_theta, D_y) at occupations (n_theta, n_y).
struct Detunings {
  double theta;
  double y;
};

inline Detunings nonlinear_detunings(const CoupledKerr& k, const DriveConfig& d, double n_theta, double n_y) {
  return {d.delta_1 - 12.0 * k.eta_theta * (n_theta + 1.0) - 4.0 * k.eta_thetay * n_y,
          d.delta_2 - 12.0 * k.eta_y * (n_y + 1.0) - 4.0 * k.eta_thetay * n_theta};
}

/// Relative residual of the two steady-state equations (max over both).
inline double steady_residual(const CoupledKerr& k, const DriveConfig& d, double n_theta, double n_y) {
  const auto D = nonlinear_detunings(k, d, n_theta, n_y);
  auto one = [](double n, double g, double Dn, double W) {
    const double c = 0.25 * W * W;
    const double lhs = n * (0.25 * g * g + Dn * Dn);
    return c > 0.0 ? std::abs(lhs - c) / c : std::abs(n);
  };
  return std::max(one(n_theta, k.gamma_theta, D.theta, d.omega_1), one(n_y, k.gamma_y, D.y, d.omega_2));
}

/// Fixed-point amplitude beta = (-i W/2) / (g/2 + i D).
inline cplx fixed_amplitude(double omega, double gamma, double detuning) {
  return cplx(0.0, -0.5 * omega) / cplx(0.5 * gamma, detuning);
}

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;

/// Real state ordering: (Re b_theta, Im b_theta, Re b_y, Im b_y).
inline Vec4 pack(cplx beta_theta, cplx beta_y) {
  return Vec4(beta_theta.real(), beta_theta.imag(), beta_y.real(), beta_y.imag());
}

inline Vec4 flow(const CoupledKerr& k, const DriveConfig& d, const Vec4& s) {
  const double nt = s[0] * s[0] + s[1] * s[1];
  const double ny = s[2] * s[2] + s[3] * s[3];
  const auto D = nonlinear_detunings(k, d, nt, ny);
  Vec4 out;
  out[0] = -0.5 * k.gamma_theta * s[0] + D.theta * s[1];
  out[1] = -0.5 * k.gamma_theta * s[1] - D.theta * s[0] - 0.5 * d.omega_1;
  out[2] = -0.5 * k.gamma_y * s[2] + D.y * s[3];
  out[3] = -0.5 * k.gamma_y * s[3] - D.y * s[2] - 0.5 * d.omega_2;
  return out;
}

/// Analytic Jacobian of `flow`.
inline Mat4 jacobian(const CoupledKerr& k, const DriveConfig& d, const Vec4& s) {
  const double nt = s[0] * s[0] + s[1] * s[1];
  const double ny = s[2] * s[2] + s[3] * s[3];
  const auto D = nonlinear_detunings(k, d, nt, ny);
  // gradients of D_theta and D_y with respect to the packed state
  const Vec4 gt(-24.0 * k.eta_theta * s[0], -24.0 * k.eta_theta * s[1], -8.0 * k.eta_thetay * s[2],
                -8.0 * k.eta_thetay * s[3]);
  const Vec4 gy(-8.0 * k.eta_thetay * s[0], -8.0 * k.eta_thetay * s[1], -24.0 * k.eta_y * s[2],
                -24.0 * k.eta_y * s[3]);
  Mat4 J;
  J.row(0) = s[1] * gt.transpose();
  J.row(1) = -s[0] * gt.transpose();
  J.row(2) = s[3] * gy.transpose();
  J.row(3) = -s[2] * gy.transpose();
  J(0, 0) += -0.5 * k.gamma_theta;
  J(0, 1) += D.theta;
  J(1, 0) += -D.theta;
  J(1, 1) += -0.5 * k.gamma_theta;
  J(2, 2) += -0.5 * k.gamma_y;
  J(2, 3) += D.y;
  J(3, 2) += -D.y;
  J(3, 3) += -0.5 * k.gamma_y;
  return J;
}

}  // namespace levdyn
