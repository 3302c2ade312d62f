#pragma once

// Synthetic cooling of the translational mode through the beam-splitter
// exchange with the librational mode, optionally assisted by extra
// librational damping (feedback).

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "levdyn/model.hpp"
#include "levdyn/ode.hpp"
#include "levdyn/parallel.hpp"
#include "levdyn/setup.hpp"
#include "levdyn/steady_state.hpp"

namespace levdyn {

struct Baths {
  double nbar_theta = 0.0;
  double nbar_y = 0.0;
};

struct CoolingConfig {
  double delta = 0.0;     // Delta_eff1 - Delta_eff2
  double gamma_fb = 0.0;  // added librational damping, same units as the rates
  SteadyBranch branch;
  Baths baths;

  void validate() const {
    if (!(gamma_fb >= 0.0)) throw DomainError("feedback rate must be non-negative");
    if (!(baths.nbar_theta >= 0.0) || !(baths.nbar_y >= 0.0)) throw DomainError("bath occupations must be >= 0");
    if (!std::isfinite(delta)) throw DomainError("delta must be finite");
  }
};

struct CoolingResult {
  double eta_tilde = 0.0;
  double n_theta_out = 0.0;
  double n_y_out = 0.0;
  double xi = 1.0;
};

struct EffectiveDetunings {
  double eff_1;
  double eff_2;
  double delta;
};

inline EffectiveDetunings effective_detunings(const CoupledKerr& k, const DriveConfig& d, const SteadyBranch& b) {
  if (b.stability != Stability::stable) throw std::invalid_argument("effective_detunings: branch is not stable");
  const double e1 = d.delta_1 - 24.0 * k.eta_theta * b.n_theta - 4.0 * k.eta_thetay * (b.n_y + 1.0);
  const double e2 = d.delta_2 - 24.0 * k.eta_y * b.n_y - 4.0 * k.eta_thetay * (b.n_theta + 1.0);
  return {e1, e2, e1 - e2};
}

/// Incoherent exchange rate 32 G eta_ty^2 n_t n_y / (G^2 + 4 delta^2), G = g_t + g_fb + g_y.
inline double eta_tilde(const CoupledKerr& k, const SteadyBranch& b, double delta, double gamma_fb = 0.0) {
  const double G = k.gamma_theta + gamma_fb + k.gamma_y;
  return 32.0 * G * k.eta_thetay * k.eta_thetay * b.n_theta * b.n_y / (G * G + 4.0 * delta * delta);
}

/// Two-mode-squeezing coupling g = 4 eta_ty |beta_t beta_y| and its phase.
struct TmsCoupling {
  double g;
  double phase;
};

inline TmsCoupling tms_coupling(const CoupledKerr& k, const SteadyBranch& b, double phase = 0.0) {
  return {4.0 * k.eta_thetay * std::abs(b.beta_theta) * std::abs(b.beta_y), phase};
}

/// Rates and amplitude product that fix the steady occupations.
struct ExchangeParams {
  double gamma_theta;
  double gamma_y;
  double coupling_sq;  // eta_thetay^2 n_theta n_y
  double delta;
  double gamma_fb = 0.0;
};

inline ExchangeParams exchange_params(const CoupledKerr& k, const CoolingConfig& c) {
  return {k.gamma_theta, k.gamma_y, k.eta_thetay * k.eta_thetay * c.branch.n_theta * c.branch.n_y, c.delta,
          c.gamma_fb};
}

/// (nbar_y - <n_y>) / (nbar_y - nbar_theta), the transferred fraction.
inline double exchange_fraction(const ExchangeParams& e) {
  const double g = e.gamma_theta + e.gamma_fb;
  const double G = g + e.gamma_y;
  const double X = 64.0 * e.coupling_sq;
  const double den = e.gamma_y * g * (G * G + 4.0 * e.delta * e.delta) + G * G * X;
  return den > 0.0 ? g * G * X / den : 0.0;
}

/// Closed-form steady occupations; feedback enters as gamma_theta -> gamma_theta + gamma_fb.
inline CoolingResult occupations(const ExchangeParams& e, const Baths& baths) {
  const double g = e.gamma_theta + e.gamma_fb;
  const double G = g + e.gamma_y;
  const double X = 64.0 * e.coupling_sq;
  const double den = e.gamma_y * g * (G * G + 4.0 * e.delta * e.delta) + G * G * X;
  const double K = den > 0.0 ? G * X * (baths.nbar_y - baths.nbar_theta) / den : 0.0;
  CoolingResult r;
  r.eta_tilde = 32.0 * G * e.coupling_sq / (G * G + 4.0 * e.delta * e.delta);
  r.n_y_out = baths.nbar_y - g * K;
  r.n_theta_out = baths.nbar_theta + e.gamma_y * K;
  r.xi = baths.nbar_y > 0.0 ? r.n_y_out / baths.nbar_y : 1.0;
  return r;
}

/// Steady occupations without feedback (config.gamma_fb is ignored).
inline CoolingResult steady_occupations(const CoupledKerr& k, const CoolingConfig& c) {
  c.validate();
  auto e = exchange_params(k, c);
  e.gamma_fb = 0.0;
  return occupations(e, c.baths);
}

/// Steady occupations with librational feedback at rate config.gamma_fb.
inline CoolingResult feedback_occupation(const CoupledKerr& k, const CoolingConfig& c) {
  c.validate();
  return occupations(exchange_params(k, c), c.baths);
}

struct OccupancySeries {
  std::vector<double> times;
  std::vector<double> n_theta;
  std::vector<double> n_y;
};

/// Integrates the coupled phonon-number rate equations from (n_theta0, n_y0).
inline OccupancySeries occupancy_dynamics(const CoupledKerr& k, const CoolingConfig& c, double n_theta0,
                                          double n_y0, double t_end, std::size_t samples = 101,
                                          double rel_tol = 1e-12) {
  c.validate();
  if (!(n_theta0 >= 0.0) || !(n_y0 >= 0.0)) throw DomainError("initial occupations must be non-negative");
  if (!(t_end > 0.0) || samples < 2) throw DomainError("need t_end > 0 and at least two samples");
  const double et = eta_tilde(k, c.branch, c.delta, c.gamma_fb);
  const double gt = k.gamma_theta + c.gamma_fb;
  const double gy = k.gamma_y;
  const double nbt = c.baths.nbar_theta, nby = c.baths.nbar_y;

  using V2 = Eigen::Vector2d;
  auto rhs = [&](double, const V2& n) {
    const double nt = n[0], ny = n[1];
    V2 out;
    out[0] = -((1.0 + nbt) * gt + 2.0 * et * (1.0 + ny)) * nt + (nbt * gt + 2.0 * et * ny) * (1.0 + nt);
    out[1] = -((1.0 + nby) * gy + 2.0 * et * (1.0 + nt)) * ny + (nby * gy + 2.0 * et * nt) * (1.0 + ny);
    return out;
  };
  OccupancySeries s;
  auto sample_time = [&](std::size_t i) {
    return i + 1 == samples ? t_end : t_end * static_cast<double>(i) / static_cast<double>(samples - 1);
  };
  V2 y(n_theta0, n_y0);
  s.times.push_back(0.0);
  s.n_theta.push_back(y[0]);
  s.n_y.push_back(y[1]);
  std::size_t next = 1;
  ode::Options o;
  o.rel_tol = rel_tol;
  o.abs_tol = rel_tol * 1e-6 * std::max({1.0, nbt, nby, n_theta0, n_y0});
  auto obs = [&](const ode::Step<V2>& st) {
    while (next < samples && sample_time(next) <= st.t1) {
      const double ts = sample_time(next);
      const V2 v = ts == st.t1 ? st.y1 : st.at(ts);
      s.times.push_back(ts);
      s.n_theta.push_back(v[0]);
      s.n_y.push_back(v[1]);
      ++next;
    }
    return true;
  };
  const auto status = ode::integrate(rhs, 0.0, t_end, y, o, obs);
  if (status != ode::Status::success) throw ConvergenceError("occupancy integration failed");
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (!(s.n_theta[i] >= 0.0) || !(s.n_y[i] >= 0.0))
      throw ConvergenceError("occupancy integration produced a negative occupation");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class CoolingAxis { delta, pressure, omega_1, omega_2, gamma_fb };

inline std::string_view to_string(CoolingAxis a) {
  switch (a) {
    case CoolingAxis::delta: return "delta";
    case CoolingAxis::pressure: return "pressure";
    case CoolingAxis::omega_1: return "omega_1";
    case CoolingAxis::omega_2: return "omega_2";
    case CoolingAxis::gamma_fb: return "gamma_fb";
  }
  return "?";
}

/// One operating point of a cooling study. `delta` is in drive units;
/// `gamma_fb` is in units of gamma_theta when the drive is normalized.
struct CoolingScenario {
  PhysicalSetup setup;
  DriveConfig drive;
  double delta = 0.0;
  double gamma_fb = 0.0;
  /// Re-solve the operating branch with gamma_theta + gamma_fb.
  bool resolve_branch_with_feedback = false;
};

struct CoolingRow {
  double axis_value = 0.0;
  double pressure = 0.0;
  double delta = 0.0;
  double gamma_fb = 0.0;  // as given in the scenario
  bool has_branch = false;
  CoolingResult result;
  SteadyBranch branch;
};

/// Lowest-occupation stable branch, if any.
inline std::optional<SteadyBranch> operating_branch(const SteadyResult& r) {
  std::optional<SteadyBranch> best;
  for (const auto& b : r.branches) {
    if (b.stability != Stability::stable) continue;
    if (!best || b.n_theta + b.n_y < best->n_theta + best->n_y) best = b;
  }
  return best;
}

inline CoolingRow evaluate_cooling(const CoolingScenario& s, double axis_value = 0.0,
                                   const SolveOptions& opt = {}) {
  const ModeParams p = s.setup.params();
  CoupledKerr k = kerr_system(p, s.drive.units);
  const double fb = s.drive.units == Units::normalized ? s.gamma_fb * k.gamma_theta : s.gamma_fb;
  CoolingRow row;
  row.axis_value = axis_value;
  row.pressure = s.setup.environment.pressure;
  row.delta = s.delta;
  row.gamma_fb = s.gamma_fb;
  CoupledKerr k_branch = k;
  if (s.resolve_branch_with_feedback) k_branch.gamma_theta += fb;
  const auto op = operating_branch(branch_solve(k_branch, s.drive, opt));
  if (!op) return row;
  row.has_branch = true;
  row.branch = *op;
  CoolingConfig c{s.delta, fb, *op, Baths{p.nbar_theta, p.nbar_y}};
  row.result = feedback_occupation(k, c);
  return row;
}

struct CoolingAxisSpec {
  CoolingAxis axis = CoolingAxis::delta;
  std::vector<double> values;
};

inline std::vector<CoolingRow> cooling_sweep(const CoolingScenario& base, const CoolingAxisSpec& axis,
                                             unsigned workers = 1, const SolveOptions& opt = {}) {
  if (axis.values.empty()) throw ConfigurationError("cooling sweep axis has no points");
  std::vector<CoolingRow> rows(axis.values.size());
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    CoolingScenario s = base;
    const double v = axis.values[i];
    switch (axis.axis) {
      case CoolingAxis::delta: s.delta = v; break;
      case CoolingAxis::pressure: s.setup = s.setup.at_pressure(v); break;
      case CoolingAxis::omega_1: s.drive.omega_1 = v; break;
      case CoolingAxis::omega_2: s.drive.omega_2 = v; break;
      case CoolingAxis::gamma_fb: s.gamma_fb = v; break;
    }
    rows[i] = evaluate_cooling(s, v, opt);
  });
  return rows;
}

}  // namespace levdyn
