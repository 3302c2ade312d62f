#pragma once

// Time integration of the mean-field amplitude equations and matching of
// end points to steady-state branches.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "levdyn/model.hpp"
#include "levdyn/ode.hpp"
#include "levdyn/steady_state.hpp"

namespace levdyn {

struct Trajectory {
  std::vector<double> times;
  std::vector<cplx> beta_theta;
  std::vector<cplx> beta_y;
  bool converged = false;
  std::optional<std::size_t> matched_branch;
};

/// Integration stopped on a step-size underflow; carries what was computed.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// Dimensionless distance from a fixed point: |d beta/dt| over the size of
/// the terms that balance in it, maximized over both modes. An undriven mode
/// relaxes to the origin, so there the measure is the amplitude itself.
inline double flow_residual(const CoupledKerr& k, const DriveConfig& d, const Vec4& s) {
  const Vec4 f = flow(k, d, s);
  const double nt = s[0] * s[0] + s[1] * s[1];
  const double ny = s[2] * s[2] + s[3] * s[3];
  const auto D = nonlinear_detunings(k, d, nt, ny);
  auto one = [](double fr, double fi, double n, double g, double Dn, double W) {
    const double mag = std::hypot(fr, fi);
    if (W == 0.0) return mag / (0.5 * g + std::abs(Dn));
    return mag / ((0.5 * g + std::abs(Dn)) * std::sqrt(n) + 0.5 * W);
  };
  return std::max(one(f[0], f[1], nt, k.gamma_theta, D.theta, d.omega_1),
                  one(f[2], f[3], ny, k.gamma_y, D.y, d.omega_2));
}

struct IntegrateOptions {
  double rel_tol = 1e-8;
  /// Absolute tolerance on each amplitude component; 0 picks rel_tol * 1e-6.
  double abs_tol = 0.0;
  std::size_t samples = 201;
  double converged_residual = 1e-8;
};

/// Integrates from t = 0 to t_end; samples are evenly spaced, both ends included.
inline Trajectory integrate(const CoupledKerr& k, const DriveConfig& d, cplx beta0_theta, cplx beta0_y,
                            double t_end, const IntegrateOptions& io = {}) {
  k.validate();
  d.validate();
  if (!(io.rel_tol >= 1e-12 && io.rel_tol <= 1e-3)) throw DomainError("rel_tol must lie in [1e-12, 1e-3]");
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  if (io.samples < 2) throw DomainError("need at least two samples");

  Trajectory tr;
  tr.times.reserve(io.samples);
  auto sample_time = [&](std::size_t i) {
    return i + 1 == io.samples ? t_end : t_end * static_cast<double>(i) / static_cast<double>(io.samples - 1);
  };
  auto record = [&](double t, const Vec4& s) {
    tr.times.push_back(t);
    tr.beta_theta.emplace_back(s[0], s[1]);
    tr.beta_y.emplace_back(s[2], s[3]);
  };

  Vec4 y = pack(beta0_theta, beta0_y);
  record(0.0, y);
  std::size_t next = 1;
  ode::Options o;
  o.rel_tol = io.rel_tol;
  o.abs_tol = io.abs_tol > 0.0 ? io.abs_tol : io.rel_tol * 1e-6;
  auto rhs = [&](double, const Vec4& s) { return flow(k, d, s); };
  auto obs = [&](const ode::Step<Vec4>& st) {
    while (next < io.samples && sample_time(next) <= st.t1) {
      const double ts = sample_time(next);
      record(ts, ts == st.t1 ? st.y1 : st.at(ts));
      ++next;
    }
    return true;
  };
  const auto status = ode::integrate(rhs, 0.0, t_end, y, o, obs);
  if (status != ode::Status::success)
    throw IntegrationError(std::string("mean-field integration failed: ") + ode::to_string(status), tr);
  tr.converged = flow_residual(k, d, y) <= io.converged_residual;
  return tr;
}

struct SettleResult {
  cplx beta_theta;
  cplx beta_y;
  double n_theta;
  double n_y;
  double time;
  bool converged;
  std::optional<std::size_t> matched_branch;  // index into `branches`
  std::vector<SteadyBranch> branches;
};

struct SettleOptions {
  double residual = 1e-9;
  double match_tol = 1e-6;
  double rel_tol = 1e-11;
};

/// Nearest branch within `tol` relative occupation distance; below one
/// quantum the distance is absolute.
inline std::optional<std::size_t> match_branch(const std::vector<SteadyBranch>& branches, double n_theta, double n_y,
                                               double tol) {
  std::optional<std::size_t> best;
  double best_dist = tol;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const auto& b = branches[i];
    auto rel = [](double p, double q) { return std::abs(p - q) / std::max({std::abs(p), std::abs(q), 1.0}); };
    const double dist = std::max(rel(n_theta, b.n_theta), rel(n_y, b.n_y));
    if (dist <= best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

/// Integrates until the flow residual drops below `residual` or max_time
/// passes, then matches the end point against branch_solve at the same point.
inline SettleResult settle(const CoupledKerr& k, const DriveConfig& d, cplx beta0_theta, cplx beta0_y,
                           double max_time, const SettleOptions& so = {}, const SolveOptions& solve = {}) {
  k.validate();
  d.validate();
  Vec4 y = pack(beta0_theta, beta0_y);
  double t_stop = max_time;
  bool converged = flow_residual(k, d, y) < so.residual;
  if (!converged) {
    ode::Options o;
    o.rel_tol = so.rel_tol;
    o.abs_tol = so.rel_tol * 1e-3;
    auto rhs = [&](double, const Vec4& s) { return flow(k, d, s); };
    auto obs = [&](const ode::Step<Vec4>& st) {
      if (flow_residual(k, d, st.y1) < so.residual) {
        t_stop = st.t1;
        converged = true;
        return false;
      }
      return true;
    };
    const auto status = ode::integrate(rhs, 0.0, max_time, y, o, obs);
    if (status == ode::Status::step_underflow || status == ode::Status::max_steps) converged = false;
  } else {
    t_stop = 0.0;
  }
  SettleResult r;
  r.beta_theta = cplx(y[0], y[1]);
  r.beta_y = cplx(y[2], y[3]);
  r.n_theta = std::norm(r.beta_theta);
  r.n_y = std::norm(r.beta_y);
  r.time = t_stop;
  r.converged = converged;
  r.branches = branch_solve(k, d, solve).branches;
  if (converged) r.matched_branch = match_branch(r.branches, r.n_theta, r.n_y, so.match_tol);
  return r;
}

}  // namespace levdyn
