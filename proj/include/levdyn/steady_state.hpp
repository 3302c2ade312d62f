#pragma once

// Enumeration of all fixed points of the coupled Kerr flow.
//
// For eta_thetay > 0 the theta equation is solved exactly along the curve
// parametrized by the nonlinear theta detuning u:
//
//   n_theta(u) = (W1^2/4) / (g_t^2/4 + u^2)
//   n_y(u)     = (d1 - 12 e_t (n_theta + 1) - u) / (4 e_ty)
//
// which leaves a scalar residual r(u) of the y equation on a bounded
// interval. r is scanned on a grid refined until both Lorentzian factors and
// the occupations vary by less than a set fraction between neighbours, sign
// changes are bisected, and shallow extrema are searched for hidden root
// pairs. Decoupled and undriven cases reduce to single-mode cubics.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "levdyn/model.hpp"
#include "levdyn/parallel.hpp"

namespace levdyn {

enum class Stability { stable, unstable, marginal };

inline std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "?";
}

struct SteadyBranch {
  double n_theta = 0.0;
  double n_y = 0.0;
  cplx beta_theta{};
  cplx beta_y{};
  Stability stability = Stability::stable;
  std::array<cplx, 4> jacobian_eigenvalues{};
  double residual = 0.0;
};

struct SteadyResult {
  std::vector<SteadyBranch> branches;  // sorted by (n_theta, n_y)
  bool resolution_warning = false;
};

struct SolveOptions {
  int base_points = 4096;
  /// Largest allowed relative change of u, w, n_y between grid neighbours.
  double feature_tol = 0.05;
  std::size_t max_points = 4'000'000;
  double dedup_tol = 1e-8;
  /// |max Re lambda| below marginal_tol * omega_theta counts as marginal.
  double marginal_tol = 1e-9;
  /// Residual above which a branch is not accepted for classification.
  double classify_residual_limit = 1e-8;
};

struct StabilityReport {
  Stability stability;
  std::array<cplx, 4> eigenvalues;
  double max_real;
};

/// Linear stability of a fixed point from the eigenvalues of the 4x4 flow Jacobian.
inline StabilityReport classify_stability(const SteadyBranch& b, const CoupledKerr& k, const DriveConfig& d,
                                          const SolveOptions& opt = {}) {
  if (!(b.residual <= opt.classify_residual_limit) ||
      !(steady_residual(k, d, b.n_theta, b.n_y) <= opt.classify_residual_limit))
    throw std::invalid_argument("classify_stability: branch does not satisfy the fixed-point equations");
  const Mat4 J = jacobian(k, d, pack(b.beta_theta, b.beta_y));
  Eigen::EigenSolver<Mat4> es(J, false);
  StabilityReport r{};
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    r.eigenvalues[i] = es.eigenvalues()[i];
    max_re = std::max(max_re, es.eigenvalues()[i].real());
  }
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  r.max_real = max_re;
  const double tol = opt.marginal_tol * k.frequency_scale;
  r.stability = std::abs(max_re) < tol ? Stability::marginal : (max_re < 0 ? Stability::stable : Stability::unstable);
  return r;
}

namespace detail {

/// Sign-change bisection of f on [a, b]; f(a), f(b) have opposite signs.
template <class F>
double bisect(F&& f, double a, double b, double fa) {
  for (int it = 0; it < 300; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= std::min(a, b) || m >= std::max(a, b)) break;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

/// Golden-section search for the minimum of f on [a, b].
template <class F>
double golden_min(F&& f, double a, double b, int iterations = 120) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && c < d; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

/// Non-negative roots n of n (g4 + (D - a n)^2) = c, with g4 > 0, a >= 0.
inline std::vector<double> kerr_roots(double c, double g4, double D, double a, bool* tangent = nullptr) {
  if (c <= 0.0) return {0.0};
  if (a == 0.0) return {c / (g4 + D * D)};
  auto f = [&](double n) {
    const double e = D - a * n;
    return n * (g4 + e * e) - c;
  };
  std::vector<double> knots{0.0};
  const double disc = D * D - 3.0 * g4;
  if (D > 0.0 && disc > 0.0) {
    const double s = std::sqrt(disc);
    knots.push_back((2.0 * D - s) / (3.0 * a));
    knots.push_back((2.0 * D + s) / (3.0 * a));
  }
  knots.push_back(std::max(c / g4, knots.back()) * 1.01 + 1.0);
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double fa = f(knots[i]), fb = f(knots[i + 1]);
    if (fa == 0.0) {
      roots.push_back(knots[i]);
    } else if ((fa < 0) != (fb < 0)) {
      roots.push_back(bisect(f, knots[i], knots[i + 1], fa));
    }
  }
  // double root sitting exactly on a fold
  for (std::size_t i = 1; i + 1 < knots.size(); ++i) {
    if (std::abs(f(knots[i])) <= 1e-12 * c) {
      bool dup = false;
      for (double r : roots) dup |= std::abs(r - knots[i]) <= 1e-9 * std::max(1.0, r);
      if (!dup) roots.push_back(knots[i]);
      if (tangent) *tangent = true;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// A few Newton steps on the 2x2 fixed-point system; keeps the better point.
inline void polish(const CoupledKerr& k, const DriveConfig& d, double& nt, double& ny) {
  const double c1 = 0.25 * d.omega_1 * d.omega_1, c2 = 0.25 * d.omega_2 * d.omega_2;
  const double g1 = 0.25 * k.gamma_theta * k.gamma_theta, g2 = 0.25 * k.gamma_y * k.gamma_y;
  double best = steady_residual(k, d, nt, ny);
  for (int it = 0; it < 8 && best > 1e-14; ++it) {
    const auto D = nonlinear_detunings(k, d, nt, ny);
    const double F1 = nt * (g1 + D.theta * D.theta) - c1;
    const double F2 = ny * (g2 + D.y * D.y) - c2;
    const double j11 = g1 + D.theta * D.theta - 24.0 * k.eta_theta * nt * D.theta;
    const double j12 = -8.0 * k.eta_thetay * nt * D.theta;
    const double j21 = -8.0 * k.eta_thetay * ny * D.y;
    const double j22 = g2 + D.y * D.y - 24.0 * k.eta_y * ny * D.y;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) break;
    const double tn = nt - (F1 * j22 - F2 * j12) / det;
    const double yn = ny - (j11 * F2 - j21 * F1) / det;
    if (!(tn >= 0.0) || !(yn >= 0.0)) break;
    const double r = steady_residual(k, d, tn, yn);
    if (!(r < best)) break;
    best = r;
    nt = tn;
    ny = yn;
  }
}

struct Sample {
  double u, x, y, w, r;
};

class CurveScan {
 public:
  CurveScan(const CoupledKerr& k, const DriveConfig& d, const SolveOptions& opt) : k_(k), d_(d), opt_(opt) {
    c1_ = 0.25 * d.omega_1 * d.omega_1;
    c2_ = 0.25 * d.omega_2 * d.omega_2;
    g1_ = 0.25 * k.gamma_theta * k.gamma_theta;
    g2_ = 0.25 * k.gamma_y * k.gamma_y;
  }

  Sample at(double u) const {
    Sample s;
    s.u = u;
    s.x = c1_ / (g1_ + u * u);
    s.y = (d_.delta_1 - 12.0 * k_.eta_theta * (s.x + 1.0) - u) / (4.0 * k_.eta_thetay);
    s.w = d_.delta_2 - 12.0 * k_.eta_y * (s.y + 1.0) - 4.0 * k_.eta_thetay * s.x;
    s.r = s.y * (g2_ + s.w * s.w) / c2_ - 1.0;
    return s;
  }

  /// Roots in u of the y-equation residual. Sets `warning` if resolution ran out.
  std::vector<double> roots(bool& warning) const {
    const double x_max = c1_ / g1_;
    const double y_max = c2_ / g2_;
    const double half_gt = 0.5 * k_.gamma_theta;
    const double u_hi = d_.delta_1 - 12.0 * k_.eta_theta + half_gt;
    const double u_lo = d_.delta_1 - 12.0 * k_.eta_theta * (x_max + 1.0) - 4.0 * k_.eta_thetay * y_max - half_gt;
    const double w_bound = std::abs(d_.delta_2) + 12.0 * k_.eta_y * (y_max + 1.0) + 4.0 * k_.eta_thetay * x_max;
    y_floor_ = 0.5 * c2_ / (g2_ + w_bound * w_bound);

    // base grid: half uniform in u, half uniform in the Lorentzian phase
    std::vector<double> us;
    const int n = std::max(opt_.base_points / 2, 8);
    us.reserve(2 * n + 2);
    for (int i = 0; i <= n; ++i) us.push_back(u_lo + (u_hi - u_lo) * i / n);
    const double p_lo = std::atan(u_lo / half_gt), p_hi = std::atan(u_hi / half_gt);
    for (int i = 1; i < n; ++i) us.push_back(half_gt * std::tan(p_lo + (p_hi - p_lo) * i / n));
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());

    std::vector<Sample> grid;
    grid.reserve(us.size() * 2);
    grid.push_back(at(us.front()));
    std::vector<Sample> stack;
    for (std::size_t i = 1; i < us.size(); ++i) {
      stack.push_back(at(us[i]));
      while (!stack.empty()) {
        const Sample& a = grid.back();
        const Sample b = stack.back();
        const double mid = 0.5 * (a.u + b.u);
        if (needs_split(a, b) && mid > a.u && mid < b.u) {
          if (grid.size() + stack.size() > opt_.max_points) {
            warning = true;
            grid.push_back(b);
            stack.pop_back();
            continue;
          }
          stack.push_back(at(mid));
        } else {
          grid.push_back(b);
          stack.pop_back();
        }
      }
    }

    auto r_of = [this](double u) { return at(u).r; };
    std::vector<double> found;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const auto& a = grid[i];
      const auto& b = grid[i + 1];
      if (a.r == 0.0) {
        found.push_back(a.u);
      } else if ((a.r < 0) != (b.r < 0)) {
        found.push_back(bisect(r_of, a.u, b.u, a.r));
      }
    }
    // shallow extrema without a sign change may hide a close pair of roots
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const auto& p = grid[i - 1];
      const auto& c = grid[i];
      const auto& q = grid[i + 1];
      const bool dip = c.r > 0 && c.r <= p.r && c.r <= q.r && c.r < 0.3 && p.r > 0 && q.r > 0;
      const bool bump = c.r < 0 && c.r >= p.r && c.r >= q.r && c.r > -0.3 && p.r < 0 && q.r < 0;
      if (!dip && !bump) continue;
      const double sgn = dip ? 1.0 : -1.0;
      const double um = golden_min([&](double u) { return sgn * r_of(u); }, p.u, q.u);
      const double rm = r_of(um);
      if ((rm < 0) == (c.r < 0) && rm != 0.0) {
        if (std::abs(rm) < 1e-12) {
          found.push_back(um);  // tangency at a fold
          warning = true;
        }
        continue;
      }
      found.push_back(bisect(r_of, p.u, um, p.r));
      found.push_back(bisect(r_of, um, q.u, rm));
    }
    return found;
  }

 private:
  static double rel(double a, double b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
  }

  bool needs_split(const Sample& a, const Sample& b) const {
    const double tol = opt_.feature_tol;
    if (rel(a.u, b.u, 0.5 * k_.gamma_theta) > tol) return true;
    if (a.y <= 0.0 && b.y <= 0.0) return false;
    if (rel(a.y, b.y, y_floor_) > tol) return true;
    if (rel(a.w, b.w, 0.5 * k_.gamma_y) > tol) return true;
    return false;
  }

  const CoupledKerr& k_;
  const DriveConfig& d_;
  const SolveOptions& opt_;
  double c1_, c2_, g1_, g2_;
  mutable double y_floor_ = 0.0;
};

}  // namespace detail

/// All non-negative solutions (n_theta, n_y) of the steady-state equations,
/// with amplitudes and stability.
inline SteadyResult branch_solve(const CoupledKerr& k, const DriveConfig& d, const SolveOptions& opt = {}) {
  k.validate();
  d.validate();
  SteadyResult result;
  std::vector<std::pair<double, double>> candidates;  // (n_theta, n_y)
  bool warn = false;

  const double c1 = 0.25 * d.omega_1 * d.omega_1, c2 = 0.25 * d.omega_2 * d.omega_2;
  const double g1 = 0.25 * k.gamma_theta * k.gamma_theta, g2 = 0.25 * k.gamma_y * k.gamma_y;

  if (c1 == 0.0 && c2 == 0.0) {
    candidates.emplace_back(0.0, 0.0);
  } else if (c1 == 0.0) {
    for (double ny : detail::kerr_roots(c2, g2, d.delta_2 - 12.0 * k.eta_y, 12.0 * k.eta_y, &warn))
      candidates.emplace_back(0.0, ny);
  } else if (c2 == 0.0) {
    for (double nt : detail::kerr_roots(c1, g1, d.delta_1 - 12.0 * k.eta_theta, 12.0 * k.eta_theta, &warn))
      candidates.emplace_back(nt, 0.0);
  } else if (k.eta_thetay == 0.0) {
    const auto rt = detail::kerr_roots(c1, g1, d.delta_1 - 12.0 * k.eta_theta, 12.0 * k.eta_theta, &warn);
    const auto ry = detail::kerr_roots(c2, g2, d.delta_2 - 12.0 * k.eta_y, 12.0 * k.eta_y, &warn);
    for (double nt : rt)
      for (double ny : ry) candidates.emplace_back(nt, ny);
  } else {
    detail::CurveScan scan(k, d, opt);
    for (double u : scan.roots(warn)) {
      const auto s = scan.at(u);
      if (s.y >= 0.0) candidates.emplace_back(s.x, s.y);
    }
  }

  for (auto [nt, ny] : candidates) {
    detail::polish(k, d, nt, ny);
    SteadyBranch b;
    b.n_theta = nt;
    b.n_y = ny;
    const auto D = nonlinear_detunings(k, d, nt, ny);
    b.beta_theta = fixed_amplitude(d.omega_1, k.gamma_theta, D.theta);
    b.beta_y = fixed_amplitude(d.omega_2, k.gamma_y, D.y);
    b.residual = steady_residual(k, d, nt, ny);
    bool dup = false;
    for (const auto& e : result.branches) {
      auto close = [&](double p, double q) {
        return std::abs(p - q) <= opt.dedup_tol * std::max({std::abs(p), std::abs(q), 1e-300});
      };
      if (close(e.n_theta, nt) && close(e.n_y, ny)) dup = true;
    }
    if (dup) continue;
    if (b.residual <= opt.classify_residual_limit) {
      const auto rep = classify_stability(b, k, d, opt);
      b.stability = rep.stability;
      b.jacobian_eigenvalues = rep.eigenvalues;
    } else {
      warn = true;
      b.stability = Stability::marginal;
    }
    result.branches.push_back(b);
  }
  std::sort(result.branches.begin(), result.branches.end(), [](const SteadyBranch& a, const SteadyBranch& b) {
    return a.n_theta != b.n_theta ? a.n_theta < b.n_theta : a.n_y < b.n_y;
  });
  result.resolution_warning = warn;
  return result;
}

inline SteadyResult branch_solve(const ModeParams& p, const DriveConfig& d, const SolveOptions& opt = {}) {
  return branch_solve(kerr_system(p, d.units), d, opt);
}

// ---------------------------------------------------------------------------
// Two-parameter maps.

enum class DriveParam { omega_1, omega_2, delta_1, delta_2 };

inline std::string_view to_string(DriveParam p) {
  switch (p) {
    case DriveParam::omega_1: return "omega_1";
    case DriveParam::omega_2: return "omega_2";
    case DriveParam::delta_1: return "delta_1";
    case DriveParam::delta_2: return "delta_2";
  }
  return "?";
}

inline double& drive_field(DriveConfig& d, DriveParam p) {
  switch (p) {
    case DriveParam::omega_1: return d.omega_1;
    case DriveParam::omega_2: return d.omega_2;
    case DriveParam::delta_1: return d.delta_1;
    case DriveParam::delta_2: return d.delta_2;
  }
  return d.omega_1;
}

struct SweepAxis {
  DriveParam param = DriveParam::omega_1;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  double value(std::size_t i) const {
    return count <= 1 ? min : min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
};

struct MapCell {
  double axis_1;
  double axis_2;
  SteadyResult result;
};

struct MultistabilityMap {
  SweepAxis axis_1;
  SweepAxis axis_2;
  std::vector<MapCell> cells;  // row-major: axis_1 outer, axis_2 inner

  bool any_resolution_warning() const {
    return std::any_of(cells.begin(), cells.end(), [](const MapCell& c) { return c.result.resolution_warning; });
  }
};

inline MultistabilityMap sweep(const CoupledKerr& k, const DriveConfig& base, const SweepAxis& a1,
                               const SweepAxis& a2, unsigned workers = 1, const SolveOptions& opt = {}) {
  if (a1.count == 0 || a2.count == 0) throw ConfigurationError("sweep axis with zero points");
  if (a1.param == a2.param) throw ConfigurationError("sweep axes must be different parameters");
  MultistabilityMap map{a1, a2, {}};
  map.cells.resize(a1.count * a2.count);
  parallel_for(map.cells.size(), workers, [&](std::size_t idx) {
    const std::size_t i = idx / a2.count, j = idx % a2.count;
    DriveConfig d = base;
    drive_field(d, a1.param) = a1.value(i);
    drive_field(d, a2.param) = a2.value(j);
    map.cells[idx] = MapCell{a1.value(i), a2.value(j), branch_solve(k, d, opt)};
  });
  return map;
}

}  // namespace levdyn
