#pragma once

// Adaptive Dormand-Prince 5(4) integrator with cubic Hermite dense output.
// State is any Eigen dense vector/matrix (real or complex); the error norm is
// the RMS of the componentwise scaled local error.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace levdyn::ode {

struct Options {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 = automatic
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

enum class Status { success, stopped, step_underflow, max_steps };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::success: return "success";
    case Status::stopped: return "stopped";
    case Status::step_underflow: return "step_underflow";
    case Status::max_steps: return "max_steps";
  }
  return "?";
}

/// One accepted step, handed to the observer.
template <class State>
struct Step {
  double t0;
  double t1;
  const State& y0;
  const State& y1;
  const State& f0;
  const State& f1;

  /// Cubic Hermite interpolant on [t0, t1].
  State at(double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return State(h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1);
  }
};

namespace detail {

template <class State>
double scaled_rms(const State& v, const State& a, const State& b, const Options& o) {
  const auto sc = o.abs_tol + o.rel_tol * a.array().abs().max(b.array().abs());
  const double n = static_cast<double>(v.size());
  return n == 0 ? 0.0 : std::sqrt((v.array().abs() / sc).square().sum() / n);
}

}  // namespace detail

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

/// Integrates y' = rhs(t, y) from t0 to t1 (t1 > t0), leaving the final
/// state in `y`. `on_step(const Step<State>&)` returns false to stop early.
template <class State, class Rhs, class Observer>
Status integrate(Rhs&& rhs, double t0, double t1, State& y, const Options& opt, Observer&& on_step,
                 Stats* stats = nullptr) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  Stats local;
  Stats& st = stats ? *stats : local;
  if (!(t1 > t0)) return Status::success;

  State f0 = rhs(t0, y);
  ++st.evaluations;
  double t = t0;

  double h = opt.initial_step;
  if (!(h > 0.0)) {
    const double d0 = detail::scaled_rms(y, y, y, opt);
    const double d1 = detail::scaled_rms(f0, y, y, opt);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * (t1 - t0) : 0.01 * d0 / d1;
    h0 = std::min(h0, t1 - t0);
    State y1 = y + h0 * f0;
    State f1 = rhs(t + h0, y1);
    ++st.evaluations;
    const double d2 = detail::scaled_rms(State(f1 - f0), y, y, opt) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min({h, opt.max_step, t1 - t0});

  State k2, k3, k4, k5, k6, k7, y_new, err;
  std::size_t steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps) return Status::max_steps;
    const bool last = t + h >= t1;
    if (last) h = t1 - t;
    if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
      return Status::step_underflow;

    k2 = rhs(t + c2 * h, State(y + h * (a21 * f0)));
    k3 = rhs(t + c3 * h, State(y + h * (a31 * f0 + a32 * k2)));
    k4 = rhs(t + c4 * h, State(y + h * (a41 * f0 + a42 * k2 + a43 * k3)));
    k5 = rhs(t + c5 * h, State(y + h * (a51 * f0 + a52 * k2 + a53 * k3 + a54 * k4)));
    k6 = rhs(t + h, State(y + h * (a61 * f0 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    y_new = y + h * (b1 * f0 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = rhs(t + h, y_new);
    st.evaluations += 6;
    err = h * (e1 * f0 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = detail::scaled_rms(err, y, y_new, opt);

    if (en <= 1.0 && std::isfinite(en)) {
      ++st.accepted;
      const double t_new = last ? t1 : t + h;
      const Step<State> rec{t, t_new, y, y_new, f0, k7};
      const bool keep_going = on_step(rec);
      t = t_new;
      y.swap(y_new);
      f0.swap(k7);
      if (!keep_going) return Status::stopped;
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h = std::min(h * fac, opt.max_step);
    } else {
      ++st.rejected;
      const double fac = std::isfinite(en) ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9) : 0.1;
      h *= fac;
    }
  }
  return Status::success;
}

template <class State, class Rhs>
Status integrate(Rhs&& rhs, double t0, double t1, State& y, const Options& opt, Stats* stats = nullptr) {
  return integrate(std::forward<Rhs>(rhs), t0, t1, y, opt, [](const Step<State>&) { return true; }, stats);
}

}  // namespace levdyn::ode
