#pragma once

// Truncated-Fock Lindblad evolution of the two modes. Reference oracle for the
// mean-field equations and the closed-form cooling occupations at toy scale.
//
// Basis index i = a * N_y + b for |a>_theta |b>_y. The density matrix is
// dense; the ladder operators are Eigen sparse matrices.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "levdyn/constants.hpp"
#include "levdyn/model.hpp"
#include "levdyn/ode.hpp"

namespace levdyn::oracle {

using SpMat = Eigen::SparseMatrix<cplx>;
using Dense = Eigen::MatrixXcd;

struct Truncation {
  int theta = 8;
  int y = 8;
  int dim() const { return theta * y; }
};

struct FockState {
  Truncation truncation;
  Dense rho;
};

struct Dissipator {
  SpMat op;
  double rate;  // rho' += rate (c rho c^+ - {c^+ c, rho}/2)
};

enum class Flavor { rwa, beam_splitter };

class Generator {
 public:
  Generator(Truncation t, SpMat hamiltonian, std::vector<Dissipator> dissipators, Flavor flavor)
      : truncation_(t), hamiltonian_(std::move(hamiltonian)), dissipators_(std::move(dissipators)), flavor_(flavor) {
    for (const auto& d : dissipators_)
      if (!(d.rate >= 0.0)) throw DomainError("dissipator rates must be non-negative");
    h_eff_ = hamiltonian_;
    for (const auto& d : dissipators_) {
      SpMat cdc = SpMat(d.op.adjoint()) * d.op;
      h_eff_ -= cplx(0.0, 0.5 * d.rate) * cdc;
    }
    h_eff_.makeCompressed();
    h_eff_adj_ = SpMat(h_eff_.adjoint());
    for (const auto& d : dissipators_) adjoints_.push_back(SpMat(d.op.adjoint()));
  }

  const Truncation& truncation() const { return truncation_; }
  const SpMat& hamiltonian() const { return hamiltonian_; }
  const std::vector<Dissipator>& dissipators() const { return dissipators_; }
  Flavor flavor() const { return flavor_; }

  /// d rho / dt. Written in the linear form so non-Hermitian roundoff stays bounded.
  Dense apply(const Dense& rho) const {
    Dense out = cplx(0.0, -1.0) * (h_eff_ * rho);
    out.noalias() += cplx(0.0, 1.0) * (rho * h_eff_adj_);
    for (std::size_t k = 0; k < dissipators_.size(); ++k) {
      if (dissipators_[k].rate == 0.0) continue;
      Dense m = dissipators_[k].op * rho;
      out.noalias() += dissipators_[k].rate * (m * adjoints_[k]);
    }
    return out;
  }

 private:
  Truncation truncation_;
  SpMat hamiltonian_;
  std::vector<Dissipator> dissipators_;
  Flavor flavor_;
  SpMat h_eff_;
  SpMat h_eff_adj_;
  std::vector<SpMat> adjoints_;
};

// ---------------------------------------------------------------------------
// Operators

inline SpMat annihilation(const Truncation& t, Mode mode) {
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int a = 0; a < t.theta; ++a) {
    for (int b = 0; b < t.y; ++b) {
      const int col = a * t.y + b;
      if (mode == Mode::theta && a > 0) trip.emplace_back((a - 1) * t.y + b, col, std::sqrt(double(a)));
      if (mode == Mode::y && b > 0) trip.emplace_back(a * t.y + (b - 1), col, std::sqrt(double(b)));
    }
  }
  SpMat m(t.dim(), t.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

/// Diagonal operator f(n_theta, n_y).
template <class F>
SpMat diagonal(const Truncation& t, F&& f) {
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int a = 0; a < t.theta; ++a)
    for (int b = 0; b < t.y; ++b) trip.emplace_back(a * t.y + b, a * t.y + b, f(double(a), double(b)));
  SpMat m(t.dim(), t.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

inline std::vector<Dissipator> thermal_dissipators(const Truncation& t, double gamma_theta, double nbar_theta,
                                                   double gamma_y, double nbar_y) {
  const SpMat bt = annihilation(t, Mode::theta), by = annihilation(t, Mode::y);
  return {{bt, gamma_theta * (1.0 + nbar_theta)},
          {SpMat(bt.adjoint()), gamma_theta * nbar_theta},
          {by, gamma_y * (1.0 + nbar_y)},
          {SpMat(by.adjoint()), gamma_y * nbar_y}};
}

inline void check_truncation(const Truncation& t) {
  if (t.theta < 4 || t.y < 4) throw DomainError("truncation must keep at least 4 levels per mode");
}

/// Rotating-frame Kerr Hamiltonian with coherent drives and thermal damping.
/// Detunings follow the steady-state convention Delta = omega_t - omega_l - 2 eta_thetay.
inline Generator build_rwa_generator(const CoupledKerr& k, const DriveConfig& d, double nbar_theta, double nbar_y,
                                     Truncation t) {
  check_truncation(t);
  const SpMat bt = annihilation(t, Mode::theta), by = annihilation(t, Mode::y);
  // b^+2 b^2 + b^2 b^+2 = 2n^2 + 2n + 2, applied as an exact diagonal
  SpMat h = diagonal(t, [&](double a, double b) {
    return cplx(d.delta_1 * a + d.delta_2 * b - 3.0 * k.eta_theta * (2 * a * a + 2 * a + 2) -
                    3.0 * k.eta_y * (2 * b * b + 2 * b + 2) - 4.0 * k.eta_thetay * a * b,
                0.0);
  });
  h += cplx(0.5 * d.omega_1) * SpMat(bt + SpMat(bt.adjoint()));
  h += cplx(0.5 * d.omega_2) * SpMat(by + SpMat(by.adjoint()));
  return Generator(t, h, thermal_dissipators(t, k.gamma_theta, nbar_theta, k.gamma_y, nbar_y), Flavor::rwa);
}

/// H = -delta b_y^+ b_y - g (b_t^+ b_y + b_y^+ b_t) with thermal damping.
inline Generator build_bs_generator(double delta, double g, double gamma_theta, double gamma_y, double nbar_theta,
                                    double nbar_y, Truncation t) {
  check_truncation(t);
  if (!(g >= 0.0)) throw DomainError("beam-splitter coupling must be non-negative");
  const SpMat bt = annihilation(t, Mode::theta), by = annihilation(t, Mode::y);
  SpMat h = diagonal(t, [&](double, double b) { return cplx(-delta * b, 0.0); });
  SpMat hop = SpMat(bt.adjoint()) * by;
  h -= cplx(g) * SpMat(hop + SpMat(hop.adjoint()));
  return Generator(t, h, thermal_dissipators(t, gamma_theta, nbar_theta, gamma_y, nbar_y), Flavor::beam_splitter);
}

// ---------------------------------------------------------------------------
// States and observables

inline FockState product_state(Truncation t, const Eigen::VectorXcd& psi_theta, const Eigen::VectorXcd& psi_y) {
  Eigen::VectorXcd psi(t.dim());
  for (int a = 0; a < t.theta; ++a)
    for (int b = 0; b < t.y; ++b) psi[a * t.y + b] = psi_theta[a] * psi_y[b];
  psi /= psi.norm();
  return {t, psi * psi.adjoint()};
}

inline Eigen::VectorXcd fock_vector(int levels, int n) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(levels);
  v[n] = 1.0;
  return v;
}

inline Eigen::VectorXcd coherent_vector(int levels, cplx alpha) {
  Eigen::VectorXcd v(levels);
  cplx c = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < levels; ++n) {
    v[n] = c;
    c *= alpha / std::sqrt(double(n + 1));
  }
  return v / v.norm();
}

inline FockState vacuum(Truncation t) { return product_state(t, fock_vector(t.theta, 0), fock_vector(t.y, 0)); }

/// Product of truncated, renormalized thermal distributions.
inline FockState thermal_state(Truncation t, double nbar_theta, double nbar_y) {
  auto dist = [](int levels, double nbar) {
    Eigen::VectorXd p(levels);
    const double q = nbar / (1.0 + nbar);
    double w = 1.0;
    for (int n = 0; n < levels; ++n, w *= q) p[n] = w;
    return Eigen::VectorXd(p / p.sum());
  };
  const auto pt = dist(t.theta, nbar_theta), py = dist(t.y, nbar_y);
  FockState s{t, Dense::Zero(t.dim(), t.dim())};
  for (int a = 0; a < t.theta; ++a)
    for (int b = 0; b < t.y; ++b) s.rho(a * t.y + b, a * t.y + b) = pt[a] * py[b];
  return s;
}

struct Expectations {
  double n_theta = 0.0;
  double n_y = 0.0;
  cplx b_theta{};
  cplx b_y{};
};

inline Expectations expectations(const FockState& s) {
  const auto& t = s.truncation;
  Expectations e;
  for (int a = 0; a < t.theta; ++a) {
    for (int b = 0; b < t.y; ++b) {
      const int i = a * t.y + b;
      const double p = s.rho(i, i).real();
      e.n_theta += a * p;
      e.n_y += b * p;
      // tr(b rho) = sum <i-1| b |i> rho(i, i-1)
      if (a > 0) e.b_theta += std::sqrt(double(a)) * s.rho(i, (a - 1) * t.y + b);
      if (b > 0) e.b_y += std::sqrt(double(b)) * s.rho(i, a * t.y + (b - 1));
    }
  }
  return e;
}

struct Diagnostics {
  double trace_error;      // |tr rho - 1|
  double hermiticity;      // max |rho - rho^+|
  double min_diagonal;
  double leakage_theta;    // population in the top two theta levels
  double leakage_y;
  bool truncation_ok;      // both leakages <= 1%
};

inline Diagnostics diagnose(const FockState& s) {
  const auto& t = s.truncation;
  Diagnostics d{};
  d.trace_error = std::abs(s.rho.trace() - cplx(1.0));
  d.hermiticity = (s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff();
  d.min_diagonal = s.rho.diagonal().real().minCoeff();
  for (int a = 0; a < t.theta; ++a) {
    for (int b = 0; b < t.y; ++b) {
      const double p = s.rho(a * t.y + b, a * t.y + b).real();
      if (a >= t.theta - 2) d.leakage_theta += p;
      if (b >= t.y - 2) d.leakage_y += p;
    }
  }
  d.truncation_ok = d.leakage_theta <= 0.01 && d.leakage_y <= 0.01;
  return d;
}

// ---------------------------------------------------------------------------
// Evolution

struct EvolveOptions {
  double tol = 1e-9;
  std::size_t max_steps = 5'000'000;
};

/// Propagates rho over `duration`; `on_sample(t, state)` runs at each of the
/// requested sample times (relative to the start, ascending, within duration).
template <class OnSample>
FockState evolve(const Generator& g, FockState state, double duration, const EvolveOptions& eo,
                 const std::vector<double>& sample_times, OnSample&& on_sample) {
  if (state.truncation.theta != g.truncation().theta || state.truncation.y != g.truncation().y)
    throw DomainError("state and generator truncations differ");
  if (!(duration >= 0.0)) throw DomainError("duration must be non-negative");
  std::size_t next = 0;
  while (next < sample_times.size() && sample_times[next] <= 0.0) on_sample(sample_times[next++], state);
  if (duration == 0.0) return state;
  ode::Options o;
  o.rel_tol = eo.tol;
  o.abs_tol = eo.tol;
  o.max_steps = eo.max_steps;
  auto rhs = [&](double, const Dense& r) { return g.apply(r); };
  auto obs = [&](const ode::Step<Dense>& st) {
    while (next < sample_times.size() && sample_times[next] <= st.t1) {
      const double ts = sample_times[next++];
      on_sample(ts, FockState{state.truncation, ts == st.t1 ? st.y1 : st.at(ts)});
    }
    return true;
  };
  const auto status = ode::integrate(rhs, 0.0, duration, state.rho, o, obs);
  if (status != ode::Status::success) {
    const auto dg = diagnose(state);
    throw ConvergenceError(std::string("Lindblad evolution failed (") + ode::to_string(status) +
                           "), trace error " + std::to_string(dg.trace_error));
  }
  state.rho = 0.5 * (state.rho + state.rho.adjoint()).eval();
  return state;
}

inline FockState evolve(const Generator& g, FockState state, double duration, const EvolveOptions& eo = {}) {
  return evolve(g, std::move(state), duration, eo, {}, [](double, const FockState&) {});
}

struct SteadyStateRun {
  FockState state;
  Expectations values;
  Diagnostics diagnostics;
  double time;
  bool converged;
};

/// Long-time integration in chunks until the occupations change by less than
/// `change_tol` (relative) over one chunk.
inline SteadyStateRun relax_to_steady_state(const Generator& g, FockState state, double chunk, double max_time,
                                            double change_tol = 1e-8, const EvolveOptions& eo = {}) {
  double t = 0.0;
  Expectations prev = expectations(state);
  bool converged = false;
  while (t < max_time) {
    state = evolve(g, std::move(state), chunk, eo);
    t += chunk;
    const auto cur = expectations(state);
    const double scale = std::max({1e-12, std::abs(cur.n_theta), std::abs(cur.n_y)});
    const double change = std::max(std::abs(cur.n_theta - prev.n_theta), std::abs(cur.n_y - prev.n_y)) / scale;
    prev = cur;
    if (change < change_tol) {
      converged = true;
      break;
    }
  }
  const auto dg = diagnose(state);
  return {state, prev, dg, t, converged && dg.truncation_ok};
}

}  // namespace levdyn::oracle
