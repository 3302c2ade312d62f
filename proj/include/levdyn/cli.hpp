#pragma once

// Subcommand implementations behind the levdyn executable. Each returns a
// process exit code and writes its artifacts under config.output_dir.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "levdyn/config.hpp"
#include "levdyn/cooling.hpp"
#include "levdyn/csv.hpp"
#include "levdyn/meanfield.hpp"
#include "levdyn/physics.hpp"
#include "levdyn/quantum_oracle.hpp"
#include "levdyn/steady_state.hpp"

namespace levdyn::cli {

using json = nlohmann::json;
using config::RunConfig;

enum ExitCode : int {
  ok = 0,
  failed = 1,
  schema = 2,
  physics = 3,
  no_convergence = 4,
  unwritable = 5,
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"derive", "steady", "sweep", "dynamics", "cooling", "oracle", "props"};
  return s;
}

namespace detail {

inline std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
  return std::filesystem::path(c.output_dir) / name;
}

inline void prepare_output(const RunConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.output_dir, ec);
  if (ec || !std::filesystem::is_directory(c.output_dir))
    throw OutputError("cannot create output directory " + c.output_dir);
}

inline void write_json(const RunConfig& c, const std::string& name, json doc) {
  doc["config_hash"] = c.hash;
  write_text_file(out_path(c, name), doc.dump(2) + "\n");
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json branch_json(const SteadyBranch& b) {
  json e = json::array();
  for (const auto& l : b.jacobian_eigenvalues) e.push_back(complex_json(l));
  return {{"n_theta", b.n_theta},
          {"n_y", b.n_y},
          {"beta_theta", complex_json(b.beta_theta)},
          {"beta_y", complex_json(b.beta_y)},
          {"stability", std::string(to_string(b.stability))},
          {"jacobian_eigenvalues", e},
          {"residual", b.residual}};
}

inline json drive_json(const DriveConfig& d) {
  return {{"units", std::string(to_string(d.units))},
          {"omega_1", d.omega_1},
          {"omega_2", d.omega_2},
          {"delta_1", d.delta_1},
          {"delta_2", d.delta_2}};
}

inline json params_json(const ModeParams& p) {
  return {{"mass_kg", p.mass},
          {"volume_m3", p.volume},
          {"inertia_kg_m2", p.inertia},
          {"intensity_0_w_m2", p.intensity_0},
          {"u0_mag_j", p.u0_mag},
          {"kappa_x", p.optics.kappa_x},
          {"kappa_y", p.optics.kappa_y},
          {"kappa_xy", p.optics.kappa_xy},
          {"L_a", p.optics.L_a},
          {"L_b", p.optics.L_b},
          {"omega_theta_rad_s", p.omega_theta},
          {"omega_y_rad_s", p.omega_y},
          {"eta_theta_rad_s", p.eta_theta},
          {"eta_y_rad_s", p.eta_y},
          {"eta_thetay_rad_s", p.eta_thetay},
          {"eta_1_rad_s", p.eta_1},
          {"eta_2_rad_s", p.eta_2},
          {"eta_3_rad_s", p.eta_3},
          {"gamma_theta_rad_s", p.gamma_theta},
          {"gamma_y_rad_s", p.gamma_y},
          {"nbar_theta", p.nbar_theta},
          {"nbar_y", p.nbar_y},
          {"librationally_untrapped", p.librationally_untrapped}};
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int run_derive(const RunConfig& c, std::ostream& log) {
  const ModeParams& p = c.params;
  // The comparison always uses the closed forms, whatever the run's source.
  PhysicalSetup derived = c.setup;
  derived.source = ParameterSource::derived;
  derived.eta_thetay_override.reset();
  const ModeParams d = derived.params();
  json table = json::array();
  char line[200];
  log << "quantity      derived [Hz]    reported [Hz]   ratio      within x10\n";
  for (const auto& row : compare_with_reported(d)) {
    table.push_back({{"quantity", row.name},
                     {"derived_hz", row.derived_hz},
                     {"reported_hz", row.reported_hz},
                     {"ratio", row.ratio},
                     {"within_factor_10", row.within_factor_10}});
    std::snprintf(line, sizeof line, "%-12s  %-14.6g  %-14.6g  %-9.4g  %s\n", row.name.c_str(), row.derived_hz,
                  row.reported_hz, row.ratio, row.within_factor_10 ? "yes" : "NO");
    log << line;
  }
  json report = {{"parameter_source", std::string(to_string(c.setup.source))},
                 {"mode_params", detail::params_json(p)},
                 {"derived_mode_params", detail::params_json(d)},
                 {"comparison_with_reported", table}};
  detail::write_json(c, "derive_report.json", report);

  const auto values = c.coefficients.values();
  const auto rows = coefficient_sweep(c.setup.particle, c.setup.beam, values, c.setup.derive.coupling);
  CsvWriter csv(c.hash, {"r_b_m", "eta_theta", "eta_y", "eta_thetay", "eta_1", "eta_2", "eta_3"});
  for (const auto& r : rows) {
    csv.cell(r.r_b).cell(r.eta_theta).cell(r.eta_y).cell(r.eta_thetay).cell(r.eta_1).cell(r.eta_2).cell(r.eta_3);
    csv.end_row();
  }
  write_text_file(detail::out_path(c, "coefficients.csv"), csv.text());
  return ok;
}

inline int run_steady(const RunConfig& c, std::ostream& log) {
  const auto res = branch_solve(c.kerr(), c.drive, c.solve);
  json branches = json::array();
  for (const auto& b : res.branches) branches.push_back(detail::branch_json(b));
  json report = {{"drive", detail::drive_json(c.drive)},
                 {"branch_count", res.branches.size()},
                 {"resolution_warning", res.resolution_warning},
                 {"branches", branches}};
  detail::write_json(c, "steady.json", report);
  log << res.branches.size() << " branch(es)" << (res.resolution_warning ? " [resolution warning]" : "") << "\n";
  for (const auto& b : res.branches)
    log << "  n_theta=" << format_double(b.n_theta) << " n_y=" << format_double(b.n_y) << " "
        << to_string(b.stability) << "\n";
  return ok;
}

inline std::string sweep_csv(const RunConfig& c, const MultistabilityMap& map) {
  CsvWriter csv(c.hash, {"axis1", "axis2", "branch_count", "branch_idx", "n_theta", "n_y", "stability"});
  for (const auto& cell : map.cells) {
    const auto& br = cell.result.branches;
    if (br.empty()) {
      csv.cell(cell.axis_1).cell(cell.axis_2).cell(0).cell(-1).cell("nan").cell("nan").cell("none");
      csv.end_row();
    }
    for (std::size_t i = 0; i < br.size(); ++i) {
      csv.cell(cell.axis_1).cell(cell.axis_2).cell(br.size()).cell(i).cell(br[i].n_theta).cell(br[i].n_y);
      csv.cell(to_string(br[i].stability));
      csv.end_row();
    }
  }
  return csv.text();
}

inline int run_sweep(const RunConfig& c, std::ostream& log) {
  const auto map = sweep(c.kerr(), c.drive, c.axis_1, c.axis_2, c.workers, c.solve);
  write_text_file(detail::out_path(c, "sweep.csv"), sweep_csv(c, map));
  std::size_t max_count = 0, multi = 0;
  for (const auto& cell : map.cells) {
    max_count = std::max(max_count, cell.result.branches.size());
    multi += cell.result.branches.size() >= 3;
  }
  log << map.cells.size() << " cells, " << multi << " with >= 3 branches, max " << max_count << "\n";
  if (map.any_resolution_warning()) log << "warning: some cells carry a resolution warning\n";
  return ok;
}

inline int run_dynamics(const RunConfig& c, std::ostream& log) {
  const auto k = c.kerr();
  const auto& s = c.dynamics;
  IntegrateOptions io;
  io.rel_tol = s.rel_tol;
  io.samples = s.samples;
  auto write = [&](const Trajectory& tr) {
    CsvWriter csv(c.hash, {"t", "re_beta_theta", "im_beta_theta", "re_beta_y", "im_beta_y"});
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      csv.cell(tr.times[i]).cell(tr.beta_theta[i].real()).cell(tr.beta_theta[i].imag());
      csv.cell(tr.beta_y[i].real()).cell(tr.beta_y[i].imag());
      csv.end_row();
    }
    write_text_file(detail::out_path(c, "trajectory.csv"), csv.text());
  };
  Trajectory tr;
  try {
    tr = integrate(k, c.drive, s.beta0_theta, s.beta0_y, s.t_end, io);
  } catch (const IntegrationError& e) {
    write(e.partial());
    log << "error: " << e.what() << "\n";
    return no_convergence;
  }
  const auto branches = branch_solve(k, c.drive, c.solve).branches;
  if (tr.converged)
    tr.matched_branch = match_branch(branches, std::norm(tr.beta_theta.back()), std::norm(tr.beta_y.back()), 1e-6);
  write(tr);
  json report = {{"drive", detail::drive_json(c.drive)},
                 {"t_end", s.t_end},
                 {"converged", tr.converged},
                 {"final_beta_theta", detail::complex_json(tr.beta_theta.back())},
                 {"final_beta_y", detail::complex_json(tr.beta_y.back())},
                 {"matched_branch", tr.matched_branch ? json(*tr.matched_branch) : json(nullptr)}};
  detail::write_json(c, "dynamics_report.json", report);
  log << "trajectory: " << tr.times.size() << " samples, " << (tr.converged ? "converged" : "not converged");
  if (tr.matched_branch) log << ", matched branch " << *tr.matched_branch;
  log << "\n";
  return ok;
}

inline std::string cooling_csv(const RunConfig& c, const std::vector<CoolingRow>& rows) {
  CsvWriter csv(c.hash, {"axis_value", "pressure_pa", "delta", "gamma_fb", "eta_tilde", "n_theta_out", "n_y_out", "xi"});
  for (const auto& r : rows) {
    csv.cell(r.axis_value).cell(r.pressure).cell(r.delta).cell(r.gamma_fb);
    if (r.has_branch) {
      csv.cell(r.result.eta_tilde).cell(r.result.n_theta_out).cell(r.result.n_y_out).cell(r.result.xi);
    } else {
      for (int i = 0; i < 4; ++i) csv.cell("no_stable_branch");
    }
    csv.end_row();
  }
  return csv.text();
}

inline int run_cooling(const RunConfig& c, std::ostream& log) {
  const auto scenario = c.cooling_scenario();
  const auto row = evaluate_cooling(scenario, 0.0, c.solve);
  json point = {{"drive", detail::drive_json(c.drive)},
                {"delta", scenario.delta},
                {"gamma_fb", scenario.gamma_fb},
                {"has_stable_branch", row.has_branch}};
  if (row.has_branch) {
    const auto k = c.kerr();
    const auto eff = effective_detunings(k, c.drive, row.branch);
    point["branch"] = detail::branch_json(row.branch);
    point["effective_detunings"] = {{"delta_eff_1", eff.eff_1}, {"delta_eff_2", eff.eff_2}, {"delta", eff.delta}};
    point["tms_coupling"] = tms_coupling(k, row.branch).g;
    point["result"] = {{"eta_tilde", row.result.eta_tilde},
                       {"n_theta_out", row.result.n_theta_out},
                       {"n_y_out", row.result.n_y_out},
                       {"xi", row.result.xi}};
    log << "operating point: xi = " << format_double(row.result.xi) << "\n";
  } else {
    log << "operating point: no stable branch\n";
  }
  detail::write_json(c, "cooling_report.json", point);

  for (const auto& sp : c.cooling.sweeps) {
    std::vector<CoolingRow> rows;
    const CoolingAxisSpec axis{sp.axis, sp.values};
    if (sp.pressures.empty()) {
      rows = cooling_sweep(scenario, axis, c.workers, c.solve);
    } else {
      for (double p : sp.pressures) {
        CoolingScenario s = scenario;
        s.setup = s.setup.at_pressure(p);
        const auto part = cooling_sweep(s, axis, c.workers, c.solve);
        rows.insert(rows.end(), part.begin(), part.end());
      }
    }
    write_text_file(detail::out_path(c, "cooling_" + sp.name + ".csv"), cooling_csv(c, rows));
    const auto missing = std::count_if(rows.begin(), rows.end(), [](const CoolingRow& r) { return !r.has_branch; });
    log << "sweep " << sp.name << ": " << rows.size() << " rows";
    if (missing) log << " (" << missing << " without a stable branch)";
    log << "\n";
  }
  return ok;
}

// ---------------------------------------------------------------------------

struct OracleRun {
  json report;
  bool converged = true;
};

inline json expectations_json(const oracle::Expectations& e) {
  return {{"n_theta", e.n_theta},
          {"n_y", e.n_y},
          {"b_theta", detail::complex_json(e.b_theta)},
          {"b_y", detail::complex_json(e.b_y)}};
}

inline json diagnostics_json(const oracle::Diagnostics& d) {
  return {{"trace_error", d.trace_error},
          {"hermiticity", d.hermiticity},
          {"min_diagonal", d.min_diagonal},
          {"leakage_theta", d.leakage_theta},
          {"leakage_y", d.leakage_y},
          {"truncation_ok", d.truncation_ok}};
}

/// Beam-splitter steady state against the closed-form occupations.
inline OracleRun oracle_beam_splitter(const config::OracleSpec& s) {
  const auto& t = s.beam_splitter;
  const auto gen = oracle::build_bs_generator(t.delta, t.g, t.gamma_theta, t.gamma_y, t.nbar_theta, t.nbar_y,
                                              s.truncation);
  oracle::EvolveOptions eo;
  eo.tol = s.tol;
  const double slow = std::min(t.gamma_theta, t.gamma_y);
  const auto run = oracle::relax_to_steady_state(gen, oracle::thermal_state(s.truncation, t.nbar_theta, t.nbar_y),
                                                 2.0 / slow, 400.0 / slow, 1e-8, eo);
  ExchangeParams ep{t.gamma_theta, t.gamma_y, t.g * t.g / 16.0, t.delta, 0.0};
  const auto closed = occupations(ep, Baths{t.nbar_theta, t.nbar_y});
  const double rel = std::abs(run.values.n_y - closed.n_y_out) / closed.n_y_out;
  const double balance = std::abs(t.gamma_theta * (run.values.n_theta - t.nbar_theta) -
                                  t.gamma_y * (t.nbar_y - run.values.n_y));
  OracleRun r;
  r.converged = run.converged;
  r.report = {{"flavor", "beam_splitter"},
              {"parameters",
               {{"gamma_theta", t.gamma_theta},
                {"gamma_y", t.gamma_y},
                {"nbar_theta", t.nbar_theta},
                {"nbar_y", t.nbar_y},
                {"delta", t.delta},
                {"g", t.g}}},
              {"final", expectations_json(run.values)},
              {"diagnostics", diagnostics_json(run.diagnostics)},
              {"relaxation_time", run.time},
              {"converged", run.converged},
              {"closed_form", {{"n_theta", closed.n_theta_out}, {"n_y", closed.n_y_out}, {"eta_tilde", closed.eta_tilde}}},
              {"n_y_relative_error", rel},
              {"excitation_balance_residual", balance}};
  return r;
}

/// Coherent amplitudes of the full RWA model against the mean-field flow.
inline OracleRun oracle_mean_field(const config::OracleSpec& s, std::size_t samples = 51) {
  const auto& t = s.mean_field;
  const auto gen = oracle::build_rwa_generator(t.kerr, t.drive, 0.0, 0.0, s.truncation);
  const double duration = t.damping_times / std::min(t.kerr.gamma_theta, t.kerr.gamma_y);
  std::vector<double> times(samples);
  for (std::size_t i = 0; i < samples; ++i) times[i] = duration * double(i) / double(samples - 1);
  std::vector<oracle::Expectations> q;
  oracle::EvolveOptions eo;
  eo.tol = s.tol;
  const auto final_state = oracle::evolve(gen, oracle::vacuum(s.truncation), duration, eo, times,
                                          [&](double, const oracle::FockState& st) { q.push_back(oracle::expectations(st)); });
  IntegrateOptions io;
  io.rel_tol = 1e-10;
  io.samples = samples;
  const auto mf = integrate(t.kerr, t.drive, 0.0, 0.0, duration, io);
  double err_t = 0.0, err_y = 0.0, scale_t = 0.0, scale_y = 0.0;
  for (std::size_t i = 0; i < samples && i < q.size(); ++i) {
    err_t = std::max(err_t, std::abs(q[i].b_theta - mf.beta_theta[i]));
    err_y = std::max(err_y, std::abs(q[i].b_y - mf.beta_y[i]));
    scale_t = std::max(scale_t, std::abs(mf.beta_theta[i]));
    scale_y = std::max(scale_y, std::abs(mf.beta_y[i]));
  }
  const auto dg = oracle::diagnose(final_state);
  OracleRun r;
  r.converged = dg.truncation_ok && q.size() == samples;
  r.report = {{"flavor", "rwa"},
              {"parameters",
               {{"gamma_theta", t.kerr.gamma_theta},
                {"gamma_y", t.kerr.gamma_y},
                {"eta_theta", t.kerr.eta_theta},
                {"eta_y", t.kerr.eta_y},
                {"eta_thetay", t.kerr.eta_thetay},
                {"drive", detail::drive_json(t.drive)},
                {"duration", duration}}},
              {"final", expectations_json(oracle::expectations(final_state))},
              {"final_mean_field", {{"beta_theta", detail::complex_json(mf.beta_theta.back())},
                                    {"beta_y", detail::complex_json(mf.beta_y.back())}}},
              {"diagnostics", diagnostics_json(dg)},
              {"converged", r.converged},
              {"b_theta_relative_error", scale_t > 0 ? err_t / scale_t : err_t},
              {"b_y_relative_error", scale_y > 0 ? err_y / scale_y : err_y}};
  return r;
}

inline int run_oracle(const RunConfig& c, std::ostream& log) {
  const auto bs = oracle_beam_splitter(c.oracle);
  const auto mf = oracle_mean_field(c.oracle);
  json report = {{"truncation", {c.oracle.truncation.theta, c.oracle.truncation.y}},
                 {"tol", c.oracle.tol},
                 {"runs", json::array({bs.report, mf.report})}};
  detail::write_json(c, "oracle_report.json", report);
  log << "beam splitter: n_y rel. error vs closed form " << format_double(bs.report["n_y_relative_error"].get<double>())
      << (bs.converged ? "" : " [unconverged]") << "\n";
  log << "mean field: <b> rel. error " << format_double(mf.report["b_theta_relative_error"].get<double>()) << " / "
      << format_double(mf.report["b_y_relative_error"].get<double>()) << (mf.converged ? "" : " [unconverged]")
      << "\n";
  return bs.converged && mf.converged ? ok : no_convergence;
}

// ---------------------------------------------------------------------------
// Seeded randomized property checks.

struct PropertyOutcome {
  std::string name;
  std::size_t samples;
  double worst;
  double limit;
  bool pass() const { return worst <= limit; }
};

inline std::vector<PropertyOutcome> property_checks(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto loguni = [&](double a, double b) { return std::exp(uni(std::log(a), std::log(b))); };
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };

  std::vector<PropertyOutcome> out;
  double w_id = 0.0, w_dep = 0.0, w_freq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ParticleGeometry g;
    g.r_a = loguni(20e-9, 200e-9);
    g.r_b = g.r_a / loguni(1.0001, 10.0);
    g.density = uni(1000.0, 5000.0);
    g.relative_permittivity = uni(1.5, 12.0);
    TrapBeam b{loguni(0.01, 1.0), loguni(0.4e-6, 2e-6)};
    const auto p = derive_mode_params(g, b, Environment{}, {});
    w_id = std::max({w_id, rel(p.eta_theta * 24.0 * p.inertia, kHbar), rel(p.eta_y * 8.0 * p.mass * b.waist * b.waist, kHbar)});
    w_freq = std::max({w_freq, rel(p.inertia * p.omega_theta * p.omega_theta, 2.0 * p.u0_mag * p.optics.kappa_xy),
                       rel(p.mass * p.omega_y * p.omega_y, 4.0 * p.u0_mag * p.optics.kappa_x / (b.waist * b.waist))});
    const auto L = depolarization_factors(loguni(1.0, 100.0));
    w_dep = std::max(w_dep, std::abs(L.L_a + 2.0 * L.L_b - 1.0));
  }
  out.push_back({"quartic_identities", n, w_id, 1e-12});
  out.push_back({"frequency_identities", n, w_freq, 1e-12});
  out.push_back({"depolarization_closure", n, w_dep, 1e-12});

  double w_heat = 0.0, w_fb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ExchangeParams e{loguni(1e-3, 1e3), loguni(1e-3, 1e3), loguni(1e-8, 1e4), uni(-100.0, 100.0), 0.0};
    Baths baths{loguni(1e-3, 1e8), loguni(1e-3, 1e8)};
    const auto r = occupations(e, baths);
    const double scale = e.gamma_y * baths.nbar_y + e.gamma_theta * baths.nbar_theta;
    w_heat = std::max(w_heat, std::abs(e.gamma_y * (baths.nbar_y - r.n_y_out) -
                                       e.gamma_theta * (r.n_theta_out - baths.nbar_theta)) / scale);
    CoupledKerr k{e.gamma_theta, e.gamma_y, 0.0, 0.0, 1.0, 1.0};
    SteadyBranch br;
    br.n_theta = 1.0;
    br.n_y = e.coupling_sq;
    CoolingConfig cc{e.delta, 0.0, br, baths};
    const auto a = steady_occupations(k, cc), f = feedback_occupation(k, cc);
    const bool same = a.n_y_out == f.n_y_out && a.n_theta_out == f.n_theta_out && a.xi == f.xi;
    w_fb = std::max(w_fb, same ? 0.0 : 1.0);
  }
  out.push_back({"heat_flow_balance", n, w_heat, 1e-12});
  out.push_back({"feedback_reduction_bitwise", n, w_fb, 0.0});

  const std::size_t n_solve = std::max<std::size_t>(1, n / 20);
  double w_blue = 0.0, w_jac = 0.0;
  for (std::size_t i = 0; i < n_solve; ++i) {
    const double et = loguni(1e-4, 1e-1), ey = loguni(1e-4, 1e-1);
    const double ety = uni(0.0, 3.0) * std::sqrt(et * ey);  // eta_ty^2 <= 9 eta_t eta_y
    CoupledKerr k{loguni(0.1, 10.0), loguni(0.1, 10.0), et, ey, ety, 1.0};
    DriveConfig d{loguni(0.01, 20.0), loguni(0.01, 20.0), -loguni(0.01, 10.0), -loguni(0.01, 10.0), Units::normalized};
    const auto res = branch_solve(k, d);
    const bool good = res.branches.size() == 1 && res.branches[0].stability == Stability::stable;
    w_blue = std::max(w_blue, good ? 0.0 : 1.0);

    const Vec4 s{uni(-3, 3), uni(-3, 3), uni(-3, 3), uni(-3, 3)};
    const Mat4 J = jacobian(k, d, s);
    double jmax = J.cwiseAbs().maxCoeff(), diff = 0.0;
    for (int col = 0; col < 4; ++col) {
      const double h = 1e-6 * std::max(1.0, std::abs(s[col]));
      Vec4 sp = s, sm = s;
      sp[col] += h;
      sm[col] -= h;
      const Vec4 fd = (flow(k, d, sp) - flow(k, d, sm)) / (2.0 * h);
      diff = std::max(diff, (fd - J.col(col)).cwiseAbs().maxCoeff());
    }
    w_jac = std::max(w_jac, diff / jmax);
  }
  out.push_back({"blue_blue_unique_stable", n_solve, w_blue, 0.0});
  out.push_back({"jacobian_finite_difference", n_solve, w_jac, 1e-6});
  return out;
}

inline int run_props(const RunConfig& c, std::ostream& log) {
  const auto outcomes = property_checks(c.props.seed, c.props.samples);
  std::string text = "# config_hash=" + c.hash + "\n# seed=" + std::to_string(c.props.seed) + "\n";
  bool all = true;
  for (const auto& o : outcomes) {
    char line[200];
    std::snprintf(line, sizeof line, "%s %s samples=%zu worst=%.3e limit=%.1e\n", o.pass() ? "PASS" : "FAIL",
                  o.name.c_str(), o.samples, o.worst, o.limit);
    text += line;
    all = all && o.pass();
  }
  write_text_file(detail::out_path(c, "props_report.txt"), text);
  log << text;
  return all ? ok : failed;
}

// ---------------------------------------------------------------------------

/// Runs one subcommand; exceptions are mapped to exit codes.
inline int execute(const RunConfig& c, const std::string& subcommand, std::ostream& log = std::cout,
                   std::ostream& err = std::cerr) {
  try {
    detail::prepare_output(c);
    if (subcommand == "derive") return run_derive(c, log);
    if (subcommand == "steady") return run_steady(c, log);
    if (subcommand == "sweep") return run_sweep(c, log);
    if (subcommand == "dynamics") return run_dynamics(c, log);
    if (subcommand == "cooling") return run_cooling(c, log);
    if (subcommand == "oracle") return run_oracle(c, log);
    if (subcommand == "props") return run_props(c, log);
    err << "error: unknown subcommand '" << subcommand << "'\n";
    return schema;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << "\n";
    return unwritable;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return no_convergence;
  } catch (const IntegrationError& e) {
    err << "error: " << e.what() << "\n";
    return no_convergence;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << "\n";
    return schema;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return physics;
  }
}

}  // namespace levdyn::cli
