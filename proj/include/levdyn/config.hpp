#pragma once

// Run configuration: a JSON document with nested blocks, validated before use.
// Unknown keys and type mismatches are schema errors; values that violate a
// physical invariant are physics errors. Every value read (given or
// defaulted) is echoed into `resolved`, whose canonical dump feeds the
// config hash written on each CSV.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "levdyn/cooling.hpp"
#include "levdyn/csv.hpp"
#include "levdyn/quantum_oracle.hpp"
#include "levdyn/setup.hpp"
#include "levdyn/steady_state.hpp"

namespace levdyn::config {

using json = nlohmann::json;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Walks one JSON object, recording consumed keys and echoing values.
class Reader {
 public:
  Reader(const json& in, json& out, std::string path) : in_(in), out_(out), path_(std::move(path)) {
    if (!in_.is_null() && !in_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    if (!out_.is_object()) out_ = json::object();
  }

  bool has(const std::string& key) const { return in_.is_object() && in_.contains(key) && !in_.at(key).is_null(); }

  double number(const std::string& key, double def) {
    const double v = has(key) ? as_number(key) : def;
    mark(key);
    out_[key] = v;
    return v;
  }

  std::optional<double> optional_number(const std::string& key) {
    mark(key);
    if (!has(key)) {
      out_[key] = nullptr;
      return std::nullopt;
    }
    const double v = as_number(key);
    out_[key] = v;
    return v;
  }

  std::size_t count(const std::string& key, std::size_t def) {
    mark(key);
    std::size_t v = def;
    if (has(key)) {
      const auto& j = in_.at(key);
      if (!j.is_number_integer() || j.get<long long>() < 0) fail(at(key), "expected a non-negative integer");
      v = j.get<std::size_t>();
    }
    out_[key] = v;
    return v;
  }

  bool flag(const std::string& key, bool def) {
    mark(key);
    bool v = def;
    if (has(key)) {
      if (!in_.at(key).is_boolean()) fail(at(key), "expected true or false");
      v = in_.at(key).get<bool>();
    }
    out_[key] = v;
    return v;
  }

  std::string choice(const std::string& key, const std::string& def, std::initializer_list<const char*> allowed) {
    mark(key);
    std::string v = def;
    if (has(key)) {
      if (!in_.at(key).is_string()) fail(at(key), "expected a string");
      v = in_.at(key).get<std::string>();
      bool ok = false;
      std::string list;
      for (const char* a : allowed) {
        ok = ok || v == a;
        list += std::string(list.empty() ? "" : ", ") + a;
      }
      if (!ok) fail(at(key), "must be one of: " + list);
    }
    out_[key] = v;
    return v;
  }

  std::string text(const std::string& key, const std::string& def) {
    mark(key);
    std::string v = def;
    if (has(key)) {
      if (!in_.at(key).is_string()) fail(at(key), "expected a string");
      v = in_.at(key).get<std::string>();
    }
    out_[key] = v;
    return v;
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& def) {
    mark(key);
    std::vector<double> v = def;
    if (has(key)) {
      const auto& j = in_.at(key);
      if (!j.is_array()) fail(at(key), "expected an array of numbers");
      v.clear();
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number() || !std::isfinite(j[i].get<double>()))
          fail(at(key) + "[" + std::to_string(i) + "]", "expected a finite number");
        v.push_back(j[i].get<double>());
      }
    }
    out_[key] = v;
    return v;
  }

  /// Nested object; absent or null reads as empty.
  Reader child(const std::string& key) {
    mark(key);
    static const json empty = json::object();
    return Reader(has(key) ? in_.at(key) : empty, out_[key], at(key));
  }

  /// Array of objects.
  std::vector<json> objects(const std::string& key, const std::vector<json>& def) {
    mark(key);
    if (!has(key)) return def;
    if (!in_.at(key).is_array()) fail(at(key), "expected an array of objects");
    return in_.at(key).get<std::vector<json>>();
  }

  json& out() { return out_; }
  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  /// Rejects every key that was never asked for.
  void finish() const {
    if (!in_.is_object()) return;
    for (auto it = in_.begin(); it != in_.end(); ++it)
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw SchemaError(where + ": " + what);
  }

 private:
  double as_number(const std::string& key) const {
    const auto& j = in_.at(key);
    if (!j.is_number()) fail(at(key), "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(at(key), "expected a finite number");
    return v;
  }
  void mark(const std::string& key) { seen_.insert(key); }

  const json& in_;
  json& out_;
  std::string path_;
  std::set<std::string> seen_;
};

// ---------------------------------------------------------------------------

struct CoefficientSpec {
  double r_b_min = 5e-9;
  double r_b_max = 50e-9;
  std::size_t count = 46;

  std::vector<double> values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
      v[i] = count == 1 ? r_b_min : r_b_min + (r_b_max - r_b_min) * double(i) / double(count - 1);
    if (count > 1) v.back() = r_b_max;
    return v;
  }
};

struct DynamicsSpec {
  cplx beta0_theta{};
  cplx beta0_y{};
  double t_end = 0.0;  // drive time units; resolved at parse time
  std::size_t samples = 201;
  double rel_tol = 1e-8;
};

struct CoolingSweepSpec {
  std::string name;
  CoolingAxis axis = CoolingAxis::delta;
  std::vector<double> values;
  std::vector<double> pressures;  // empty: the environment pressure only
};

struct CoolingSpec {
  double delta = 0.0;
  double gamma_fb = 0.0;
  bool resolve_branch_with_feedback = false;
  std::vector<CoolingSweepSpec> sweeps;
};

struct BeamSplitterToy {
  double gamma_theta = 1.0, gamma_y = 1.0;
  double nbar_theta = 0.0, nbar_y = 1.0;
  double delta = 0.0, g = 0.1;
};

struct MeanFieldToy {
  CoupledKerr kerr{1.0, 1.0, 0.01, 0.005, 0.005, 1.0};
  DriveConfig drive{1.5, 1.0, 0.5, -0.3, Units::normalized};
  double damping_times = 5.0;
};

struct OracleSpec {
  oracle::Truncation truncation{12, 12};
  double tol = 1e-9;
  BeamSplitterToy beam_splitter;
  MeanFieldToy mean_field;
};

struct PropsSpec {
  std::size_t samples = 1000;
  std::uint64_t seed = 12345;
};

struct RunConfig {
  PhysicalSetup setup;
  ModeParams params;  // setup.params() at parse time
  DriveConfig drive;
  SolveOptions solve;
  SweepAxis axis_1{DriveParam::omega_1, 0.0015, 0.15, 100};
  SweepAxis axis_2{DriveParam::omega_2, 0.0015, 0.15, 100};
  CoefficientSpec coefficients;
  DynamicsSpec dynamics;
  CoolingSpec cooling;
  OracleSpec oracle;
  PropsSpec props;
  std::string output_dir = "out";
  unsigned workers = 1;
  json resolved;
  std::string hash;

  CoupledKerr kerr() const { return kerr_system(params, drive.units); }

  CoolingScenario cooling_scenario() const {
    return {setup, drive, cooling.delta, cooling.gamma_fb, cooling.resolve_branch_with_feedback};
  }
};

// ---------------------------------------------------------------------------

namespace detail {

inline double rate_factor(const std::string& unit) { return unit == "hz" ? kTwoPi : 1.0; }

inline std::optional<DriveParam> drive_param(const std::string& s) {
  if (s == "omega_1") return DriveParam::omega_1;
  if (s == "omega_2") return DriveParam::omega_2;
  if (s == "delta_1") return DriveParam::delta_1;
  if (s == "delta_2") return DriveParam::delta_2;
  return std::nullopt;
}

inline CoolingAxis cooling_axis(const std::string& s) {
  if (s == "pressure") return CoolingAxis::pressure;
  if (s == "omega_1") return CoolingAxis::omega_1;
  if (s == "omega_2") return CoolingAxis::omega_2;
  if (s == "gamma_fb") return CoolingAxis::gamma_fb;
  return CoolingAxis::delta;
}

/// Either {"values": [...]} or {"min", "max", "count", "spacing"}.
inline std::vector<double> axis_values(Reader& r, double def_min, double def_max, std::size_t def_count,
                                       const std::string& def_spacing = "linear") {
  if (r.has("values")) {
    auto v = r.numbers("values", {});
    if (v.empty()) Reader::fail(r.at("values"), "needs at least one value");
    return v;
  }
  const double lo = r.number("min", def_min);
  const double hi = r.number("max", def_max);
  const std::size_t n = r.count("count", def_count);
  const std::string spacing = r.choice("spacing", def_spacing, {"linear", "log"});
  if (n == 0) Reader::fail(r.at("count"), "axis needs at least one point");
  if (spacing == "log" && !(lo > 0.0 && hi > 0.0)) Reader::fail(r.path(), "log spacing needs positive bounds");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : double(i) / double(n - 1);
    v[i] = spacing == "log" ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo);
  }
  if (n > 1) v.back() = hi;
  return v;
}

}  // namespace detail

/// Overrides taken from the command line, applied before resolution so the
/// config hash reflects them.
struct CommandLineOverrides {
  std::optional<std::string> units;
  bool paper_formula = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<unsigned> workers;
};

inline RunConfig parse_config(json doc, const CommandLineOverrides& cli = {}) {
  if (doc.is_null()) doc = json::object();
  if (!doc.is_object()) throw SchemaError("<root>: expected an object");
  if (cli.units) doc["units"] = *cli.units;
  if (cli.paper_formula) doc["parameters"]["coupling_formula"] = "printed";
  if (cli.seed) doc["props"]["seed"] = *cli.seed;

  RunConfig c;
  json resolved = json::object();
  Reader root(doc, resolved, "");

  const std::string units = root.choice("units", "normalized", {"normalized", "si"});
  c.drive.units = units == "si" ? Units::si : Units::normalized;
  c.output_dir = root.text("output_dir", "out");
  c.workers = static_cast<unsigned>(root.count("workers", 1));
  if (c.workers == 0) Reader::fail("workers", "must be at least 1");

  {
    auto r = root.child("particle");
    auto& g = c.setup.particle;
    g.r_a = r.number("r_a_m", g.r_a);
    g.r_b = r.number("r_b_m", g.r_b);
    g.density = r.number("density_kg_m3", g.density);
    g.relative_permittivity = r.number("relative_permittivity", g.relative_permittivity);
    const auto kx = r.optional_number("kappa_x");
    const auto ky = r.optional_number("kappa_y");
    if (kx.has_value() != ky.has_value()) Reader::fail(r.path(), "kappa_x and kappa_y must be given together");
    if (kx) c.setup.derive.optics = OpticalResponse{*kx, *ky, *kx - *ky, 0.0, 0.0};
    r.finish();
  }
  {
    auto r = root.child("beam");
    c.setup.beam.power = r.number("power_w", c.setup.beam.power);
    c.setup.beam.waist = r.number("waist_m", c.setup.beam.waist);
    r.finish();
  }
  {
    auto r = root.child("environment");
    auto& e = c.setup.environment;
    e.pressure = r.number("pressure_pa", e.pressure);
    e.temperature = r.number("temperature_k", e.temperature);
    const std::string unit = r.choice("rate_unit", "hz", {"hz", "rad_s"});
    const bool no_reference = doc.contains("environment") && doc["environment"].is_object() &&
                              doc["environment"].contains("damping_reference") &&
                              doc["environment"]["damping_reference"].is_null();
    auto ref = r.child("damping_reference");
    if (no_reference) {
      e.damping_reference.reset();
      r.out()["damping_reference"] = nullptr;
    } else {
      DampingReference d;
      const std::string ru = ref.choice("rate_unit", "hz", {"hz", "rad_s"});
      d.gamma_theta = ref.number("gamma_theta", 137.2) * detail::rate_factor(ru);
      d.gamma_y = ref.number("gamma_y", 47.0) * detail::rate_factor(ru);
      d.pressure = ref.number("pressure_pa", d.pressure);
      d.temperature = ref.number("temperature_k", d.temperature);
      ref.finish();
      e.damping_reference = d;
    }
    if (auto v = r.optional_number("gamma_theta_override")) e.gamma_theta_override = *v * detail::rate_factor(unit);
    if (auto v = r.optional_number("gamma_y_override")) e.gamma_y_override = *v * detail::rate_factor(unit);
    r.finish();
  }
  {
    auto r = root.child("parameters");
    const auto src = r.choice("source", "derived", {"derived", "reported"});
    c.setup.source = src == "reported" ? ParameterSource::reported : ParameterSource::derived;
    const auto f = r.choice("coupling_formula", "quartic", {"quartic", "printed"});
    c.setup.derive.coupling = f == "printed" ? CouplingFormula::printed : CouplingFormula::quartic;
    const std::string unit = r.choice("rate_unit", "hz", {"hz", "rad_s"});
    c.setup.nbar_theta_override = r.optional_number("nbar_theta");
    c.setup.nbar_y_override = r.optional_number("nbar_y");
    if (auto v = r.optional_number("eta_thetay_override")) c.setup.eta_thetay_override = *v * detail::rate_factor(unit);
    r.finish();
  }

  // Physical invariants of the inputs; everything below may use the params.
  try {
    c.params = c.setup.params();
  } catch (const DomainError& e) {
    throw PhysicsError(e.what());
  } catch (const ConfigurationError& e) {
    throw PhysicsError(e.what());
  }
  if (c.params.librationally_untrapped && c.drive.units == Units::normalized)
    throw PhysicsError("normalized units need a librational frequency; the particle is a sphere");
  const double w_t = c.params.omega_theta, w_y = c.params.omega_y;

  // Multiplier that turns a value tagged with `reference` into drive units.
  auto reference_scale = [&](const std::string& ref, double rate_unit) {
    if (ref == "omega_theta") return c.drive.units == Units::normalized ? 1.0 : w_t;
    if (ref == "omega_y") return c.drive.units == Units::normalized ? w_y / w_t : w_y;
    return c.drive.units == Units::normalized ? 1.0 : rate_unit;
  };

  {
    auto r = root.child("drive");
    const double ru = detail::rate_factor(r.choice("rate_unit", "rad_s", {"hz", "rad_s"}));
    const auto ref1 = r.choice("delta_1_reference", "none", {"none", "omega_theta", "omega_y"});
    const auto ref2 = r.choice("delta_2_reference", "omega_y", {"none", "omega_theta", "omega_y"});
    const double plain = reference_scale("none", ru);
    c.drive.omega_1 = r.number("omega_1", 0.1) * plain;
    c.drive.omega_2 = r.number("omega_2", 0.1) * plain;
    c.drive.delta_1 = r.number("delta_1", 0.01) * reference_scale(ref1, ru);
    c.drive.delta_2 = r.number("delta_2", 0.01) * reference_scale(ref2, ru);
    r.finish();
  }
  try {
    c.drive.validate();
  } catch (const DomainError& e) {
    throw PhysicsError(e.what());
  }
  {
    auto r = root.child("solver");
    c.solve.base_points = static_cast<int>(r.count("base_points", 4096));
    c.solve.feature_tol = r.number("feature_tol", c.solve.feature_tol);
    c.solve.max_points = r.count("max_points", c.solve.max_points);
    if (c.solve.base_points < 16) Reader::fail(r.at("base_points"), "must be at least 16");
    if (!(c.solve.feature_tol > 0.0 && c.solve.feature_tol < 1.0)) Reader::fail(r.at("feature_tol"), "must lie in (0, 1)");
    r.finish();
  }
  {
    auto r = root.child("sweep");
    const double ru = detail::rate_factor(r.choice("rate_unit", "rad_s", {"hz", "rad_s"}));
    auto axis = [&](const std::string& key, SweepAxis def) {
      auto a = r.child(key);
      const auto p = detail::drive_param(
          a.choice("param", std::string(to_string(def.param)), {"omega_1", "omega_2", "delta_1", "delta_2"}));
      const auto ref = a.choice("reference", "none", {"none", "omega_theta", "omega_y"});
      SweepAxis s{*p, a.number("min", def.min), a.number("max", def.max), a.count("count", def.count)};
      if (s.count == 0) Reader::fail(a.at("count"), "axis needs at least one point");
      const double f = reference_scale(ref, ru);
      s.min *= f;
      s.max *= f;
      a.finish();
      return s;
    };
    c.axis_1 = axis("axis_1", c.axis_1);
    c.axis_2 = axis("axis_2", c.axis_2);
    if (c.axis_1.param == c.axis_2.param) Reader::fail(r.path(), "axes must sweep different parameters");
    for (const auto* a : {&c.axis_1, &c.axis_2}) {
      if ((a->param == DriveParam::omega_1 || a->param == DriveParam::omega_2) && std::min(a->min, a->max) < 0.0)
        throw PhysicsError("sweep: drive amplitudes must be non-negative");
    }
    r.finish();
  }
  {
    auto r = root.child("coefficients");
    auto& s = c.coefficients;
    s.r_b_min = r.number("r_b_min_m", s.r_b_min);
    s.r_b_max = r.number("r_b_max_m", s.r_b_max);
    s.count = r.count("count", s.count);
    if (s.count == 0) Reader::fail(r.at("count"), "needs at least one point");
    r.finish();
    if (!(s.r_b_min > 0.0) || s.r_b_max > c.setup.particle.r_a || s.r_b_min > s.r_b_max)
      throw PhysicsError("coefficients: need 0 < r_b_min <= r_b_max <= r_a");
  }
  {
    auto r = root.child("dynamics");
    auto& s = c.dynamics;
    auto pair = [&](const std::string& key) {
      const auto v = r.numbers(key, {0.0, 0.0});
      if (v.size() != 2) Reader::fail(r.at(key), "expected [re, im]");
      return cplx(v[0], v[1]);
    };
    s.beta0_theta = pair("beta0_theta");
    s.beta0_y = pair("beta0_y");
    const auto k = c.kerr();
    const double slow = std::min(k.gamma_theta, k.gamma_y);
    const double n_damp = r.number("t_end_damping_times", 10.0);
    const auto t_end = r.optional_number("t_end");
    s.t_end = t_end ? *t_end : (slow > 0.0 ? n_damp / slow : 0.0);
    s.samples = r.count("samples", s.samples);
    s.rel_tol = r.number("rel_tol", s.rel_tol);
    r.finish();
    if (!(s.t_end > 0.0)) throw PhysicsError("dynamics: t_end must be positive (set it when damping is zero)");
    if (s.samples < 2) Reader::fail(r.at("samples"), "need at least two samples");
    if (!(s.rel_tol >= 1e-12 && s.rel_tol <= 1e-3)) throw PhysicsError("dynamics: rel_tol must lie in [1e-12, 1e-3]");
  }
  {
    auto r = root.child("cooling");
    auto& s = c.cooling;
    const double ru = detail::rate_factor(r.choice("rate_unit", "rad_s", {"hz", "rad_s"}));
    const double fr = c.drive.units == Units::normalized ? 1.0 : ru;
    s.delta = r.number("delta", 0.0) * fr;
    s.gamma_fb = r.number("gamma_fb", 0.0) * fr;
    s.resolve_branch_with_feedback = r.flag("resolve_branch_with_feedback", false);
    if (!(s.gamma_fb >= 0.0)) throw PhysicsError("cooling.gamma_fb must be non-negative");
    const json default_sweep = {{"name", "xi_delta"}, {"axis", "delta"}};
    const auto sweeps = r.objects("sweeps", {default_sweep});
    json& out_list = r.out()["sweeps"] = json::array();
    std::set<std::string> names;
    const double gt = c.kerr().gamma_theta;
    for (std::size_t i = 0; i < sweeps.size(); ++i) {
      json out_one = json::object();
      Reader w(sweeps[i], out_one, r.at("sweeps") + "[" + std::to_string(i) + "]");
      CoolingSweepSpec sp;
      sp.name = w.text("name", "sweep_" + std::to_string(i));
      if (sp.name.empty() || sp.name.find_first_of("/\\ ") != std::string::npos)
        Reader::fail(w.at("name"), "must be a non-empty file-name fragment");
      if (!names.insert(sp.name).second) Reader::fail(w.at("name"), "duplicate sweep name");
      sp.axis = detail::cooling_axis(w.choice("axis", "delta", {"delta", "pressure", "omega_1", "omega_2", "gamma_fb"}));
      // defaults: delta over +-5 gamma_theta, gamma_fb over 0..1000 gamma_theta, pressure over 1e-7..1e-2 Pa
      double lo = -5.0 * gt, hi = 5.0 * gt;
      std::size_t n = 101;
      if (sp.axis == CoolingAxis::gamma_fb) lo = 0.0, hi = c.drive.units == Units::normalized ? 1000.0 : 1000.0 * gt;
      if (sp.axis == CoolingAxis::pressure) lo = 1e-7, hi = 1e-2, n = 51;
      if (sp.axis == CoolingAxis::omega_1 || sp.axis == CoolingAxis::omega_2) lo = 0.0, hi = 0.15 * (c.drive.units == Units::normalized ? 1.0 : w_t);
      auto vals = w.child("range");
      const auto raw = detail::axis_values(vals, lo / (sp.axis == CoolingAxis::pressure ? 1.0 : fr),
                                           hi / (sp.axis == CoolingAxis::pressure ? 1.0 : fr), n,
                                           sp.axis == CoolingAxis::pressure ? "log" : "linear");
      vals.finish();
      for (double v : raw) sp.values.push_back(sp.axis == CoolingAxis::pressure ? v : v * fr);
      sp.pressures = w.numbers("pressures_pa", {});
      for (double p : sp.pressures)
        if (!(p >= 0.0)) throw PhysicsError(w.at("pressures_pa") + ": pressures must be non-negative");
      if (sp.axis == CoolingAxis::pressure && !sp.pressures.empty())
        Reader::fail(w.at("pressures_pa"), "not allowed on a pressure axis");
      for (double v : sp.values) {
        if (sp.axis == CoolingAxis::pressure && !(v >= 0.0)) throw PhysicsError(w.path() + ": negative pressure");
        if (sp.axis == CoolingAxis::gamma_fb && !(v >= 0.0)) throw PhysicsError(w.path() + ": negative gamma_fb");
        if ((sp.axis == CoolingAxis::omega_1 || sp.axis == CoolingAxis::omega_2) && !(v >= 0.0))
          throw PhysicsError(w.path() + ": negative drive amplitude");
      }
      w.finish();
      out_list.push_back(out_one);
      s.sweeps.push_back(std::move(sp));
    }
    r.finish();
  }
  {
    auto r = root.child("oracle");
    auto& s = c.oracle;
    const auto tr = r.numbers("truncation", {12.0, 12.0});
    if (tr.size() != 2 || tr[0] != std::floor(tr[0]) || tr[1] != std::floor(tr[1]))
      Reader::fail(r.at("truncation"), "expected [N_theta, N_y] integers");
    s.truncation = {static_cast<int>(tr[0]), static_cast<int>(tr[1])};
    if (s.truncation.theta < 4 || s.truncation.y < 4 || s.truncation.theta > 15 || s.truncation.y > 15)
      throw PhysicsError("oracle.truncation must lie in [4, 15] per mode");
    s.tol = r.number("tol", s.tol);
    if (!(s.tol > 0.0 && s.tol < 1e-3)) throw PhysicsError("oracle.tol must lie in (0, 1e-3)");
    {
      auto b = r.child("beam_splitter");
      auto& t = s.beam_splitter;
      t.gamma_theta = b.number("gamma_theta", t.gamma_theta);
      t.gamma_y = b.number("gamma_y", t.gamma_y);
      t.nbar_theta = b.number("nbar_theta", t.nbar_theta);
      t.nbar_y = b.number("nbar_y", t.nbar_y);
      t.delta = b.number("delta", t.delta);
      t.g = b.number("g", t.g);
      b.finish();
      if (!(t.gamma_theta > 0.0 && t.gamma_y > 0.0 && t.nbar_theta >= 0.0 && t.nbar_y >= 0.0 && t.g >= 0.0))
        throw PhysicsError("oracle.beam_splitter: rates must be positive, occupations and g non-negative");
    }
    {
      auto m = r.child("mean_field");
      auto& t = s.mean_field;
      t.kerr.gamma_theta = m.number("gamma_theta", t.kerr.gamma_theta);
      t.kerr.gamma_y = m.number("gamma_y", t.kerr.gamma_y);
      t.kerr.eta_theta = m.number("eta_theta", t.kerr.eta_theta);
      t.kerr.eta_y = m.number("eta_y", t.kerr.eta_y);
      t.kerr.eta_thetay = m.number("eta_thetay", t.kerr.eta_thetay);
      t.drive.omega_1 = m.number("omega_1", t.drive.omega_1);
      t.drive.omega_2 = m.number("omega_2", t.drive.omega_2);
      t.drive.delta_1 = m.number("delta_1", t.drive.delta_1);
      t.drive.delta_2 = m.number("delta_2", t.drive.delta_2);
      t.damping_times = m.number("damping_times", t.damping_times);
      m.finish();
      try {
        t.kerr.validate();
        t.drive.validate();
      } catch (const DomainError& e) {
        throw PhysicsError(std::string("oracle.mean_field: ") + e.what());
      }
      if (!(t.kerr.gamma_theta > 0.0 && t.kerr.gamma_y > 0.0 && t.damping_times > 0.0))
        throw PhysicsError("oracle.mean_field: damping rates and duration must be positive");
    }
    r.finish();
  }
  {
    auto r = root.child("props");
    c.props.samples = r.count("samples", c.props.samples);
    c.props.seed = r.count("seed", c.props.seed);
    r.finish();
    if (c.props.samples == 0) Reader::fail("props.samples", "must be at least 1");
  }
  root.finish();

  // Output location and worker count never change results.
  resolved.erase("output_dir");
  resolved.erase("workers");
  if (cli.output_dir) c.output_dir = *cli.output_dir;
  if (cli.workers) c.workers = *cli.workers;
  if (c.workers == 0) throw SchemaError("--workers: must be at least 1");
  c.resolved = resolved;
  c.hash = hash_hex(fnv1a64(resolved.dump()));
  return c;
}

inline RunConfig parse_config_text(const std::string& text, const CommandLineOverrides& cli = {}) {
  json doc;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("malformed document: ") + e.what());
    }
  }
  return parse_config(std::move(doc), cli);
}

}  // namespace levdyn::config
