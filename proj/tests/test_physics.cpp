#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "levdyn/physics.hpp"
#include "levdyn/setup.hpp"

#ifdef LEVDYN_HAVE_BOOST_QUADRATURE
#include <boost/math/quadrature/exp_sinh.hpp>
#endif

using namespace levdyn;

namespace {

#ifdef LEVDYN_HAVE_BOOST_QUADRATURE
// Ellipsoid depolarization integral L_i = abc/2 int_0^inf ds / ((s + a_i^2) R(s)).
double depolarization_quadrature(double a, double b, double c, double ai) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double s) {
    return 1.0 / ((s + ai * ai) * std::sqrt((s + a * a) * (s + b * b) * (s + c * c)));
  };
  return 0.5 * a * b * c * integrator.integrate(f);
}
#endif

}  // namespace

TEST(Depolarization, SphereIsOneThird) {
  const auto d = depolarization_factors(1.0);
  EXPECT_NEAR(d.L_a, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.L_b, 1.0 / 3.0, 1e-15);
}

TEST(Depolarization, SumRule) {
  for (double ar : {1.0, 1.001, 1.05, 1.5, 2.0, 5.0, 40.0, 1e4}) {
    const auto d = depolarization_factors(ar);
    EXPECT_NEAR(d.L_a + 2.0 * d.L_b, 1.0, 1e-14) << ar;
  }
}

TEST(Depolarization, AspectRatioTwo) {
  const auto r = susceptibilities(2.0, 2.1);
  EXPECT_NEAR(r.L_a, 0.1736, 1e-4);
  EXPECT_NEAR(r.kappa_x, 0.924, 1e-3);
  EXPECT_NEAR(r.kappa_y, 0.756, 1e-3);
  EXPECT_NEAR(r.kappa_xy, r.kappa_x - r.kappa_y, 1e-15);
}

TEST(Depolarization, NeedleLimit) {
  const auto d = depolarization_factors(std::numeric_limits<double>::infinity());
  EXPECT_EQ(d.L_a, 0.0);
  EXPECT_EQ(d.L_b, 0.5);
  // L_a ~ ln(2 AR) / AR^2 for long needles
  const double ar = 1e4;
  EXPECT_NEAR(depolarization_factors(ar).L_a * ar * ar / (std::log(2 * ar) - 1.0), 1.0, 1e-6);
}

TEST(Depolarization, SeriesBranchJoinsClosedForm) {
  // e^2 = 1e-2 sits at the switch between the two evaluations
  const double ar_lo = 1.0 / std::sqrt(1.0 - (0.01 - 1e-12)), ar_hi = 1.0 / std::sqrt(1.0 - (0.01 + 1e-12));
  EXPECT_NEAR(depolarization_factors(ar_lo).L_a, depolarization_factors(ar_hi).L_a, 1e-12);
}

#ifdef LEVDYN_HAVE_BOOST_QUADRATURE
TEST(Depolarization, MatchesQuadrature) {
  for (double ar : {1.0001, 1.01, 1.2, 2.0, 3.7, 10.0, 100.0}) {
    const double La = depolarization_quadrature(ar, 1.0, 1.0, ar);
    const double Lb = depolarization_quadrature(ar, 1.0, 1.0, 1.0);
    const auto d = depolarization_factors(ar);
    EXPECT_NEAR(d.L_a, La, 1e-12) << ar;
    EXPECT_NEAR(d.L_b, Lb, 1e-12) << ar;
  }
}
#endif

TEST(Susceptibility, VacuumPermittivityGivesZero) {
  const auto r = susceptibilities(2.0, 1.0);
  EXPECT_EQ(r.kappa_x, 0.0);
  EXPECT_EQ(r.kappa_y, 0.0);
  EXPECT_THROW(susceptibilities(2.0, 0.5), DomainError);
  EXPECT_THROW(depolarization_factors(0.9), DomainError);
}

TEST(GasDamping, LinearInPressureSqrtInTemperature) {
  Environment env;
  const double g0 = env.damping_reference->gamma_theta;
  EXPECT_DOUBLE_EQ(gas_damping(env, Mode::theta), g0);
  env.pressure = 2e-3;
  EXPECT_DOUBLE_EQ(gas_damping(env, Mode::theta), 2 * g0);
  env.temperature = 1200.0;
  EXPECT_DOUBLE_EQ(gas_damping(env, Mode::theta), 4 * g0);
  EXPECT_DOUBLE_EQ(gas_damping(env, Mode::y), 4 * env.damping_reference->gamma_y);
  env.pressure = 0.0;
  EXPECT_EQ(gas_damping(env, Mode::y), 0.0);
}

TEST(GasDamping, OverrideAndMissingReference) {
  Environment env;
  env.damping_reference.reset();
  EXPECT_THROW(gas_damping(env, Mode::theta), ConfigurationError);
  env.gamma_theta_override = 3.0;
  EXPECT_EQ(gas_damping(env, Mode::theta), 3.0);
  EXPECT_THROW(gas_damping(env, Mode::y), ConfigurationError);
}

TEST(ThermalOccupation, Examples) {
  const double T = 300.0;
  const double w_ln2 = std::log(2.0) * kBoltzmann * T / kHbar;
  EXPECT_NEAR(thermal_occupation(w_ln2, T), 1.0, 1e-12);
  // Rayleigh-Jeans: kT/hbar w - 1/2
  const double w = 1e3;
  const double x = kBoltzmann * T / (kHbar * w);
  EXPECT_NEAR(thermal_occupation(w, T) / (x - 0.5), 1.0, 1e-12);
  EXPECT_NEAR(thermal_occupation(hz_to_rad(2.34e6), T), 2.67e6, 0.01e6);
  EXPECT_THROW(thermal_occupation(0.0, T), DomainError);
  EXPECT_THROW(thermal_occupation(1.0, 0.0), DomainError);
}

TEST(ModeParams, DefaultEllipsoidIsTrapped) {
  const auto p = derive_mode_params({}, {}, {});
  EXPECT_FALSE(p.librationally_untrapped);
  EXPECT_GT(p.omega_theta, p.omega_y);
  EXPECT_GT(p.eta_theta, p.eta_thetay);
  EXPECT_GT(p.eta_thetay, 0.0);
  EXPECT_GT(p.nbar_y, p.nbar_theta);
  // trap frequencies land within a decade of the published spot values
  for (const auto& row : compare_with_reported(p))
    if (row.name.rfind("omega", 0) == 0) EXPECT_TRUE(row.within_factor_10) << row.name;
}

TEST(ModeParams, QuarticIdentities) {
  const auto p = derive_mode_params({}, {}, {});
  const double theta_zpf2 = kHbar / (2 * p.inertia * p.omega_theta);
  const double y_zpf2 = kHbar / (2 * p.mass * p.omega_y);
  // both coefficients are zero-point energies of the quartic terms
  EXPECT_NEAR(p.eta_theta, p.inertia * p.omega_theta * p.omega_theta * theta_zpf2 * theta_zpf2 / (6 * kHbar), 1e-12 * p.eta_theta);
  EXPECT_NEAR(p.eta_y, p.mass * p.omega_y * p.omega_y * y_zpf2 * y_zpf2 / (2 * kHbar * p.waist * p.waist),
              1e-12 * p.eta_y);
}

TEST(ModeParams, SphereIsLibrationallyUntrapped) {
  ParticleGeometry g;
  g.r_b = g.r_a;
  const auto p = derive_mode_params(g, {}, {});
  EXPECT_TRUE(p.librationally_untrapped);
  EXPECT_EQ(p.omega_theta, 0.0);
  EXPECT_EQ(p.eta_thetay, 0.0);
  EXPECT_EQ(p.eta_1, 0.0);
  EXPECT_TRUE(std::isinf(p.nbar_theta));
  EXPECT_GT(p.omega_y, 0.0);
}

TEST(ModeParams, ProlateConventionEnforced) {
  ParticleGeometry g;
  g.r_b = 60e-9;
  EXPECT_THROW(derive_mode_params(g, {}, {}), DomainError);
  TrapBeam b;
  b.power = 0.0;
  EXPECT_THROW(derive_mode_params({}, b, {}), DomainError);
}

TEST(ModeParams, ScalingLaws) {
  const auto p = derive_mode_params({}, {}, {});
  TrapBeam b4;
  b4.power = 4 * TrapBeam{}.power;
  const auto q = derive_mode_params({}, b4, {});
  EXPECT_NEAR(q.omega_y / p.omega_y, 2.0, 1e-12);
  EXPECT_NEAR(q.omega_theta / p.omega_theta, 2.0, 1e-12);
  EXPECT_NEAR(q.eta_theta / p.eta_theta, 1.0, 1e-12);
  EXPECT_NEAR(q.eta_thetay / p.eta_thetay, 1.0, 1e-12);

  ParticleGeometry dense;
  dense.density *= 2;
  const auto r = derive_mode_params(dense, {}, {});
  EXPECT_NEAR(r.eta_theta / p.eta_theta, 0.5, 1e-12);
  EXPECT_NEAR(r.eta_y / p.eta_y, 0.5, 1e-12);
  EXPECT_NEAR(r.omega_y / p.omega_y, 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(ModeParams, PrintedCouplingDiffers) {
  const auto q = derive_mode_params({}, {}, {}, {CouplingFormula::quartic, std::nullopt});
  const auto p = derive_mode_params({}, {}, {}, {CouplingFormula::printed, std::nullopt});
  EXPECT_GT(p.eta_thetay, 0.0);
  EXPECT_NE(p.eta_thetay, q.eta_thetay);
  EXPECT_EQ(p.eta_theta, q.eta_theta);
}

TEST(ReportedValues, ConvertedFromHz) {
  const auto p = with_reported_values(derive_mode_params({}, {}, {}));
  EXPECT_DOUBLE_EQ(p.omega_theta, kTwoPi * 2.34e6);
  EXPECT_DOUBLE_EQ(p.eta_thetay, kTwoPi * 2.01e-3);
  EXPECT_NEAR(p.nbar_theta, 2.67e6, 0.01e6);
}

TEST(Setup, OverridesApplyAfterSource) {
  PhysicalSetup s;
  s.source = ParameterSource::reported;
  s.nbar_y_override = 5.0;
  s.eta_thetay_override = 0.0;
  const auto p = s.params();
  EXPECT_EQ(p.nbar_y, 5.0);
  EXPECT_EQ(p.eta_thetay, 0.0);
  EXPECT_DOUBLE_EQ(s.at_pressure(2e-3).params().gamma_theta, 2 * p.gamma_theta);
}

TEST(CoefficientSweep, MonotoneInShortAxis) {
  std::vector<double> rb;
  for (int i = 5; i <= 50; ++i) rb.push_back(i / 1e9);
  const auto rows = coefficient_sweep({}, {}, rb);
  ASSERT_EQ(rows.size(), rb.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i].eta_theta, rows[i - 1].eta_theta);
    EXPECT_LT(rows[i].eta_y, rows[i - 1].eta_y);
  }
  EXPECT_EQ(rows.back().eta_thetay, 0.0);
  const std::vector<double> bad{51e-9};
  EXPECT_THROW(coefficient_sweep({}, {}, bad), DomainError);
}
