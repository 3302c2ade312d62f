#pragma once

#include <optional>
#include <string_view>

#include "levdyn/physics.hpp"

namespace levdyn {

/// Where trap frequencies and quartic coefficients come from.
enum class ParameterSource {
  derived,   // closed forms from geometry and beam
  reported,  // published spot values (see ReportedValues)
};

inline std::string_view to_string(ParameterSource s) { return s == ParameterSource::derived ? "derived" : "reported"; }

/// Physical inputs plus the knobs that choose between parameter variants.
struct PhysicalSetup {
  ParticleGeometry particle;
  TrapBeam beam;
  Environment environment;
  DeriveOptions derive;
  ParameterSource source = ParameterSource::derived;
  std::optional<double> nbar_theta_override;
  std::optional<double> nbar_y_override;
  std::optional<double> eta_thetay_override;  // rad/s

  ModeParams params() const {
    ModeParams p = derive_mode_params(particle, beam, environment, derive);
    if (source == ParameterSource::reported) p = with_reported_values(p);
    if (nbar_theta_override) p.nbar_theta = *nbar_theta_override;
    if (nbar_y_override) p.nbar_y = *nbar_y_override;
    if (eta_thetay_override) p.eta_thetay = *eta_thetay_override;
    return p;
  }

  PhysicalSetup at_pressure(double pressure) const {
    PhysicalSetup s = *this;
    s.environment.pressure = pressure;
    return s;
  }
};

}  // namespace levdyn
