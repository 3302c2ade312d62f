#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace levdyn {

inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// A physical input or argument outside the model's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Missing or inconsistent configuration (as opposed to bad physics).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }
inline constexpr double rad_to_hz(double rad) { return rad / kTwoPi; }

}  // namespace levdyn
