#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lagwave/lagwave.hpp"

namespace lagwave::testing {

inline const double kPi = std::acos(-1.0);

struct Scenario {
  double gamma = 1.4;
  double K = 1.0;
  double x0 = 0.0, x1 = 1.0;
  std::size_t n = 128;
  std::string u0 = "0";
  std::string thermo = "1";
  ThermoInput kind = ThermoInput::Z;
  std::string m0 = "1";
  std::map<std::string, double> params;
};

inline StateField make_state(const Scenario& s) {
  const auto gc = make_constants(s.gamma, s.K, 1.0);
  InitialData d;
  d.u0 = parse_profile(s.u0, s.params);
  d.thermo = parse_profile(s.thermo, s.params);
  d.kind = s.kind;
  d.m0 = parse_profile(s.m0, s.params);
  return build_initial(d, Grid(s.x0, s.x1, s.n), gc);
}

/// The constant-entropy gamma = 3 sine wave whose y obeys y' = -y^2.
inline Scenario lax_setup(std::size_t n, double amp = 0.2) {
  Scenario s;
  s.gamma = 3.0;
  s.K = 1.0 / 3.0;
  s.n = n;
  s.u0 = "-amp*sin(2*pi*x)";
  s.params["amp"] = amp;
  return s;
}

/// u = 0 at constant pressure over a tanh entropy step.
inline Scenario stationary_setup(std::size_t n) {
  Scenario s;
  s.gamma = 1.4;
  s.K = 1.0;
  s.x0 = 0.0;
  s.x1 = 4.0 * kPi;
  s.n = n;
  s.m0 = "1+0.3*tanh(2*sin((x-pi)/2))";
  s.thermo = "1";
  s.kind = ThermoInput::Pressure;
  return s;
}

/// Smooth varying-entropy data used for residual checks.
inline Scenario entropy_wave_setup(std::size_t n, double gamma = 3.0) {
  Scenario s;
  s.gamma = gamma;
  s.K = gamma == 3.0 ? 1.0 / 3.0 : 1.0;
  s.x1 = 2.0 * kPi;
  s.n = n;
  s.m0 = "1+0.2*sin(x)";
  s.u0 = "0.2*sin(x)+0.1*cos(2*x)";
  s.thermo = "1+0.1*cos(x)";
  s.kind = ThermoInput::Pressure;
  return s;
}

inline double max_abs(std::span<const double> v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

inline double min_of(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace lagwave::testing
