#pragma once

// Polytropic ideal gas in the (z, m) coordinates:
//
//   z = 2 sqrt(K gamma)/(gamma-1) * tau^{-(gamma-1)/2},   m = exp(S / (2 c_v))
//   tau = K_tau z^{-2/(gamma-1)}
//   p   = K_p m^2 z^{2 gamma/(gamma-1)}
//   c   = K_c m z^{(gamma+1)/(gamma-1)}          (Lagrangian sound speed)
//
// Everything downstream works in (z, m); (tau, S) only appear at the edges.

#include <cmath>
#include <string>

#include "lagwave/errors.hpp"

namespace lagwave {

struct GasConstants {
  double gamma = 1.4;
  double K = 1.0;
  double c_v = 1.0;
  double K_tau = 0.0;
  double K_p = 0.0;
  double K_c = 0.0;
  /// Values of z at or below this are treated as vacuum.
  double z_floor = 1e-10;
};

struct Thermo {
  double p;
  double c;
};

inline GasConstants make_constants(double gamma, double K, double c_v,
                                   double z_floor = 1e-10) {
  if (!(gamma > 1.0))
    throw DomainError("gamma must exceed 1 (got " + std::to_string(gamma) + ")");
  if (!(K > 0.0)) throw DomainError("K must be positive");
  if (!(c_v > 0.0)) throw DomainError("c_v must be positive");
  if (!(z_floor > 0.0)) throw DomainError("z_floor must be positive");

  GasConstants gc;
  gc.gamma = gamma;
  gc.K = K;
  gc.c_v = c_v;
  gc.z_floor = z_floor;
  const double root = std::sqrt(K * gamma);
  gc.K_tau = std::pow(2.0 * root / (gamma - 1.0), 2.0 / (gamma - 1.0));
  gc.K_p = K * std::pow(gc.K_tau, -gamma);
  gc.K_c = root * std::pow(gc.K_tau, -(gamma + 1.0) / 2.0);
  return gc;
}

inline double z_of_tau(double tau, const GasConstants& gc) {
  if (!(tau > 0.0)) throw VacuumGuardError("specific volume must be positive");
  const double g = gc.gamma;
  const double z = 2.0 * std::sqrt(gc.K * g) / (g - 1.0) * std::pow(tau, -(g - 1.0) / 2.0);
  if (!(z > gc.z_floor) || !std::isfinite(z))
    throw VacuumGuardError("z fell to the vacuum floor");
  return z;
}

inline double tau_of_z(double z, const GasConstants& gc) {
  if (!(z > gc.z_floor)) throw VacuumGuardError("z at or below the vacuum floor");
  return gc.K_tau * std::pow(z, -2.0 / (gc.gamma - 1.0));
}

inline double pressure(double z, double m, const GasConstants& gc) {
  return gc.K_p * m * m * std::pow(z, 2.0 * gc.gamma / (gc.gamma - 1.0));
}

inline double sound_speed(double z, double m, const GasConstants& gc) {
  return gc.K_c * m * std::pow(z, (gc.gamma + 1.0) / (gc.gamma - 1.0));
}

inline Thermo thermo(double z, double m, const GasConstants& gc) {
  if (!(z > gc.z_floor)) throw VacuumGuardError("z at or below the vacuum floor");
  if (!(m > 0.0)) throw DomainError("m must be positive");
  return {pressure(z, m, gc), sound_speed(z, m, gc)};
}

inline double m_of_entropy(double S, const GasConstants& gc) {
  return std::exp(S / (2.0 * gc.c_v));
}

inline double entropy_of_m(double m, const GasConstants& gc) {
  if (!(m > 0.0)) throw DomainError("m must be positive");
  return 2.0 * gc.c_v * std::log(m);
}

/// Pressure from the original (tau, S) form K e^{S/c_v} tau^{-gamma}.
inline double pressure_tau_entropy(double tau, double S, const GasConstants& gc) {
  if (!(tau > 0.0)) throw VacuumGuardError("specific volume must be positive");
  return gc.K * std::exp(S / gc.c_v) * std::pow(tau, -gc.gamma);
}

/// Internal energy e = p tau / (gamma - 1).
inline double internal_energy(double z, double m, const GasConstants& gc) {
  return pressure(z, m, gc) * tau_of_z(z, gc) / (gc.gamma - 1.0);
}

/// z that gives pressure p_bar at entropy variable m (inverse of the p-law).
inline double z_at_pressure(double p_bar, double m, const GasConstants& gc) {
  if (!(p_bar > 0.0)) throw DomainError("pressure must be positive");
  if (!(m > 0.0)) throw DomainError("m must be positive");
  return std::pow(p_bar / (gc.K_p * m * m), (gc.gamma - 1.0) / (2.0 * gc.gamma));
}

}  // namespace lagwave
