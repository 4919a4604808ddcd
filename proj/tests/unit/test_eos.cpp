#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lagwave/eos.hpp"

using namespace lagwave;

TEST(Eos, GammaThreeUnitConstants) {
  const auto gc = make_constants(3.0, 1.0 / 3.0, 1.0);
  EXPECT_NEAR(gc.K_tau, 1.0, 1e-14);
  EXPECT_NEAR(gc.K_p, 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(gc.K_c, 1.0, 1e-14);
}

TEST(Eos, PressureToSoundRatio) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> G(1.0 + 1e-3, 5.0), K(0.05, 20.0);
  for (int i = 0; i < 50; ++i) {
    const double g = G(rng);
    const auto gc = make_constants(g, K(rng), 1.0);
    EXPECT_NEAR(gc.K_p / gc.K_c, (g - 1.0) / (2.0 * g), 1e-12 * (g - 1.0) / (2.0 * g)) << "gamma " << g;
  }
}

TEST(Eos, RejectsBadConstants) {
  EXPECT_THROW(make_constants(1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(make_constants(1.4, 0.0, 1.0), DomainError);
  EXPECT_THROW(make_constants(1.4, 1.0, -1.0), DomainError);
}

TEST(Eos, ZOfTau) {
  const auto gc = make_constants(3.0, 1.0 / 3.0, 1.0);
  EXPECT_NEAR(z_of_tau(2.0, gc), 0.5, 1e-15);
  for (double g : {1.2, 1.4, 5.0 / 3.0, 3.0, 4.5}) {
    const auto c = make_constants(g, 0.7, 1.0);
    for (double tau : {0.1, 1.0, 10.0}) EXPECT_NEAR(tau_of_z(z_of_tau(tau, c), c), tau, 1e-12 * tau);
    double prev = z_of_tau(1.0, c);
    for (double tau = 2.0; tau < 1e6; tau *= 3.0) {
      const double z = z_of_tau(tau, c);
      EXPECT_LT(z, prev);
      EXPECT_GT(z, 0.0);
      prev = z;
    }
  }
}

TEST(Eos, VacuumGuard) {
  const auto gc = make_constants(1.4, 1.0, 1.0, 1e-3);
  EXPECT_THROW(z_of_tau(-1.0, gc), VacuumGuardError);
  EXPECT_THROW(z_of_tau(0.0, gc), VacuumGuardError);
  EXPECT_THROW(tau_of_z(1e-4, gc), VacuumGuardError);
  EXPECT_THROW(thermo(0.0, 1.0, gc), VacuumGuardError);
}

TEST(Eos, ThermoExamples) {
  const auto gc = make_constants(3.0, 1.0 / 3.0, 1.0);
  const auto t = thermo(2.0, 1.0, gc);
  EXPECT_NEAR(t.p, 8.0 / 3.0, 1e-14);
  EXPECT_NEAR(t.c, 4.0, 1e-14);
  for (double g : {1.1, 1.4, 2.0, 4.0}) {
    const auto c = make_constants(g, 2.0, 1.0);
    const auto u = thermo(1.0, 1.0, c);
    EXPECT_DOUBLE_EQ(u.p, c.K_p);
    EXPECT_DOUBLE_EQ(u.c, c.K_c);
  }
}

TEST(Eos, ThermoMonotone) {
  const auto gc = make_constants(1.4, 1.0, 1.0);
  for (double z = 0.5; z < 4.0; z += 0.25)
    for (double m = 0.5; m < 2.0; m += 0.25) {
      const auto a = thermo(z, m, gc), bz = thermo(z + 0.01, m, gc), bm = thermo(z, m + 0.01, gc);
      EXPECT_GT(bz.p, a.p);
      EXPECT_GT(bz.c, a.c);
      EXPECT_GT(bm.p, a.p);
      EXPECT_GT(bm.c, a.c);
    }
}

TEST(Eos, EntropyVariable) {
  const auto gc = make_constants(1.4, 1.0, 2.5);
  EXPECT_DOUBLE_EQ(m_of_entropy(0.0, gc), 1.0);
  EXPECT_NEAR(m_of_entropy(2.0 * gc.c_v, gc), std::exp(1.0), 1e-15);
  for (double S = -3.0; S < 3.0; S += 0.5) {
    EXPECT_LT(m_of_entropy(S, gc), m_of_entropy(S + 0.1, gc));
    EXPECT_NEAR(entropy_of_m(m_of_entropy(S, gc), gc), S, 1e-13);
  }
}

TEST(Eos, TransformConsistency) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> G(1.05, 5.0), K(0.1, 10.0), T(0.05, 20.0), S(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const auto gc = make_constants(G(rng), K(rng), 1.3);
    const double tau = T(rng), s = S(rng);
    const double direct = pressure_tau_entropy(tau, s, gc);
    const double via_z = pressure(z_of_tau(tau, gc), m_of_entropy(s, gc), gc);
    EXPECT_NEAR(via_z, direct, 1e-10 * direct);
  }
}

TEST(Eos, SoundSpeedIsMinusDpDtau) {
  for (double g : {1.2, 1.4, 5.0 / 3.0, 3.0, 4.0})
    for (double tau : {0.3, 1.0, 4.0}) {
      const auto gc = make_constants(g, 0.8, 1.0);
      const double S = 0.4, h = 1e-6 * tau;
      const double dp = (pressure_tau_entropy(tau + h, S, gc) - pressure_tau_entropy(tau - h, S, gc)) / (2.0 * h);
      const double c = sound_speed(z_of_tau(tau, gc), m_of_entropy(S, gc), gc);
      EXPECT_NEAR(c * c, -dp, 1e-6 * c * c);
    }
}

TEST(Eos, PressureInversion) {
  const auto gc = make_constants(1.4, 1.0, 1.0);
  for (double p : {0.1, 1.0, 7.0})
    for (double m : {0.6, 1.0, 1.7}) EXPECT_NEAR(pressure(z_at_pressure(p, m, gc), m, gc), p, 1e-13 * p);
  EXPECT_THROW(z_at_pressure(-1.0, 1.0, gc), DomainError);
}

TEST(Eos, InternalEnergy) {
  const auto gc = make_constants(1.4, 1.0, 1.0);
  const double z = 1.3, m = 0.9;
  EXPECT_NEAR(internal_energy(z, m, gc), pressure(z, m, gc) * tau_of_z(z, gc) / 0.4, 1e-13);
}
