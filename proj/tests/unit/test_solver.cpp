#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace lagwave;
using namespace lagwave::testing;

TEST(CflDt, ConstantState) {
  Scenario s;
  s.n = 100;  // h = 0.01
  const auto st = make_state(s);
  EXPECT_NEAR(cfl_dt(st, 0.5), 0.005 / st.gas.K_c, 1e-12 / st.gas.K_c);
}

TEST(CflDt, GammaThreeExample) {
  Scenario s;
  s.gamma = 3.0;
  s.K = 1.0 / 3.0;
  s.x1 = 3.2;
  s.n = 32;  // h = 0.1
  s.thermo = "2";
  const auto st = make_state(s);
  EXPECT_NEAR(cfl_dt(st, 0.4), 0.01, 1e-15);
}

TEST(CflDt, InverselyProportionalToMaxSpeed) {
  Scenario s;
  s.gamma = 3.0;
  s.K = 1.0 / 3.0;
  s.m0 = "1+0.5*sin(2*pi*x)^2";
  const auto a = make_state(s);
  s.m0 = "2*(1+0.5*sin(2*pi*x)^2)";
  const auto b = make_state(s);  // c is linear in m
  EXPECT_NEAR(cfl_dt(b, 0.5), 0.5 * cfl_dt(a, 0.5), 1e-15);
}

TEST(Step, ConstantStateIsFixedPoint) {
  Scenario s;
  s.thermo = "1.3";
  s.u0 = "0.7";
  const auto st = make_state(s);
  const auto next = step(st, cfl_dt(st, 0.5));
  for (std::size_t i = 0; i < st.z.size(); ++i) {
    EXPECT_NEAR(next.z[i], st.z[i], 1e-14);
    EXPECT_NEAR(next.u[i], st.u[i], 1e-14);
  }
  EXPECT_EQ(next.profile, st.profile);
}

TEST(Step, MatchesPSystemWithConstantEntropy) {
  // m = 1: the step must realise tau_t = u_x, u_t = -p_x with no entropy forcing.
  Scenario s;
  s.n = 256;
  s.u0 = "0.1*sin(2*pi*x)";
  s.thermo = "1+0.05*cos(2*pi*x)";
  const auto st = make_state(s);
  const double dt = 1e-4;
  const auto next = step(st, dt);
  const auto d = compute_diagnostics(st);
  const auto px = derivative(d.p, st.grid, 1);
  for (std::size_t i = 0; i < st.z.size(); ++i) {
    const double tau1 = tau_of_z(next.z[i], st.gas);
    EXPECT_NEAR((tau1 - d.tau[i]) / dt, d.u_x[i], 2e-3);
    EXPECT_NEAR((next.u[i] - st.u[i]) / dt, -px[i], 2e-3);
  }
}

TEST(Step, StationaryStateStaysAtRest) {
  for (std::size_t n : {128u, 256u}) {
    const auto st = make_state(stationary_setup(n));
    SolverConfig cfg;
    cfg.t_end = 1.0;
    cfg.snapshot_stride = 1000000;
    const auto tr = evolve(st, cfg);
    ASSERT_EQ(tr.termination, Termination::ReachedTEnd);
    const double growth = max_abs(tr.final().u) / tr.t_stop;
    EXPECT_LE(growth, 1e-12) << n;
  }
}

TEST(Evolve, ConstantStateReachesEnd) {
  Scenario s;
  s.u0 = "0.2";
  const auto tr = evolve(make_state(s), SolverConfig{});
  EXPECT_EQ(tr.termination, Termination::ReachedTEnd);
  EXPECT_DOUBLE_EQ(tr.t_stop, 1.0);
  EXPECT_DOUBLE_EQ(tr.final().t, 1.0);
  const auto& r0 = tr.log.front();
  for (const auto& r : tr.log) {
    EXPECT_NEAR(r.int_u, r0.int_u, 1e-12);
    EXPECT_NEAR(r.int_tau, r0.int_tau, 1e-12);
    EXPECT_NEAR(r.int_energy, r0.int_energy, 1e-12);
  }
}

TEST(Evolve, SnapshotsOrdered) {
  SolverConfig cfg;
  cfg.t_end = 0.3;
  cfg.snapshot_stride = 3;
  const auto tr = evolve(make_state(lax_setup(128)), cfg);
  for (std::size_t i = 1; i < tr.snapshots.size(); ++i) EXPECT_GT(tr.snapshots[i].t, tr.snapshots[i - 1].t);
  for (std::size_t i = 1; i < tr.log.size(); ++i) EXPECT_GT(tr.log[i].t, tr.log[i - 1].t);
  EXPECT_DOUBLE_EQ(tr.final().t, 0.3);
}

TEST(Evolve, LaxBlowupNearRiccatiTime) {
  const auto st = make_state(lax_setup(512));
  SolverConfig cfg;
  cfg.t_end = 2.0;
  const auto tr = evolve(st, cfg);
  EXPECT_EQ(tr.termination, Termination::GradientBlowup);
  const double tb = 1.0 / (0.4 * kPi);
  EXPECT_LT(tr.t_stop, tb);
  EXPECT_GT(tr.t_stop, 0.85 * tb);
  // The steepest point starts at x = 0 and rides a characteristic of speed 1.
  const double x_expect = tr.x_loc > 0.5 ? tb : 1.0 - tb;
  EXPECT_NEAR(tr.x_loc, x_expect, 0.05);
}

TEST(Evolve, EntropyIsFrozen) {
  const auto st = make_state(entropy_wave_setup(128));
  SolverConfig cfg;
  cfg.t_end = 0.5;
  const auto tr = evolve(st, cfg);
  const auto m0 = tr.initial().m();
  const std::vector<double> copy(m0.begin(), m0.end());
  for (const auto& s : tr.snapshots) {
    const auto m = s.m();
    ASSERT_EQ(m.size(), copy.size());
    for (std::size_t i = 0; i < m.size(); ++i) ASSERT_EQ(m[i], copy[i]);
  }
}

TEST(Evolve, ConservesMassAndMomentum) {
  const auto st = make_state(entropy_wave_setup(512, 1.4));
  SolverConfig cfg;
  cfg.t_end = 1.0;
  const auto tr = evolve(st, cfg);
  double scale_u = 0.0;
  for (double u : st.u) scale_u += std::abs(u) * st.grid.h();
  const auto& r0 = tr.log.front();
  for (const auto& r : tr.log) {
    EXPECT_LE(std::abs(r.int_u - r0.int_u) / std::max(std::abs(r0.int_u), scale_u), 1e-8);
    EXPECT_LE(std::abs(r.int_tau - r0.int_tau) / std::abs(r0.int_tau), 1e-8);
  }
}

TEST(Evolve, ConvergesAtThirdOrderOrBetter) {
  const double T = 0.25;
  SolverConfig cfg;
  cfg.t_end = T;
  cfg.snapshot_stride = 1000000;
  cfg.resolution_cap = 10.0;
  const auto ref = evolve(make_state(entropy_wave_setup(1024, 1.4)), cfg).final();
  std::vector<double> err;
  for (std::size_t n : {64u, 128u, 256u}) {
    const auto tr = evolve(make_state(entropy_wave_setup(n, 1.4)), cfg);
    ASSERT_EQ(tr.termination, Termination::ReachedTEnd);
    const std::size_t r = 1024 / n;
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e = std::max(e, std::abs(tr.final().u[i] - ref.u[i * r]));
      e = std::max(e, std::abs(tr.final().z[i] - ref.z[i * r]));
    }
    err.push_back(e);
  }
  EXPECT_GE(std::log2(err[0] / err[1]), 3.0);
  EXPECT_GE(std::log2(err[1] / err[2]), 3.0);
}

TEST(Evolve, RejectsBadConfig) {
  const auto st = make_state(Scenario{});
  SolverConfig cfg;
  cfg.cfl = 1.5;
  EXPECT_THROW(evolve(st, cfg), DomainError);
  cfg = {};
  cfg.snapshot_stride = 0;
  EXPECT_THROW(evolve(st, cfg), DomainError);
  cfg = {};
  cfg.gradient_cap = 0.0;
  EXPECT_THROW(evolve(st, cfg), DomainError);
}

TEST(Evolve, CflCollapseTermination) {
  SolverConfig cfg;
  cfg.dt_min = 1.0;
  const auto tr = evolve(make_state(lax_setup(128)), cfg);
  EXPECT_EQ(tr.termination, Termination::CflCollapse);
}

TEST(Evolve, VacuumGuardTermination) {
  // Any rarefaction pushes z under a floor placed just below the initial state.
  auto st = make_state(lax_setup(128, 0.01));
  st.gas.z_floor = 0.9999;
  SolverConfig cfg;
  cfg.t_end = 2.0;
  const auto tr = evolve(st, cfg);
  EXPECT_EQ(tr.termination, Termination::VacuumGuard);
  EXPECT_FALSE(tr.message.empty());
}
