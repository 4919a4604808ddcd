#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace lagwave;
using namespace lagwave::testing;

namespace {

/// Random smooth periodic data on [0, 1) for identity checks.
Scenario random_setup(std::mt19937& rng, bool isentropic) {
  std::uniform_real_distribution<double> G(1.1, 4.5), A(0.02, 0.2), P(0.0, 6.0);
  Scenario s;
  s.gamma = G(rng);
  s.K = 0.5 + A(rng);
  s.n = 96;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.6f*sin(2*pi*x+%.4f)+%.6f*cos(4*pi*x)", A(rng), P(rng), A(rng));
  s.u0 = buf;
  std::snprintf(buf, sizeof buf, "1+%.6f*cos(2*pi*x+%.4f)", A(rng), P(rng));
  s.thermo = buf;
  if (!isentropic) {
    std::snprintf(buf, sizeof buf, "1+%.6f*sin(2*pi*x+%.4f)", 2.0 * A(rng), P(rng));
    s.m0 = buf;
  }
  return s;
}

}  // namespace

TEST(Diagnostics, UnknownName) {
  const auto d = compute_diagnostics(make_state(Scenario{}));
  EXPECT_TRUE(d.has("y_tilde"));
  EXPECT_FALSE(d.has("w"));
  EXPECT_THROW(d.get("w"), DomainError);
  for (auto name : DiagnosticFields::names()) EXPECT_EQ(d.get(name).size(), 128u);
}

TEST(Diagnostics, ConstantStateIsQuiet) {
  Scenario s;
  s.thermo = "1.7";
  s.u0 = "0.3";
  const auto ab = alpha_beta(make_state(s));
  for (std::size_t i = 0; i < ab.alpha.size(); ++i) {
    EXPECT_NEAR(ab.alpha[i], 0.0, 1e-12);
    EXPECT_NEAR(ab.beta[i], 0.0, 1e-12);
  }
}

TEST(Diagnostics, PointwiseIdentities) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto st = make_state(random_setup(rng, trial % 4 == 0));
    const auto d = compute_diagnostics(st);
    const DiagnosticExponents ex(st.gas.gamma);
    const double g = st.gas.gamma;
    for (std::size_t i = 0; i < st.grid.n; ++i) {
      const double scale = 1.0 + std::abs(d.y[i]) + std::abs(d.q[i]);
      EXPECT_NEAR(d.alpha[i] + d.beta[i], 2.0 * d.u_x[i], 1e-12 * (1.0 + std::abs(d.u_x[i])));
      // Same quantity as 2(m z_x + ((g-1)/g) m_x z), differenced in balanced form.
      EXPECT_NEAR(d.alpha[i] - d.beta[i], 2.0 * (d.m[i] * d.z_x[i] + (g - 1) / g * d.m_x[i] * d.z[i]), 1e-4);
      if (d.m_x[i] == 0.0) {
        EXPECT_NEAR(d.alpha[i] - d.beta[i], 2.0 * d.m[i] * d.z_x[i], 1e-13);
      }
      EXPECT_NEAR(d.y[i], d.mu_bar[i] * d.y_tilde[i], 1e-12 * scale);
      EXPECT_NEAR(d.q[i], d.mu_bar[i] * d.q_tilde[i], 1e-12 * scale);
      EXPECT_NEAR(d.a0[i], d.mu_bar[i] * d.a0_t[i], 1e-12 * (1.0 + std::abs(d.a0[i])));
      EXPECT_NEAR(d.a2[i], d.a2_t[i] / d.mu_bar[i], 1e-12 * std::abs(d.a2[i]));
      EXPECT_LT(d.a2[i], 0.0);
      const double sum = 2.0 * std::pow(d.m[i], -ex.kappa) * d.u_x[i] * std::pow(d.z[i], ex.e);
      EXPECT_NEAR(d.y[i] + d.q[i], sum, 1e-12 * scale);
      EXPECT_NEAR(d.mu_bar[i], std::pow(d.m[i], -3.0 * (3.0 - g) / (2.0 * (3.0 * g - 1.0))), 1e-14);
    }
  }
}

TEST(Diagnostics, SignOfA0FollowsEntropyConvexity) {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto st = make_state(random_setup(rng, false));
    const auto d = compute_diagnostics(st);
    double scale = 0.0;
    for (double v : d.a0) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < st.grid.n; ++i) {
      if (std::abs(d.a0[i]) <= 1e-10 * scale) continue;
      const double conv = entropy_convexity(d.m[i], d.m_x[i], d.m_xx[i], st.gas.gamma);
      EXPECT_EQ(d.a0[i] > 0.0, conv < 0.0) << "cell " << i;
    }
  }
}

TEST(Diagnostics, EntropyConvexityMatchesFiniteDifference) {
  const double g = 1.4, k = -2.0 / (3.0 * g - 1.0);
  const auto m = parse_profile("1+0.3*sin(x)+0.1*cos(3*x)");
  for (double x = 0.0; x < 6.0; x += 0.13) {
    const double h = 1e-3;
    auto w = [&](double s) { return std::pow(m(s), k); };
    const double fd = (w(x + h) - 2.0 * w(x) + w(x - h)) / (h * h);
    const Jet j = m.jet(x);
    EXPECT_NEAR(entropy_convexity(j.v, j.d, j.dd, g), fd, 1e-5);
  }
}

TEST(Diagnostics, ConstantEntropyReductions) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_setup(rng, true);
    s.m0 = "1.3";
    const auto st = make_state(s);
    const auto d = compute_diagnostics(st);
    const auto sx = derivative(d.s, st.grid, 1);
    const DiagnosticExponents ex(st.gas.gamma);
    for (std::size_t i = 0; i < st.grid.n; ++i) {
      EXPECT_EQ(d.a0[i], 0.0);
      EXPECT_EQ(d.k2[i], 0.0);
      EXPECT_EQ(d.a1_t[i], 0.0);
      EXPECT_DOUBLE_EQ(d.mu_bar[i], d.mu_bar[0]);
      EXPECT_NEAR(d.y_tilde[i], sx[i] * std::pow(d.z[i], ex.e), 1e-10 * (1.0 + std::abs(d.y_tilde[i])));
    }
  }
}

TEST(Diagnostics, IsentropicRiemannGradients) {
  const auto st = make_state(lax_setup(256));
  const auto d = compute_diagnostics(st);
  const auto sx = derivative(d.s, st.grid, 1), rx = derivative(d.r, st.grid, 1);
  for (std::size_t i = 0; i < st.grid.n; ++i) {
    EXPECT_NEAR(d.alpha[i], sx[i], 1e-10);
    EXPECT_NEAR(d.beta[i], rx[i], 1e-10);
  }
}

TEST(Diagnostics, GammaThreeConstantEntropy) {
  auto s = lax_setup(128);
  s.thermo = "1+0.2*sin(2*pi*x)";
  const auto st = make_state(s);
  const auto d = compute_diagnostics(st);
  for (std::size_t i = 0; i < st.grid.n; ++i) {
    EXPECT_NEAR(d.y[i], d.z[i] * (d.u_x[i] + d.z_x[i]), 1e-12);
    EXPECT_NEAR(d.q[i], d.z[i] * (d.u_x[i] - d.z_x[i]), 1e-12);
  }
}

TEST(Diagnostics, GammaThreeUnitA2) {
  auto s = entropy_wave_setup(128);
  const auto d = compute_diagnostics(make_state(s));
  for (double a2 : d.a2) EXPECT_NEAR(a2, -1.0, 1e-14);
}

TEST(Diagnostics, StationarySolution) {
  const auto st = make_state(stationary_setup(512));
  const auto d = compute_diagnostics(st);
  const double g = st.gas.gamma;
  const DiagnosticExponents ex(g);
  // u_x = 0 and m z_x = -((g-1)/g) m_x z give
  // y = -q = (g-1)/(g(3g-1)) mu_bar z^{e+1} m_x.
  const double cst = (g - 1.0) / (g * (3.0 * g - 1.0));
  double ymax = 0.0;
  for (double v : d.y) ymax = std::max(ymax, std::abs(v));
  for (std::size_t i = 0; i < st.grid.n; ++i) {
    EXPECT_NEAR(d.alpha[i], 0.0, 1e-7);
    EXPECT_NEAR(d.beta[i], 0.0, 1e-7);
    const double expect = cst * d.mu_bar[i] * std::pow(d.z[i], ex.e + 1.0) * d.m_x[i];
    EXPECT_NEAR(d.y[i], expect, 1e-6 * ymax);
    EXPECT_NEAR(d.q[i], -expect, 1e-6 * ymax);
  }
}

TEST(Diagnostics, StationaryAlphaBetaAtRounding) {
  for (std::size_t n : {64u, 256u, 1024u}) {
    const auto ab = alpha_beta(make_state(stationary_setup(n)));
    EXPECT_LE(std::max(max_abs(ab.alpha), max_abs(ab.beta)), 1e-12) << n;
  }
}
