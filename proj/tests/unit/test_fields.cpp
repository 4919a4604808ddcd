#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "support.hpp"

using namespace lagwave;
using namespace lagwave::testing;

// ---------------------------------------------------------------------------
// Expressions

TEST(Expr, Literal) {
  const auto f = parse_profile("1");
  EXPECT_FALSE(f.depends_on_x());
  for (double x : {-3.0, 0.0, 2.5}) EXPECT_EQ(f(x), 1.0);
}

TEST(Expr, ExampleEntropyProfile) {
  // gamma = 3: exponent -(3 gamma - 1)/2 = -4.
  const auto f = parse_profile("(exp(-x)+1)^(-4)");
  for (double x = -5.0; x <= 5.0; x += 0.37) {
    const double base = std::exp(-x) + 1.0;
    EXPECT_NEAR(f(x), std::pow(base, -4.0), 1e-15);
    // d/dx (e^{-x}+1)^{-4} = 4 e^{-x} (e^{-x}+1)^{-5}
    EXPECT_NEAR(f.jet(x).d, 4.0 * std::exp(-x) * std::pow(base, -5.0), 1e-13);
  }
}

TEST(Expr, SyntaxErrorOffset) {
  try {
    parse_profile("sin(+)");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(parse_profile("1+"), ParseError);
  EXPECT_THROW(parse_profile("(x"), ParseError);
  EXPECT_THROW(parse_profile("x^x"), ParseError);
  EXPECT_THROW(parse_profile("2 3"), ParseError);
}

TEST(Expr, UnknownIdentifier) {
  try {
    parse_profile("1 + foo*x");
    FAIL() << "expected an unknown-identifier error";
  } catch (const UnknownIdentifierError& e) {
    EXPECT_EQ(e.name(), "foo");
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_DOUBLE_EQ(parse_profile("1 + foo*x", {{"foo", 2.0}})(3.0), 7.0);
}

TEST(Expr, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(parse_profile("2^3^2")(0), 512.0);
  EXPECT_DOUBLE_EQ(parse_profile("-2^2")(0), -4.0);
  EXPECT_DOUBLE_EQ(parse_profile("8/4/2")(0), 1.0);
  EXPECT_DOUBLE_EQ(parse_profile("1-2-3")(0), -4.0);
  EXPECT_DOUBLE_EQ(parse_profile("2*x^2+1")(3.0), 19.0);
  EXPECT_NEAR(parse_profile("sqrt(x)*tanh(0)+cos(pi)")(4.0), -1.0, 1e-15);
  EXPECT_DOUBLE_EQ(parse_profile("1.5e-1*x")(2.0), 0.3);
}

TEST(Expr, JetMatchesFiniteDifference) {
  const auto f = parse_profile("exp(sin(2*x))/(1+x^2) - sqrt(2+cos(x))*tanh(x/3)");
  for (double x = -2.0; x <= 2.0; x += 0.21) {
    const double h = 1e-4;
    const Jet j = f.jet(x);
    EXPECT_NEAR(j.d, (f(x + h) - f(x - h)) / (2 * h), 1e-6);
    EXPECT_NEAR(j.dd, (f(x + h) - 2 * f(x) + f(x - h)) / (h * h), 1e-4);
  }
}

namespace {

std::string random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
  std::uniform_real_distribution<double> val(0.1, 3.0);
  switch (pick(rng)) {
    case 0: return "x";
    case 1: return detail::format_number(val(rng));
    case 2: return "(" + random_expr(rng, depth - 1) + "+" + random_expr(rng, depth - 1) + ")";
    case 3: return "(" + random_expr(rng, depth - 1) + "-" + random_expr(rng, depth - 1) + ")";
    case 4: return "(" + random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1) + ")";
    case 5: return "(" + random_expr(rng, depth - 1) + ")/(2+cos(x))";
    case 6: return "-" + random_expr(rng, depth - 1);
    case 7: return "(1+" + random_expr(rng, depth - 1) + "^2)^0.5";
    default: {
      static const char* fn[] = {"exp", "sin", "cos", "tanh"};
      return std::string(fn[rng() % 4]) + "(" + random_expr(rng, depth - 1) + "/4)";
    }
  }
}

}  // namespace

TEST(Expr, CanonicalRoundTrip) {
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::string text = random_expr(rng, 4);
    const auto f = parse_profile(text);
    const std::string canon = f.canonical();
    const auto g = parse_profile(canon);
    EXPECT_EQ(g.canonical(), canon) << text;
    for (double x : {-1.3, 0.0, 0.7, 2.9}) {
      const double a = f(x), b = g(x);
      if (std::isfinite(a)) {
        EXPECT_DOUBLE_EQ(a, b) << text;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Grid, derivatives

TEST(Grid, Invariants) {
  EXPECT_THROW(Grid(1.0, 1.0, 32), DomainError);
  EXPECT_THROW(Grid(0.0, 1.0, 8), DomainError);
  const Grid g(-1.0, 3.0, 16);
  EXPECT_DOUBLE_EQ(g.h(), 0.25);
  EXPECT_DOUBLE_EQ(g.wrap(3.0), -1.0);
  EXPECT_DOUBLE_EQ(g.wrap(-1.5), 2.5);
  EXPECT_DOUBLE_EQ(g.wrap(7.25), -0.75);
}

TEST(Derivative, ConstantIsZero) {
  const Grid g(0.0, 2.0, 40);
  const std::vector<double> f(40, 3.7);
  for (int order : {1, 2})
    for (double v : derivative(f, g, order)) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Derivative, SineConvergesAtFourthOrder) {
  const double L = 3.0, k = 2.0 * kPi / L;
  double prev1 = 0.0, prev2 = 0.0;
  for (std::size_t n : {16u, 32u, 64u, 128u}) {
    const Grid g(0.0, L, n);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(k * g.x(i));
    const auto d1 = derivative(f, g, 1), d2 = derivative(f, g, 2);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e1 = std::max(e1, std::abs(d1[i] - k * std::cos(k * g.x(i))));
      e2 = std::max(e2, std::abs(d2[i] + k * k * std::sin(k * g.x(i))));
    }
    if (prev1 > 0.0) {
      EXPECT_GE(std::log2(prev1 / e1), 3.8) << n;
      EXPECT_GE(std::log2(prev2 / e2), 3.8) << n;
    }
    prev1 = e1;
    prev2 = e2;
  }
}

TEST(Derivative, SawtoothJumpIsLocalised) {
  const Grid g(0.0, 1.0, 64);
  std::vector<double> f(64);
  for (std::size_t i = 0; i < 64; ++i) f[i] = g.x(i);
  const auto d = derivative(f, g, 1);
  EXPECT_NEAR(d[32], 1.0, 1e-12);
  EXPECT_GT(std::abs(d[0] - 1.0), 10.0);
}

TEST(Derivative, Linear) {
  std::mt19937 rng(5);
  std::normal_distribution<double> N;
  const Grid g(0.0, 1.0, 50);
  std::vector<double> f(50), h(50), c(50);
  for (std::size_t i = 0; i < 50; ++i) f[i] = N(rng), h[i] = N(rng);
  const double a = 1.7, b = -0.4;
  for (std::size_t i = 0; i < 50; ++i) c[i] = a * f[i] + b * h[i];
  for (int order : {1, 2}) {
    const auto df = derivative(f, g, order), dh = derivative(h, g, order), dc = derivative(c, g, order);
    for (std::size_t i = 0; i < 50; ++i)
      EXPECT_NEAR(dc[i], a * df[i] + b * dh[i], 1e-10 * (1.0 + std::abs(dc[i])));
  }
  EXPECT_THROW(derivative(f, g, 3), DomainError);
  EXPECT_THROW(derivative(std::vector<double>(49), g, 1), DomainError);
}

// ---------------------------------------------------------------------------
// Initial data

TEST(BuildInitial, ConstantFromTau) {
  for (double g : {1.4, 3.0}) {
    Scenario s;
    s.gamma = g;
    s.K = 0.5;
    s.kind = ThermoInput::Tau;
    s.thermo = "1";
    const auto st = make_state(s);
    const double expect = 2.0 * std::sqrt(0.5 * g) / (g - 1.0);
    for (std::size_t i = 0; i < st.z.size(); ++i) {
      EXPECT_NEAR(st.z[i], expect, 1e-14);
      EXPECT_EQ(st.u[i], 0.0);
    }
  }
}

TEST(BuildInitial, ConstantPressureInversion) {
  const auto st = make_state(stationary_setup(256));
  const auto d = compute_diagnostics(st);
  for (double p : d.p) EXPECT_NEAR(p, 1.0, 1e-10);
}

TEST(BuildInitial, Guards) {
  Scenario s;
  s.kind = ThermoInput::Tau;
  s.thermo = "-1";
  EXPECT_THROW(make_state(s), VacuumGuardError);
  Scenario z;
  z.thermo = "0";
  EXPECT_THROW(make_state(z), VacuumGuardError);
  Scenario m;
  m.m0 = "sin(2*pi*x)";
  EXPECT_THROW(make_state(m), DomainError);
}

TEST(BuildInitial, AnalyticEntropyDerivatives) {
  Scenario s;
  s.m0 = "1+0.25*cos(2*pi*x)";
  const auto st = make_state(s);
  const auto& p = *st.profile;
  EXPECT_EQ(p.source(), ProfileFunction::Source::Expression);
  for (std::size_t i = 0; i < st.grid.n; ++i) {
    const double x = st.grid.x(i), w = 2.0 * kPi;
    EXPECT_NEAR(p.m()[i], 1.0 + 0.25 * std::cos(w * x), 1e-15);
    EXPECT_NEAR(p.m_x()[i], -0.25 * w * std::sin(w * x), 1e-13);
    EXPECT_NEAR(p.m_xx()[i], -0.25 * w * w * std::cos(w * x), 1e-12);
  }
}

TEST(ProfileFile, SampledSpline) {
  const auto path = std::filesystem::temp_directory_path() / "lagwave_profile_test.csv";
  {
    std::ofstream out(path);
    out.precision(17);
    out << "# profile\n";
    for (int i = 0; i <= 200; ++i) {
      const double x = i / 200.0;
      out << x << "," << 1.0 + 0.1 * std::sin(2 * kPi * x) << "\n";
    }
  }
  const auto f = read_profile_file(path.string());
  EXPECT_EQ(f.source(), ProfileFunction::Source::Sampled);
  for (double x = 0.1; x < 0.9; x += 0.037) {
    const Jet j = f.jet(x);
    EXPECT_NEAR(j.v, 1.0 + 0.1 * std::sin(2 * kPi * x), 1e-7);
    EXPECT_NEAR(j.d, 0.2 * kPi * std::cos(2 * kPi * x), 1e-4);
  }
  {
    std::ofstream out(path);
    out << "0,1\n1,2\n";
  }
  EXPECT_THROW(read_profile_file(path.string()), ParseError);
  {
    std::ofstream out(path);
    out << "# profile\n0,1\n0,2\n";
  }
  EXPECT_THROW(read_profile_file(path.string()), ParseError);
  std::filesystem::remove(path);
  EXPECT_THROW(read_profile_file(path.string()), IoError);
}

// ---------------------------------------------------------------------------
// Assumption reports

TEST(Assumptions, ConstantStatePasses) {
  const auto st = make_state(Scenario{});
  AssumptionBounds b;
  b.Z_L = 0.5;
  b.Z_U = 2.0;
  b.M1 = 0.5;
  b.M2 = 2.0;
  b.M3 = 1e-6;
  b.M4 = 1e-6;
  const auto r = validate_assumptions(st, *st.profile, b);
  EXPECT_TRUE(r.all_pass());
  EXPECT_EQ(r.z_lower, Verdict::Pass);
  EXPECT_EQ(r.mx_bound, Verdict::Pass);
  EXPECT_EQ(r.mx_max, 0.0);
  EXPECT_EQ(r.mxx_max, 0.0);
}

TEST(Assumptions, UncheckedWhenMissing) {
  const auto st = make_state(Scenario{});
  const auto r = validate_assumptions(st, *st.profile, AssumptionBounds{});
  EXPECT_EQ(r.z_lower, Verdict::Unchecked);
  EXPECT_EQ(r.mxx_bound, Verdict::Unchecked);
  EXPECT_TRUE(r.all_pass());
}

TEST(Assumptions, RarefactionDipsBelowLowerBound) {
  // u_x > 0 around x = 1/2 rarefies the centre; z falls below its initial value.
  Scenario s;
  s.gamma = 3.0;
  s.K = 1.0 / 3.0;
  s.n = 128;
  s.u0 = "-0.3*sin(2*pi*x)";
  const auto st = make_state(s);
  SolverConfig cfg;
  cfg.t_end = 0.3;
  cfg.snapshot_stride = 1;
  const auto traj = evolve(st, cfg);
  AssumptionBounds b;
  b.Z_L = 0.999;
  b.Z_U = 2.0;
  const auto r = validate_assumptions(traj, b);
  EXPECT_EQ(r.z_lower, Verdict::Fail);
  EXPECT_EQ(r.z_upper, Verdict::Pass);
  EXPECT_LT(r.z_min.value, 0.999);
  EXPECT_GT(r.z_min.t, 0.0);
  EXPECT_NEAR(r.z_min.x, 0.5, 0.05);
}
