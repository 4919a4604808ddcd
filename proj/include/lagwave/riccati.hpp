#pragma once

// Residuals of the characteristic ODEs along traced curves, the phase-line
// classification of v' = a0 + a2 v^2, and an adaptive integrator for it.
//
//   rem1        alpha'   = k1 (k2 (3 alpha + beta) + alpha beta - alpha^2)     forward
//   rem2        beta`    = k1 (-k2 (alpha + 3 beta) + alpha beta - beta^2)     backward
//   ode_y       y'       = a0 + a2 y^2                                         forward
//   ode_q       q`       = a0 + a2 q^2                                         backward
//   ode_ytilde  y_tilde' = a0_t + a1_t y_tilde + a2_t y_tilde^2                forward
//   ode_qtilde  q_tilde` = a0_t - a1_t q_tilde + a2_t q_tilde^2                backward

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lagwave/charpath.hpp"
#include "lagwave/errors.hpp"
#include "lagwave/numerics.hpp"

namespace lagwave {

enum class ResidualKind { Rem1, Rem2, OdeY, OdeQ, OdeYTilde, OdeQTilde };

inline const char* to_string(ResidualKind k) {
  switch (k) {
    case ResidualKind::Rem1: return "rem1";
    case ResidualKind::Rem2: return "rem2";
    case ResidualKind::OdeY: return "ode_y";
    case ResidualKind::OdeQ: return "ode_q";
    case ResidualKind::OdeYTilde: return "ode_ytilde";
    case ResidualKind::OdeQTilde: return "ode_qtilde";
  }
  return "?";
}

inline const std::array<ResidualKind, 6>& all_residual_kinds() {
  static const std::array<ResidualKind, 6> all = {ResidualKind::Rem1, ResidualKind::Rem2,
                                                  ResidualKind::OdeY, ResidualKind::OdeQ,
                                                  ResidualKind::OdeYTilde, ResidualKind::OdeQTilde};
  return all;
}

inline ResidualKind parse_residual_kind(std::string_view s) {
  for (auto k : all_residual_kinds())
    if (s == to_string(k)) return k;
  throw DomainError("unknown residual '" + std::string(s) + "'");
}

/// Direction of the derivative the equation is written in.
inline Direction required_direction(ResidualKind k) {
  switch (k) {
    case ResidualKind::Rem1:
    case ResidualKind::OdeY:
    case ResidualKind::OdeYTilde: return Direction::Forward;
    default: return Direction::Backward;
  }
}

/// The quantity whose derivative the equation prescribes.
inline const char* unknown_of(ResidualKind k) {
  switch (k) {
    case ResidualKind::Rem1: return "alpha";
    case ResidualKind::Rem2: return "beta";
    case ResidualKind::OdeY: return "y";
    case ResidualKind::OdeQ: return "q";
    case ResidualKind::OdeYTilde: return "y_tilde";
    case ResidualKind::OdeQTilde: return "q_tilde";
  }
  return "?";
}

struct ResidualSeries {
  ResidualKind kind = ResidualKind::OdeY;
  std::vector<double> t;
  std::vector<double> value;     // the unknown sampled on the curve
  std::vector<double> measured;  // its directional derivative
  std::vector<double> rhs;
  std::vector<double> residual;  // measured - rhs

  /// max |residual| over nodes with t <= t_max.
  double max_abs(double t_max = std::numeric_limits<double>::infinity()) const {
    double r = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] <= t_max) r = std::max(r, std::abs(residual[i]));
    return r;
  }
};

inline ResidualSeries residual(const TrajectorySampler& sampler, const CharacteristicCurve& curve,
                               ResidualKind which) {
  if (curve.direction != required_direction(which))
    throw DomainError(std::string(to_string(which)) + " needs a " + to_string(required_direction(which)) +
                      " characteristic, got " + to_string(curve.direction));
  CharacteristicCurve c = curve;
  auto get = [&](const char* name) -> const std::vector<double>& {
    auto it = c.samples.find(name);
    if (it != c.samples.end()) return it->second;
    return sample_along(c, sampler, name);
  };
  const char* unk = unknown_of(which);
  const auto& v = get(unk);
  ResidualSeries out;
  out.kind = which;
  out.t = c.t;
  out.value = v;
  out.measured = directional_derivative(c, unk);
  const std::size_t n = c.size();
  out.rhs.resize(n);
  switch (which) {
    case ResidualKind::Rem1:
    case ResidualKind::Rem2: {
      const auto& a = get("alpha");
      const auto& b = get("beta");
      const auto& k1 = get("k1");
      const auto& k2 = get("k2");
      for (std::size_t i = 0; i < n; ++i)
        out.rhs[i] = which == ResidualKind::Rem1
                         ? k1[i] * (k2[i] * (3.0 * a[i] + b[i]) + a[i] * b[i] - a[i] * a[i])
                         : k1[i] * (-k2[i] * (a[i] + 3.0 * b[i]) + a[i] * b[i] - b[i] * b[i]);
      break;
    }
    case ResidualKind::OdeY:
    case ResidualKind::OdeQ: {
      const auto& a0 = get("a0");
      const auto& a2 = get("a2");
      for (std::size_t i = 0; i < n; ++i) out.rhs[i] = a0[i] + a2[i] * v[i] * v[i];
      break;
    }
    case ResidualKind::OdeYTilde:
    case ResidualKind::OdeQTilde: {
      const auto& a0 = get("a0_t");
      const auto& a1 = get("a1_t");
      const auto& a2 = get("a2_t");
      const double s = which == ResidualKind::OdeYTilde ? 1.0 : -1.0;
      for (std::size_t i = 0; i < n; ++i) out.rhs[i] = a0[i] + s * a1[i] * v[i] + a2[i] * v[i] * v[i];
      break;
    }
  }
  out.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.residual[i] = out.measured[i] - out.rhs[i];
  return out;
}

inline ResidualSeries residual(const Trajectory& traj, const CharacteristicCurve& curve, ResidualKind which) {
  TrajectorySampler sampler(traj);
  return residual(sampler, curve, which);
}

// ---------------------------------------------------------------------------
// Phase line of v' = a0 + a2 v^2 with a2 < 0.

enum class RootKind { None, Single, Pair };
enum class Region { Below, Between, Above, Unbounded };
enum class Monotonicity { Increasing, Decreasing, Stationary };

inline const char* to_string(RootKind r) {
  switch (r) {
    case RootKind::None: return "none";
    case RootKind::Single: return "single";
    case RootKind::Pair: return "pair";
  }
  return "?";
}
inline const char* to_string(Region r) {
  switch (r) {
    case Region::Below: return "below";
    case Region::Between: return "between";
    case Region::Above: return "above";
    case Region::Unbounded: return "unbounded";
  }
  return "?";
}
inline const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::Increasing: return "increasing";
    case Monotonicity::Decreasing: return "decreasing";
    case Monotonicity::Stationary: return "stationary";
  }
  return "?";
}

struct PhaseRegime {
  RootKind roots = RootKind::None;
  double root = 0.0;  // the positive root sqrt(-a0/a2) (0 for a single root)
  /// Below the lower root, between the roots, above the upper root. With a
  /// single root 0, v < 0 is below and v > 0 above; with no roots, unbounded.
  Region region = Region::Unbounded;
  Monotonicity monotonicity = Monotonicity::Decreasing;
};

inline PhaseRegime phase_classify(double a0, double a2, double v) {
  if (!(a2 < 0.0)) throw DomainError("phase_classify requires a2 < 0");
  PhaseRegime r;
  if (a0 > 0.0) {
    r.roots = RootKind::Pair;
    r.root = std::sqrt(-a0 / a2);
    r.region = v < -r.root ? Region::Below : (v > r.root ? Region::Above : Region::Between);
  } else if (a0 == 0.0) {
    r.roots = RootKind::Single;
    r.region = v < 0.0 ? Region::Below : (v > 0.0 ? Region::Above : Region::Between);
  }
  const double rate = a0 + a2 * v * v;
  r.monotonicity = rate > 0.0 ? Monotonicity::Increasing
                              : (rate < 0.0 ? Monotonicity::Decreasing : Monotonicity::Stationary);
  return r;
}

// ---------------------------------------------------------------------------
// v' = a0(t) + a2(t) v^2 along a coefficient series.

/// Time-dependent coefficients, interpolated by not-a-knot cubic splines
/// (linearly for fewer than four samples).
class CoefficientSeries {
public:
  static CoefficientSeries constant(double a0, double a2, double t0, double t1) {
    return CoefficientSeries({t0, t1}, {a0, a0}, {a2, a2});
  }

  CoefficientSeries(std::vector<double> t, std::vector<double> a0, std::vector<double> a2)
      : t_(std::move(t)), a0_(std::move(a0)), a2_(std::move(a2)) {
    if (t_.size() < 2 || a0_.size() != t_.size() || a2_.size() != t_.size())
      throw DomainError("coefficient series needs at least 2 aligned samples");
    for (double v : a2_)
      if (!(v < 0.0)) throw DomainError("coefficient a2 must be negative throughout");
    constant_ = std::all_of(a0_.begin(), a0_.end(), [&](double v) { return v == a0_.front(); }) &&
                std::all_of(a2_.begin(), a2_.end(), [&](double v) { return v == a2_.front(); });
    if (!constant_ && t_.size() >= 4) {
      s0_ = NotAKnotSpline(t_, a0_);
      s2_ = NotAKnotSpline(t_, a2_);
    }
  }

  double t_begin() const { return t_.front(); }
  double t_end() const { return t_.back(); }
  bool is_constant() const { return constant_; }

  std::pair<double, double> operator()(double t) const {
    if (constant_) return {a0_.front(), a2_.front()};
    if (s0_) return {(*s0_)(t), std::min((*s2_)(t), -std::numeric_limits<double>::min())};
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t j = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    j = std::min(j, t_.size() - 2);
    const double w = (t - t_[j]) / (t_[j + 1] - t_[j]);
    return {(1 - w) * a0_[j] + w * a0_[j + 1], (1 - w) * a2_[j] + w * a2_[j + 1]};
  }

  const std::vector<double>& a0() const { return a0_; }
  const std::vector<double>& a2() const { return a2_; }

private:
  std::vector<double> t_, a0_, a2_;
  bool constant_ = false;
  std::optional<NotAKnotSpline> s0_, s2_;
};

struct RiccatiOptions {
  double eps_blow = 1e-8;  // blowup once |v| > 1/eps_blow
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 1'000'000;
};

struct RiccatiOutcome {
  bool blowup = false;
  double t_b = std::numeric_limits<double>::quiet_NaN();
  double t_end = 0.0;
  double value_end = 0.0;
  std::size_t steps = 0;
  /// Closed-form blowup time when a0 = 0 and a2 is constant (only if
  /// v0 < 0), and the difference to the numerical estimate.
  std::optional<double> closed_form_t_b;
  double closed_form_discrepancy = 0.0;
};

/// Dormand-Prince 5(4) with step-size control. Near a blowup the step
/// shrinks with |v|; t_b is extrapolated from the last three accepted steps
/// through the quadratic interpolant of w = 1/v.
inline RiccatiOutcome integrate_riccati(double v0, const CoefficientSeries& coef, const RiccatiOptions& opt = {}) {
  auto f = [&](double t, double v) {
    const auto [a0, a2] = coef(t);
    return a0 + a2 * v * v;
  };
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  RiccatiOutcome out;
  const double T0 = coef.t_begin(), T1 = coef.t_end();
  double t = T0, v = v0;
  double h = std::max(1e-6 * (T1 - T0), 1e-12);
  const double vmax = 1.0 / opt.eps_blow;
  std::array<double, 3> tt{}, ww{};
  std::size_t hist = 0;
  auto remember = [&](double tn, double vn) {
    tt[0] = tt[1], ww[0] = ww[1];
    tt[1] = tt[2], ww[1] = ww[2];
    tt[2] = tn, ww[2] = 1.0 / vn;
    ++hist;
  };
  remember(t, v);
  double k1 = f(t, v);
  while (t < T1 && out.steps < opt.max_steps) {
    if (t + h > T1) h = T1 - t;
    const double k2 = f(t + c2 * h, v + h * a21 * k1);
    const double k3 = f(t + c3 * h, v + h * (a31 * k1 + a32 * k2));
    const double k4 = f(t + c4 * h, v + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = f(t + c5 * h, v + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double k6 = f(t + h, v + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const double vn = v + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double k7 = f(t + h, vn);
    const double err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double sc = opt.atol + opt.rtol * std::max(std::abs(v), std::abs(vn));
    const double ratio = std::isfinite(vn) ? std::abs(err) / sc : std::numeric_limits<double>::infinity();
    if (ratio <= 1.0) {
      t += h;
      v = vn;
      k1 = k7;
      ++out.steps;
      remember(t, v);
      if (std::abs(v) > vmax) {
        out.blowup = true;
        break;
      }
    }
    const double fac = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    h *= fac;
    if (h < 1e-300) break;
  }
  out.t_end = t;
  out.value_end = v;
  if (out.blowup) {
    // w = 1/v vanishes at t_b; w is smooth there.
    double tb = tt[2] - ww[2] * (tt[2] - tt[1]) / (ww[2] - ww[1]);
    if (hist >= 3) {
      const double d01 = (ww[1] - ww[0]) / (tt[1] - tt[0]);
      const double d12 = (ww[2] - ww[1]) / (tt[2] - tt[1]);
      const double d012 = (d12 - d01) / (tt[2] - tt[0]);
      // Newton from the secant estimate on the interpolant.
      for (int it = 0; it < 5; ++it) {
        const double w = ww[2] + d12 * (tb - tt[2]) + d012 * (tb - tt[2]) * (tb - tt[1]);
        const double dw = d12 + d012 * ((tb - tt[2]) + (tb - tt[1]));
        if (dw == 0.0) break;
        tb -= w / dw;
      }
    }
    out.t_b = tb;
  }
  if (coef.is_constant() && coef.a0().front() == 0.0) {
    const double a2 = coef.a2().front();
    if (v0 < 0.0) {
      out.closed_form_t_b = T0 + 1.0 / (a2 * v0);
      if (out.blowup) out.closed_form_discrepancy = std::abs(out.t_b - *out.closed_form_t_b);
    } else {
      const double exact = v0 / (1.0 - a2 * v0 * (out.t_end - T0));
      out.closed_form_discrepancy = std::abs(out.value_end - exact);
    }
  }
  return out;
}

}  // namespace lagwave
