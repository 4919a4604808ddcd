#pragma once

// Wave-character labels, blowup thresholds and certificates, and the
// empirical blowup-time estimate of a finished run.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lagwave/diagnostics.hpp"
#include "lagwave/errors.hpp"
#include "lagwave/fields.hpp"
#include "lagwave/solver.hpp"

namespace lagwave {

// ---------------------------------------------------------------------------
// Rarefactive / compressive labels.

enum class WaveLabel { R, C, Neutral };

inline const char* to_string(WaveLabel l) {
  switch (l) {
    case WaveLabel::R: return "R";
    case WaveLabel::C: return "C";
    case WaveLabel::Neutral: return "neutral";
  }
  return "?";
}

struct RCMap {
  std::vector<WaveLabel> forward;   // sign of alpha
  std::vector<WaveLabel> backward;  // sign of beta
  double delta_rc = 0.0;
};

/// 1e-8 max|alpha|, floored at 1e-12.
inline double default_delta_rc(const StateField& s) {
  const auto d = compute_diagnostics(s);
  double amax = 0.0;
  for (double a : d.alpha) amax = std::max(amax, std::abs(a));
  return std::max(1e-8 * amax, 1e-12);
}

inline RCMap classify_rc(const StateField& s, double delta_rc) {
  const auto d = compute_diagnostics(s);
  auto label = [&](double v) {
    return v > delta_rc ? WaveLabel::R : (v < -delta_rc ? WaveLabel::C : WaveLabel::Neutral);
  };
  RCMap map;
  map.delta_rc = delta_rc;
  map.forward.reserve(d.alpha.size());
  map.backward.reserve(d.beta.size());
  for (double a : d.alpha) map.forward.push_back(label(a));
  for (double b : d.beta) map.backward.push_back(label(b));
  return map;
}

// ---------------------------------------------------------------------------
// Thresholds.

struct Thresholds {
  double N = 0.0;
  double N_tilde = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  double epsilon = 0.0;
};

namespace detail {

inline double require_bound(const std::optional<double>& b, const char* name, bool allow_zero) {
  if (!b) throw DomainError(std::string("bound ") + name + " is required");
  if (!std::isfinite(*b) || (allow_zero ? *b < 0.0 : *b <= 0.0))
    throw DomainError(std::string("bound ") + name + (allow_zero ? " must be non-negative" : " must be positive"));
  return *b;
}

}  // namespace detail

/// N and N_tilde from Z_U and M1..M4. M3 = M4 = 0 (constant entropy) is
/// accepted and gives N = N_tilde = 0.
inline Thresholds thresholds(const AssumptionBounds& b, double gamma, double epsilon) {
  if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be non-negative");
  const double ZU = detail::require_bound(b.Z_U, "Z_U", false);
  const double M1 = detail::require_bound(b.M1, "M1", false);
  const double M2 = detail::require_bound(b.M2, "M2", false);
  const double M3 = detail::require_bound(b.M3, "M3", true);
  const double M4 = detail::require_bound(b.M4, "M4", true);
  const double g = gamma;
  const DiagnosticExponents ex(g);
  const double zpow = std::pow(ZU, ex.e + 1.0);

  Thresholds t;
  t.epsilon = epsilon;
  const double Mk = g > 3.0 ? M2 : M1;
  t.N = (1.0 + epsilon) * std::sqrt(2.0 * (g - 1.0) * (g - 1.0) / (g * (g + 1.0) * (3.0 * g - 1.0)) * M2 * M4) *
        zpow * std::pow(Mk, -ex.kappa);
  const double inv = 1.0 / (1.0 + epsilon);
  t.A1 = (9.0 * g * g - 54.0 * g + 81.0) - inv * (24.0 * g * g + 32.0 * g + 8.0) / g;
  t.A2 = inv * (24.0 * g * g + 16.0 * g - 8.0) / g;
  t.N_tilde = (1.0 + epsilon) * (g - 1.0) *
              (std::abs(9.0 - 3.0 * g) * M3 + std::sqrt(std::abs(t.A1) * M3 * M3 + std::abs(t.A2) * M2 * M4)) /
              (2.0 * (3.0 * g - 1.0) * (g + 1.0)) * zpow;
  return t;
}

// ---------------------------------------------------------------------------
// Certificates.

enum class CertificateKind { Thm14Y, Thm14Q, Thm14YTilde, Thm14QTilde, Thm15Y, Thm15Q, None };

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::Thm14Y: return "thm14_y";
    case CertificateKind::Thm14Q: return "thm14_q";
    case CertificateKind::Thm14YTilde: return "thm14_ytilde";
    case CertificateKind::Thm14QTilde: return "thm14_qtilde";
    case CertificateKind::Thm15Y: return "thm15_y";
    case CertificateKind::Thm15Q: return "thm15_q";
    case CertificateKind::None: return "none";
  }
  return "?";
}

struct Certificate {
  CertificateKind kind = CertificateKind::None;
  double threshold = 0.0;  // N or N_tilde for thm14, 0 for thm15
  double epsilon = 0.0;
  double witness_x = std::numeric_limits<double>::quiet_NaN();
  double witness_value = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> t_star_bound;
  AssumptionBounds bounds_used;
  /// Valid only if the trajectory respects bounds_used; false when the
  /// theorem needs no bounds (gamma = 3 for the T* bound).
  bool conditional = true;
  std::string note;

  // Transparency for the threshold tests.
  double min_y = 0.0, min_q = 0.0, min_y_tilde = 0.0, min_q_tilde = 0.0;
  double N = 0.0, N_tilde = 0.0;
  /// Lowest pointwise root -sqrt(-a0/a2) over cells with a0 > 0; NaN if
  /// no cell has real roots other than 0.
  double lowest_root = std::numeric_limits<double>::quiet_NaN();
  bool roots_anywhere = false;
  /// A1 m_x^2 + A2 m m_xx < 0 somewhere: the unabsolute discriminant of the
  /// tilde roots is negative there.
  bool tilde_discriminant_negative = false;

  // For the T* bound.
  double A = std::numeric_limits<double>::quiet_NaN();
  bool condition_holds = false;
  double min_neg_a2 = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct ArgMin {
  double value = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
};

inline ArgMin argmin(const std::vector<double>& v) {
  ArgMin r;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < r.value) r = {v[i], i};
  return r;
}

}  // namespace detail

inline Certificate certify_thm14(const StateField& s0, const AssumptionBounds& bounds, double gamma,
                                 double epsilon = 0.01) {
  const Thresholds th = thresholds(bounds, gamma, epsilon);
  const auto d = compute_diagnostics(s0);
  Certificate c;
  c.epsilon = epsilon;
  c.bounds_used = bounds;
  c.N = th.N;
  c.N_tilde = th.N_tilde;

  const auto y = detail::argmin(d.y), q = detail::argmin(d.q);
  const auto yt = detail::argmin(d.y_tilde), qt = detail::argmin(d.q_tilde);
  c.min_y = y.value;
  c.min_q = q.value;
  c.min_y_tilde = yt.value;
  c.min_q_tilde = qt.value;

  for (std::size_t i = 0; i < d.a0.size(); ++i) {
    if (d.a0[i] > 0.0) {
      const double r = -std::sqrt(-d.a0[i] / d.a2[i]);
      c.roots_anywhere = true;
      c.lowest_root = std::isnan(c.lowest_root) ? r : std::min(c.lowest_root, r);
    }
    if (th.A1 * d.m_x[i] * d.m_x[i] + th.A2 * d.m[i] * d.m_xx[i] < 0.0) c.tilde_discriminant_negative = true;
  }

  auto grant = [&](CertificateKind k, const detail::ArgMin& w, double threshold) {
    c.kind = k;
    c.threshold = threshold;
    c.witness_x = s0.grid.x(w.i);
    c.witness_value = w.value;
  };
  // Prefer the y/q test; within a pair take the deeper violation.
  const bool vy = y.value < -th.N, vq = q.value < -th.N;
  const bool vyt = yt.value < -th.N_tilde, vqt = qt.value < -th.N_tilde;
  if (vy || vq) {
    if (vy && (!vq || y.value <= q.value)) grant(CertificateKind::Thm14Y, y, th.N);
    else grant(CertificateKind::Thm14Q, q, th.N);
  } else if (vyt || vqt) {
    if (vyt && (!vqt || yt.value <= qt.value)) grant(CertificateKind::Thm14YTilde, yt, th.N_tilde);
    else grant(CertificateKind::Thm14QTilde, qt, th.N_tilde);
  } else {
    c.threshold = th.N;
  }
  return c;
}

/// min over Assumption 2 of -a2 = K_c e z^{e-1} m^{kappa}. Empty when the
/// bounds the branch needs are missing.
inline std::optional<double> min_neg_a2(const GasConstants& gc, const AssumptionBounds& b) {
  const double g = gc.gamma;
  const DiagnosticExponents ex(g);
  if (g == 3.0) return gc.K_c * ex.e;
  if (g < 3.0) {
    if (!b.Z_L || !b.M1 || !(*b.Z_L > 0.0) || !(*b.M1 > 0.0)) return std::nullopt;
    return gc.K_c * ex.e * std::pow(*b.Z_L, ex.e - 1.0) * std::pow(*b.M1, ex.kappa);
  }
  if (!b.Z_U || !b.M2 || !(*b.Z_U > 0.0) || !(*b.M2 > 0.0)) return std::nullopt;
  return gc.K_c * ex.e * std::pow(*b.Z_U, ex.e - 1.0) * std::pow(*b.M2, ex.kappa);
}

/// Convexity condition (m^{-2/(3 gamma-1)})_xx >= -delta_cond on one side
/// of A, and a negative y (x > A) or q (x < A) there. The y side is tried
/// first; the q side is the mirror image (backward characteristics move
/// left).
inline Certificate certify_thm15(const StateField& s0, double A, const AssumptionBounds& bounds,
                                 std::optional<double> delta_cond = std::nullopt) {
  const auto d = compute_diagnostics(s0);
  const double g = s0.gas.gamma;
  Certificate c;
  c.A = A;
  c.bounds_used = bounds;
  c.conditional = g != 3.0;
  double mmax = 0.0;
  for (double v : d.m) mmax = std::max(mmax, std::abs(v));
  const double tol = delta_cond.value_or(1e-10 * mmax);
  const auto bound = min_neg_a2(s0.gas, bounds);
  if (bound) c.min_neg_a2 = *bound;

  auto attempt = [&](bool right, const std::vector<double>& v, CertificateKind kind) {
    bool holds = true, any = false;
    detail::ArgMin w;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double x = s0.grid.x(i);
      if (right ? !(x > A) : !(x < A)) continue;
      any = true;
      if (entropy_convexity(d.m[i], d.m_x[i], d.m_xx[i], g) < -tol) holds = false;
      if (v[i] < w.value) w = {v[i], i};
    }
    if (!any) return false;
    if (right || !c.condition_holds) c.condition_holds = holds;
    if (!holds || !(w.value < 0.0)) return false;
    c.kind = kind;
    c.witness_x = s0.grid.x(w.i);
    c.witness_value = w.value;
    c.condition_holds = true;
    if (bound) c.t_star_bound = -1.0 / (w.value * *bound);
    else c.note = "bounds for min(-a2) missing; no time bound";
    return true;
  };
  if (attempt(true, d.y, CertificateKind::Thm15Y)) return c;
  if (attempt(false, d.q, CertificateKind::Thm15Q)) return c;
  c.kind = CertificateKind::None;
  return c;
}

/// Per-cell sign of (3 gamma - 1) m m_xx - (3 gamma + 1) m_x^2, which is
/// the sign of a0.
inline std::vector<int> sign_a0_profile(const EntropyProfile& profile, double gamma) {
  const auto m = profile.m();
  const auto mx = profile.m_x();
  const auto mxx = profile.m_xx();
  std::vector<int> s(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double v = (3.0 * gamma - 1.0) * m[i] * mxx[i] - (3.0 * gamma + 1.0) * mx[i] * mx[i];
    s[i] = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Empirical blowup time.

struct BlowupOptions {
  /// A record counts as resolved while the dip of y (or q) spans at least
  /// this many cells.
  double resolved_cells = 20.0;
  /// Fraction of the resolved span, counted back from its end, used for the
  /// fit.
  double window_fraction = 0.5;
};

struct BlowupEstimate {
  double t_blow = 0.0;
  double uncertainty = 0.0;
  double t_linear = 0.0;  // the linear-fit root, for comparison
  double x_loc = 0.0;
  double window_begin = 0.0, window_end = 0.0;
  std::size_t points = 0;
  const char* which = "y";
  /// Set when the fit landed before the end of the run and t_blow was raised
  /// to the stopping time; the solution is still smooth there.
  bool clamped = false;
};

namespace detail {

/// Least squares polynomial (degree 1 or 2) in s = t - t_ref; returns
/// coefficients c0, c1, c2 and the rms residual.
inline std::array<double, 4> poly_fit(const std::vector<double>& t, const std::vector<double>& w, double t_ref,
                                      int deg) {
  const int m = deg + 1;
  double A[3][3] = {}, b[3] = {};
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double s = t[k] - t_ref;
    const double p[3] = {1.0, s, s * s};
    for (int i = 0; i < m; ++i) {
      b[i] += p[i] * w[k];
      for (int j = 0; j < m; ++j) A[i][j] += p[i] * p[j];
    }
  }
  for (int i = 0; i < m; ++i)
    for (int k = i + 1; k < m; ++k) {
      const double f = A[k][i] / A[i][i];
      for (int j = i; j < m; ++j) A[k][j] -= f * A[i][j];
      b[k] -= f * b[i];
    }
  std::array<double, 4> c{};
  for (int i = m - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < m; ++j) s -= A[i][j] * c[static_cast<std::size_t>(j)];
    c[static_cast<std::size_t>(i)] = s / A[i][i];
  }
  double ss = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double s = t[k] - t_ref;
    const double r = w[k] - (c[0] + c[1] * s + c[2] * s * s);
    ss += r * r;
  }
  c[3] = std::sqrt(ss / static_cast<double>(t.size()));
  return c;
}

}  // namespace detail

/// Extrapolates the zero of 1/|min(y, q)| from the last resolved part of a
/// run that ended in gradient_blowup.
inline std::optional<BlowupEstimate> detect_blowup(const Trajectory& traj, const BlowupOptions& opt = {}) {
  if (traj.termination != Termination::GradientBlowup || traj.log.size() < 4) return std::nullopt;
  const auto& log = traj.log;
  const double t0 = log.front().t;
  double t_res = t0;
  for (const auto& r : log)
    if (r.dip_width_cells >= opt.resolved_cells && std::min(r.y_min, r.q_min) < 0.0) t_res = r.t;
  if (!(t_res > t0)) t_res = log.back().t;  // never resolved: use the whole run
  const double t_lo = t_res - opt.window_fraction * (t_res - t0);

  const bool use_y = log.back().y_min <= log.back().q_min;
  std::vector<double> t, w;
  for (const auto& r : log) {
    if (r.t < t_lo || r.t > t_res) continue;
    const double v = use_y ? r.y_min : r.q_min;
    if (!(v < 0.0)) continue;
    t.push_back(r.t);
    w.push_back(-1.0 / v);
  }
  if (t.size() < 4) return std::nullopt;

  const double tr = t.back();
  const auto lin = detail::poly_fit(t, w, tr, 1);
  const auto quad = detail::poly_fit(t, w, tr, 2);
  if (!(lin[1] < 0.0)) return std::nullopt;  // 1/|y| must be falling
  const double s_lin = -lin[0] / lin[1];
  double s_quad = s_lin;
  if (quad[2] != 0.0) {
    const double disc = quad[1] * quad[1] - 4.0 * quad[2] * quad[0];
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double r1 = (-quad[1] + sq) / (2.0 * quad[2]), r2 = (-quad[1] - sq) / (2.0 * quad[2]);
      double best = std::numeric_limits<double>::infinity();
      for (double r : {r1, r2})
        if (r >= 0.0 && r < best) best = r;
      if (std::isfinite(best)) s_quad = best;
    }
  }
  BlowupEstimate e;
  e.which = use_y ? "y" : "q";
  e.t_blow = tr + s_quad;
  e.t_linear = tr + s_lin;
  e.uncertainty = std::abs(s_quad - s_lin) + quad[3] / std::abs(lin[1]);
  if (e.t_blow < traj.t_stop) {
    e.uncertainty += traj.t_stop - e.t_blow;
    e.t_blow = traj.t_stop;
    e.clamped = true;
  }
  e.x_loc = use_y ? log.back().y_argmin : log.back().q_argmin;
  e.window_begin = t.front();
  e.window_end = tr;
  e.points = t.size();
  return e;
}

}  // namespace lagwave
