#pragma once

// Method-of-lines evolution of smooth solutions with frozen entropy.
//
// The semi-discrete system is advanced in the Lagrangian conservation form
//
//   tau_t = D u,    u_t = -D p(z(tau), m),    m_t = 0,
//
// with D the periodic fourth-order central difference and classical RK4 in
// time. Pointwise this is the (z, u) system z_t = -(c/m) u_x,
// u_t = -(m c z_x + 2 (p/m) m_x): dz/dtau = -c/m, and p_x expands to the
// bracket. Differencing p directly keeps the sums of u and tau invariant and
// makes constant-pressure states exact fixed points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lagwave/diagnostics.hpp"
#include "lagwave/eos.hpp"
#include "lagwave/errors.hpp"
#include "lagwave/fields.hpp"

namespace lagwave {

struct SolverConfig {
  double cfl = 0.5;
  double t_end = 1.0;
  /// Full fields are stored every `snapshot_stride` steps (the time and
  /// conserved log are recorded every step).
  std::size_t snapshot_stride = 10;
  /// Blowup when max(|u_x|, |m z_x|) (x1 - x0) exceeds this.
  double gradient_cap = 1e4;
  /// Blowup when max(|u_x|, |m z_x|) h exceeds this fraction of the initial
  /// wave amplitude, i.e. the steepest front spans fewer than ~1/resolution_cap
  /// cells and the grid no longer resolves the smooth solution.
  double resolution_cap = 0.05;
  double dt_min = 1e-12;
  std::size_t max_steps = 50'000'000;

  void validate() const {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw DomainError("cfl must lie in (0, 1]");
    if (!(gradient_cap > 0.0)) throw DomainError("gradient_cap must be positive");
    if (!(resolution_cap > 0.0)) throw DomainError("resolution_cap must be positive");
    if (!(t_end >= 0.0)) throw DomainError("t_end must be non-negative");
    if (snapshot_stride == 0) throw DomainError("snapshot_stride must be at least 1");
    if (!(dt_min > 0.0)) throw DomainError("dt_min must be positive");
  }
};

enum class Termination { ReachedTEnd, GradientBlowup, CflCollapse, VacuumGuard };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ReachedTEnd: return "reached_t_end";
    case Termination::GradientBlowup: return "gradient_blowup";
    case Termination::CflCollapse: return "cfl_collapse";
    case Termination::VacuumGuard: return "vacuum_guard";
  }
  return "?";
}

/// Per-step record: conserved integrals plus the blowup monitors.
struct StepRecord {
  double t = 0.0;
  double int_u = 0.0;
  double int_tau = 0.0;
  double int_energy = 0.0;
  double max_gradient = 0.0;  // max(|u_x|, |m z_x|)
  double y_min = 0.0, y_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
  double y_argmin = 0.0, q_argmin = 0.0;
  /// a2 interpolated at the minima of y and q.
  double y_a2 = 0.0, q_a2 = 0.0;
  /// Half-width, in cells, of the deepest negative dip of y or q.
  double dip_width_cells = 0.0;
};

struct Trajectory {
  std::vector<StateField> snapshots;
  std::vector<StepRecord> log;
  Termination termination = Termination::ReachedTEnd;
  double t_stop = 0.0;
  double x_loc = std::numeric_limits<double>::quiet_NaN();
  std::string message;
  SolverConfig config;
  /// Velocity amplitude used by the resolution cap.
  double amplitude = 0.0;

  const StateField& initial() const { return snapshots.front(); }
  const StateField& final() const { return snapshots.back(); }
  const EntropyProfile& profile() const { return *snapshots.front().profile; }
};

/// Stable time step cfl h / max c.
inline double cfl_dt(const StateField& s, double cfl) {
  double cmax = 0.0;
  const auto m = s.m();
  for (std::size_t i = 0; i < s.z.size(); ++i) {
    const double c = sound_speed(s.z[i], m[i], s.gas);
    if (!std::isfinite(c)) throw VacuumGuardError("sound speed is not finite");
    cmax = std::max(cmax, c);
  }
  if (!(cmax > 0.0)) throw VacuumGuardError("sound speed vanished");
  return cfl * s.grid.h() / cmax;
}

namespace detail {

struct Conserved {
  std::vector<double> tau;
  std::vector<double> u;
};

inline void rhs(const Conserved& w, const StateField& ref, Conserved& out) {
  const std::size_t n = w.u.size();
  const auto m = ref.m();
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = z_of_tau(w.tau[i], ref.gas);
    p[i] = pressure(z, m[i], ref.gas);
  }
  out.tau = derivative(w.u, ref.grid, 1);
  out.u = derivative(p, ref.grid, 1);
  for (double& v : out.u) v = -v;
}

}  // namespace detail

/// One classical RK4 step. m is untouched; throws VacuumGuardError if any
/// stage leaves the admissible range.
inline StateField step(const StateField& s, double dt) {
  const std::size_t n = s.grid.n;
  detail::Conserved w0{std::vector<double>(n), s.u};
  for (std::size_t i = 0; i < n; ++i) w0.tau[i] = tau_of_z(s.z[i], s.gas);

  detail::Conserved k1, k2, k3, k4, tmp{std::vector<double>(n), std::vector<double>(n)};
  auto stage = [&](const detail::Conserved& k, double f) {
    for (std::size_t i = 0; i < n; ++i) {
      tmp.tau[i] = w0.tau[i] + f * dt * k.tau[i];
      tmp.u[i] = w0.u[i] + f * dt * k.u[i];
    }
  };
  detail::rhs(w0, s, k1);
  stage(k1, 0.5);
  detail::rhs(tmp, s, k2);
  stage(k2, 0.5);
  detail::rhs(tmp, s, k3);
  stage(k3, 1.0);
  detail::rhs(tmp, s, k4);

  StateField out;
  out.grid = s.grid;
  out.gas = s.gas;
  out.profile = s.profile;
  out.t = s.t + dt;
  out.z.resize(n);
  out.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = w0.tau[i] + dt / 6.0 * (k1.tau[i] + 2.0 * k2.tau[i] + 2.0 * k3.tau[i] + k4.tau[i]);
    out.u[i] = w0.u[i] + dt / 6.0 * (k1.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]);
    if (!std::isfinite(out.u[i])) throw VacuumGuardError("velocity became non-finite");
    out.z[i] = z_of_tau(tau, s.gas);
  }
  return out;
}

/// Semi-discrete z_t = -(c/m) D u at a stored state.
inline std::vector<double> z_rate(const StateField& s) {
  auto ux = derivative(s.u, s.grid, 1);
  const auto m = s.m();
  for (std::size_t i = 0; i < ux.size(); ++i) ux[i] *= -sound_speed(s.z[i], m[i], s.gas) / m[i];
  return ux;
}

/// Number of cells across which `f` stays below half of its (negative)
/// minimum around the minimum. Returns n when the minimum is not negative.
inline double dip_half_width(std::span<const double> f) {
  const std::size_t n = f.size();
  const auto it = std::min_element(f.begin(), f.end());
  const double fmin = *it;
  if (!(fmin < 0.0)) return static_cast<double>(n);
  const std::size_t c = static_cast<std::size_t>(it - f.begin());
  const double half = 0.5 * fmin;
  // Walk outwards with linear interpolation at the crossing.
  const auto nn = static_cast<std::ptrdiff_t>(n);
  auto idx = [&](std::ptrdiff_t k) {
    return static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(c) + k) % nn + nn) % nn);
  };
  auto walk = [&](std::ptrdiff_t dir) {
    for (std::ptrdiff_t k = 1; k < nn; ++k) {
      const double fi = f[idx(dir * k)], fj = f[idx(dir * (k - 1))];
      if (fi > half) return static_cast<double>(k - 1) + (fj - half) / (fj - fi);
    }
    return static_cast<double>(n);
  };
  return std::min(static_cast<double>(n), walk(1) + walk(-1));
}

struct RefinedMin {
  double value = 0.0;
  double x = 0.0;
  std::size_t index = 0;
  double offset = 0.0;  // in cells from `index`, |offset| <= 1/2
};

/// Minimum of periodic samples refined by the parabola through the
/// smallest sample and its neighbours.
inline RefinedMin refined_minimum(std::span<const double> f, const Grid& grid) {
  const std::size_t n = f.size();
  const std::size_t i = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  const double fm = f[(i + n - 1) % n], f0 = f[i], fp = f[(i + 1) % n];
  const double curv = fm - 2.0 * f0 + fp;
  if (!(curv > 0.0)) return {f0, grid.x(i), i, 0.0};
  const double delta = 0.5 * (fm - fp) / curv;
  return {f0 - 0.25 * (fm - fp) * delta, grid.wrap(grid.x(i) + delta * grid.h()), i, delta};
}

/// Periodic samples linearly interpolated at index + offset.
inline double sample_at(std::span<const double> f, std::size_t index, double offset) {
  const std::size_t n = f.size();
  const std::size_t j = offset >= 0.0 ? (index + 1) % n : (index + n - 1) % n;
  const double w = std::abs(offset);
  return (1.0 - w) * f[index] + w * f[j];
}

inline StepRecord record_step(const StateField& s) {
  const DiagnosticFields d = compute_diagnostics(s);
  const double h = s.grid.h();
  StepRecord r;
  r.t = s.t;
  const std::size_t n = s.grid.n;
  const double g = s.gas.gamma;
  r.y_min = r.q_min = std::numeric_limits<double>::infinity();
  r.y_max = r.q_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    r.int_u += h * d.u[i];
    r.int_tau += h * d.tau[i];
    r.int_energy += h * (0.5 * d.u[i] * d.u[i] + d.p[i] * d.tau[i] / (g - 1.0));
    r.max_gradient = std::max({r.max_gradient, std::abs(d.u_x[i]), std::abs(d.m[i] * d.z_x[i])});
    r.y_max = std::max(r.y_max, d.y[i]);
    r.q_max = std::max(r.q_max, d.q[i]);
  }
  const RefinedMin ym = refined_minimum(d.y, s.grid), qm = refined_minimum(d.q, s.grid);
  r.y_min = ym.value;
  r.y_argmin = ym.x;
  r.y_a2 = sample_at(d.a2, ym.index, ym.offset);
  r.q_min = qm.value;
  r.q_argmin = qm.x;
  r.q_a2 = sample_at(d.a2, qm.index, qm.offset);
  const auto& dip = r.y_min <= r.q_min ? d.y : d.q;
  r.dip_width_cells = dip_half_width(dip);
  return r;
}

/// Location of max(|u_x|, |m z_x|).
inline double steepest_point(const StateField& s) {
  const auto ux = derivative(s.u, s.grid, 1);
  const auto zx = derivative(s.z, s.grid, 1);
  const auto m = s.m();
  double best = -1.0, at = s.grid.x0;
  for (std::size_t i = 0; i < ux.size(); ++i) {
    const double g = std::max(std::abs(ux[i]), std::abs(m[i] * zx[i]));
    if (g > best) best = g, at = s.grid.x(i);
  }
  return at;
}

/// Velocity amplitude of the waves present: max(range of u, range of m z).
inline double wave_amplitude(const StateField& s) {
  const auto m = s.m();
  double umin = s.u[0], umax = s.u[0], smin = m[0] * s.z[0], smax = smin;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    umin = std::min(umin, s.u[i]);
    umax = std::max(umax, s.u[i]);
    const double v = m[i] * s.z[i];
    smin = std::min(smin, v);
    smax = std::max(smax, v);
  }
  return std::max(umax - umin, smax - smin);
}

inline Trajectory evolve(const StateField& s0, const SolverConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  traj.config = cfg;
  traj.snapshots.push_back(s0);
  traj.log.push_back(record_step(s0));
  traj.amplitude = wave_amplitude(s0);

  const double L = s0.grid.length();
  const double h = s0.grid.h();
  const double res_limit =
      traj.amplitude > 0.0 ? cfg.resolution_cap * traj.amplitude / h : std::numeric_limits<double>::infinity();

  StateField cur = s0;
  std::size_t steps = 0;
  bool stored = true;
  auto stop = [&](Termination kind, std::string msg) {
    traj.termination = kind;
    traj.t_stop = cur.t;
    traj.message = std::move(msg);
  };

  traj.t_stop = s0.t;
  while (cur.t < cfg.t_end) {
    if (steps >= cfg.max_steps) {
      stop(Termination::CflCollapse, "step budget exhausted");
      break;
    }
    double dt = 0.0;
    try {
      dt = cfl_dt(cur, cfg.cfl);
    } catch (const VacuumGuardError& e) {
      stop(Termination::VacuumGuard, e.what());
      break;
    }
    const bool last = cur.t + dt >= cfg.t_end;
    if (last) dt = cfg.t_end - cur.t;
    if (!last && dt < cfg.dt_min) {
      stop(Termination::CflCollapse, "time step fell below dt_min");
      break;
    }
    StateField next;
    try {
      next = step(cur, dt);
    } catch (const VacuumGuardError& e) {
      stop(Termination::VacuumGuard, e.what());
      break;
    }
    if (last) next.t = cfg.t_end;
    cur = std::move(next);
    ++steps;
    stored = false;
    StepRecord rec;
    try {
      rec = record_step(cur);
    } catch (const VacuumGuardError& e) {
      stop(Termination::VacuumGuard, e.what());
      break;
    }
    traj.log.push_back(rec);
    if (rec.max_gradient * L > cfg.gradient_cap || rec.max_gradient > res_limit ||
        !std::isfinite(rec.max_gradient)) {
      traj.termination = Termination::GradientBlowup;
      traj.t_stop = cur.t;
      traj.x_loc = steepest_point(cur);
      traj.message = rec.max_gradient * L > cfg.gradient_cap ? "gradient cap exceeded"
                                                              : "front no longer resolved by the grid";
      break;
    }
    if (steps % cfg.snapshot_stride == 0) {
      traj.snapshots.push_back(cur);
      stored = true;
    }
    traj.t_stop = cur.t;
  }
  if (!stored && cur.t > traj.snapshots.back().t) traj.snapshots.push_back(cur);
  return traj;
}

inline AssumptionReport validate_assumptions(const Trajectory& traj, const AssumptionBounds& bounds) {
  return validate_assumptions(std::span<const StateField>(traj.snapshots), traj.profile(), bounds);
}

}  // namespace lagwave
