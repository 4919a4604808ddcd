#pragma once

// Forward (dx/dt = +c) and backward (dx/dt = -c) characteristics through a
// stored trajectory, and derivatives of sampled quantities along them.
//
// Curve nodes sit at snapshot times, so sampling a quantity at a node only
// needs spatial interpolation (periodic cubic spline of the grid field).
// Between snapshots the tracer sub-steps RK4 with z interpolated by cubic
// Hermite in time, using the semi-discrete z_t stored alongside.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lagwave/diagnostics.hpp"
#include "lagwave/errors.hpp"
#include "lagwave/numerics.hpp"
#include "lagwave/solver.hpp"

namespace lagwave {

enum class Direction { Forward, Backward };

inline const char* to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

inline double sign_of(Direction d) { return d == Direction::Forward ? 1.0 : -1.0; }

struct CharacteristicCurve {
  Direction direction = Direction::Forward;
  std::vector<double> t;
  std::vector<double> x;            // wrapped into [x0, x1)
  std::vector<double> x_unwrapped;  // continuous path
  std::map<std::string, std::vector<double>> samples;

  std::size_t size() const { return t.size(); }
};

/// Lazily built spatial splines of grid diagnostics for every snapshot of a
/// trajectory. Safe to share between threads.
class TrajectorySampler {
public:
  explicit TrajectorySampler(const Trajectory& traj) : traj_(traj) {
    if (traj.snapshots.empty()) throw DomainError("trajectory has no snapshots");
    times_.reserve(traj.snapshots.size());
    for (const auto& s : traj.snapshots) times_.push_back(s.t);
  }

  const Trajectory& trajectory() const { return traj_; }
  const std::vector<double>& times() const { return times_; }

  /// Splines of a named quantity, one per snapshot. "z_t" is also available.
  const std::vector<PeriodicSpline>& splines(std::string_view name) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(std::string(name));
    if (it != cache_.end()) return it->second;
    if (name != "z_t" && !DiagnosticFields{}.has(name))
      throw DomainError("unknown quantity '" + std::string(name) + "'");
    std::vector<PeriodicSpline> out;
    out.reserve(traj_.snapshots.size());
    for (const auto& s : traj_.snapshots) {
      if (name == "z_t") {
        const auto v = z_rate(s);
        out.emplace_back(v, s.grid.x0, s.grid.h());
      } else if (name == "z") {
        out.emplace_back(s.z, s.grid.x0, s.grid.h());
      } else if (name == "u") {
        out.emplace_back(s.u, s.grid.x0, s.grid.h());
      } else {
        const auto d = compute_diagnostics(s);
        out.emplace_back(d.get(name), s.grid.x0, s.grid.h());
      }
    }
    return cache_.emplace(std::string(name), std::move(out)).first->second;
  }

  /// Quantity at (t, x). Exact snapshot times use the spatial spline only;
  /// other times use cubic Lagrange interpolation over the four nearest
  /// snapshots.
  double value(std::string_view name, double t, double x) const {
    const auto& sp = splines(name);
    const std::size_t k = snapshot_index(t);
    if (k != npos) return sp[k](x);
    const std::size_t n = times_.size();
    if (n < 2) throw DomainError("trajectory too sparse to interpolate in time");
    std::size_t j = interval(t);
    std::size_t lo = j == 0 ? 0 : j - 1;
    if (lo + 4 > n) lo = n >= 4 ? n - 4 : 0;
    const std::size_t cnt = std::min<std::size_t>(4, n - lo);
    double acc = 0.0;
    for (std::size_t a = lo; a < lo + cnt; ++a) {
      double w = 1.0;
      for (std::size_t b = lo; b < lo + cnt; ++b)
        if (b != a) w *= (t - times_[b]) / (times_[a] - times_[b]);
      acc += w * sp[a](x);
    }
    return acc;
  }

  /// z at (t, x), cubic Hermite in time between the bracketing snapshots.
  double z_at(double t, double x) const {
    const auto& z = splines("z");
    const auto& zt = splines("z_t");
    const std::size_t j = interval(t);
    const double t0 = times_[j], t1 = times_[j + 1];
    const double dt = t1 - t0;
    const double s = (t - t0) / dt;
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * z[j](x) + h10 * dt * zt[j](x) + h01 * z[j + 1](x) + h11 * dt * zt[j + 1](x);
  }

  /// Characteristic speed c(z(t, x), m(x)).
  double speed(double t, double x) const {
    const auto& s0 = traj_.snapshots.front();
    const double m = s0.profile->at(x).v;
    const double z = z_at(t, s0.grid.wrap(x));
    if (!(z > s0.gas.z_floor)) throw VacuumGuardError("interpolated z at the vacuum floor");
    return sound_speed(z, m, s0.gas);
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t snapshot_index(double t) const {
    const auto it = std::lower_bound(times_.begin(), times_.end(), t - time_tol());
    if (it != times_.end() && std::abs(*it - t) <= time_tol())
      return static_cast<std::size_t>(it - times_.begin());
    return npos;
  }

private:
  double time_tol() const { return 1e-12 * std::max(1.0, std::abs(times_.back())); }

  // Index j with times_[j] <= t <= times_[j+1].
  std::size_t interval(double t) const {
    if (times_.size() < 2) throw DomainError("trajectory too sparse to interpolate in time");
    if (t < times_.front() - time_tol() || t > times_.back() + time_tol())
      throw DomainError("time outside the trajectory span");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t j = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return std::min(j, times_.size() - 2);
  }

  const Trajectory& traj_;
  std::vector<double> times_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::vector<PeriodicSpline>> cache_;
};

struct TraceOptions {
  /// Index of the snapshot the curve starts from.
  std::size_t start_snapshot = 0;
  /// Index of the snapshot the curve ends at; npos means the last one.
  /// May be smaller than start_snapshot to integrate backwards in time.
  std::size_t end_snapshot = TrajectorySampler::npos;
  /// RK4 sub-steps per snapshot interval.
  int substeps = 4;
};

/// Integrate dx/dt = +-c from (t_start, x_start) through the stored fields.
inline CharacteristicCurve trace(const TrajectorySampler& sampler, double x_start, Direction dir,
                                 const TraceOptions& opt = {}) {
  const auto& times = sampler.times();
  const Trajectory& traj = sampler.trajectory();
  if (times.size() < 2) throw DomainError("trajectory needs at least 2 snapshots to trace");
  const std::size_t last = times.size() - 1;
  const std::size_t a = opt.start_snapshot;
  const std::size_t b = opt.end_snapshot == TrajectorySampler::npos ? last : opt.end_snapshot;
  if (a > last || b > last) throw DomainError("snapshot index out of range");
  const Grid& grid = traj.snapshots.front().grid;
  // Sub-stepping only sees the fields through the snapshot interpolant; very
  // sparse snapshots make the curve meaningless.
  const double cmax_dt = [&] {
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < times.size(); ++j) worst = std::max(worst, times[j + 1] - times[j]);
    return worst;
  }();
  {
    const auto& s0 = traj.snapshots.front();
    const double dt0 = cfl_dt(s0, 1.0);
    if (cmax_dt > 50.0 * dt0)
      throw DomainError("trajectory snapshots too sparse for characteristic tracing (reduce snapshot_stride)");
  }

  const double sgn = sign_of(dir);
  CharacteristicCurve curve;
  curve.direction = dir;
  double x = x_start;
  auto push = [&](std::size_t j) {
    curve.t.push_back(times[j]);
    curve.x_unwrapped.push_back(x);
    curve.x.push_back(grid.wrap(x));
  };
  push(a);
  const int step_dir = b >= a ? 1 : -1;
  for (std::size_t j = a; j != b; j = static_cast<std::size_t>(static_cast<long long>(j) + step_dir)) {
    const std::size_t k = static_cast<std::size_t>(static_cast<long long>(j) + step_dir);
    const double t0 = times[j], t1 = times[k];
    const double dt = (t1 - t0) / opt.substeps;
    double t = t0;
    for (int sub = 0; sub < opt.substeps; ++sub) {
      const double tm = t + 0.5 * dt;
      const double te = sub + 1 == opt.substeps ? t1 : t + dt;
      const double k1 = sgn * sampler.speed(t, x);
      const double k2 = sgn * sampler.speed(tm, x + 0.5 * dt * k1);
      const double k3 = sgn * sampler.speed(tm, x + 0.5 * dt * k2);
      const double k4 = sgn * sampler.speed(te, x + dt * k3);
      x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = te;
    }
    push(k);
  }
  if (step_dir < 0) {
    std::reverse(curve.t.begin(), curve.t.end());
    std::reverse(curve.x.begin(), curve.x.end());
    std::reverse(curve.x_unwrapped.begin(), curve.x_unwrapped.end());
  }
  return curve;
}

inline CharacteristicCurve trace(const Trajectory& traj, double x_start, Direction dir,
                                 const TraceOptions& opt = {}) {
  TrajectorySampler sampler(traj);
  return trace(sampler, x_start, dir, opt);
}

/// Interpolate a named grid quantity onto the curve nodes and store it in
/// curve.samples. Returns the sampled sequence.
inline const std::vector<double>& sample_along(CharacteristicCurve& curve, const TrajectorySampler& sampler,
                                               std::string_view quantity) {
  if (!DiagnosticFields{}.has(quantity)) throw DomainError("unknown quantity '" + std::string(quantity) + "'");
  std::vector<double> v(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) v[i] = sampler.value(quantity, curve.t[i], curve.x[i]);
  auto& slot = curve.samples[std::string(quantity)];
  slot = std::move(v);
  return slot;
}

inline const std::vector<double>& sample_along(CharacteristicCurve& curve, const Trajectory& traj,
                                               std::string_view quantity) {
  TrajectorySampler sampler(traj);
  return sample_along(curve, sampler, quantity);
}

/// d/dt of a sampled series along the curve: five-point finite differences
/// in curve time, centred in the interior and one-sided at the ends. On a
/// forward curve this is (.)' = d_t + c d_x, on a backward curve d_t - c d_x.
inline std::vector<double> directional_derivative(const CharacteristicCurve& curve, std::string_view quantity) {
  const auto it = curve.samples.find(std::string(quantity));
  if (it == curve.samples.end())
    throw DomainError("quantity '" + std::string(quantity) + "' not sampled on the curve");
  const auto& f = it->second;
  const std::size_t n = curve.size();
  if (n < 5) throw DomainError("directional derivative needs at least 5 nodes");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i < 2 ? 0 : i - 2;
    if (lo + 5 > n) lo = n - 5;
    const auto w = fd_weights(curve.t[i], std::span<const double>(curve.t.data() + lo, 5), 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < 5; ++k) acc += w[k] * f[lo + k];
    d[i] = acc;
  }
  return d;
}

/// `curve_id,direction,t,x,<quantities...>` rows.
inline void write_curves_csv(std::ostream& out, const std::vector<CharacteristicCurve>& curves,
                             const std::vector<std::string>& quantities) {
  out << "curve_id,direction,t,x";
  for (const auto& q : quantities) out << ',' << q;
  out << '\n';
  char buf[64];
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& cv = curves[c];
    for (std::size_t i = 0; i < cv.size(); ++i) {
      out << c << ',' << to_string(cv.direction);
      std::snprintf(buf, sizeof buf, ",%.15g,%.15g", cv.t[i], cv.x[i]);
      out << buf;
      for (const auto& q : quantities) {
        const auto it = cv.samples.find(q);
        const double v = it == cv.samples.end() ? std::nan("") : it->second[i];
        std::snprintf(buf, sizeof buf, ",%.15g", v);
        out << buf;
      }
      out << '\n';
    }
  }
}

}  // namespace lagwave
