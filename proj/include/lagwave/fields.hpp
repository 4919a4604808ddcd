#pragma once

// Grid-sampled initial data, the frozen entropy profile, and the periodic
// fourth-order differencing used everywhere downstream.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "lagwave/eos.hpp"
#include "lagwave/errors.hpp"
#include "lagwave/expr.hpp"
#include "lagwave/numerics.hpp"

namespace lagwave {

/// Uniform periodic grid, nodes x_i = x0 + i h for i = 0..n-1.
struct Grid {
  double x0 = 0.0;
  double x1 = 1.0;
  std::size_t n = 64;

  Grid() = default;
  Grid(double a, double b, std::size_t cells) : x0(a), x1(b), n(cells) {
    if (!(x1 > x0)) throw DomainError("grid requires x1 > x0");
    if (n < 16) throw DomainError("grid requires at least 16 cells");
  }

  double h() const { return (x1 - x0) / static_cast<double>(n); }
  double length() const { return x1 - x0; }
  double x(std::size_t i) const { return x0 + static_cast<double>(i) * h(); }

  /// Map x into [x0, x1).
  double wrap(double x) const {
    const double L = length();
    double s = x - x0;
    s -= L * std::floor(s / L);
    if (s >= L) s = 0.0;
    return x0 + s;
  }
};

/// A scalar function of x given either as an expression or as sampled data
/// interpolated with a not-a-knot cubic spline.
class ProfileFunction {
public:
  enum class Source { Expression, Sampled };

  ProfileFunction() : impl_(Expression::constant(0.0)) {}
  ProfileFunction(Expression e) : impl_(std::move(e)) {}  // NOLINT(implicit)
  ProfileFunction(NotAKnotSpline s) : impl_(std::move(s)) {}  // NOLINT(implicit)

  static ProfileFunction constant(double v) { return ProfileFunction(Expression::constant(v)); }

  Source source() const {
    return std::holds_alternative<Expression>(impl_) ? Source::Expression : Source::Sampled;
  }

  double operator()(double x) const {
    if (auto e = std::get_if<Expression>(&impl_)) return (*e)(x);
    return std::get<NotAKnotSpline>(impl_)(x);
  }

  /// Value with first and second derivative.
  Jet jet(double x) const {
    if (auto e = std::get_if<Expression>(&impl_)) return e->jet(x);
    const auto& s = std::get<NotAKnotSpline>(impl_);
    return {s(x), s.derivative(x), s.second_derivative(x)};
  }

private:
  std::variant<Expression, NotAKnotSpline> impl_;
};

/// Reads a `# profile` file: header line, then `x,value` rows with strictly
/// increasing x. Blank lines and further `#` lines are ignored.
inline ProfileFunction read_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile file '" + path + "'");
  std::string line;
  bool header = false;
  std::vector<double> xs, ys;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      if (!header && line.find("profile", first) != std::string::npos) header = true;
      continue;
    }
    if (!header) throw ParseError("profile file '" + path + "' lacks '# profile' header", 0);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0.0, v = 0.0;
    if (!(row >> x >> v))
      throw ParseError("malformed row in '" + path + "' line " + std::to_string(lineno), lineno);
    if (!xs.empty() && !(x > xs.back()))
      throw ParseError("x not strictly increasing in '" + path + "' line " + std::to_string(lineno),
                       lineno);
    xs.push_back(x);
    ys.push_back(v);
  }
  if (!header) throw ParseError("profile file '" + path + "' lacks '# profile' header", 0);
  return ProfileFunction(NotAKnotSpline(std::move(xs), std::move(ys)));
}

/// Stationary entropy variable m(x) and its first two derivatives, sampled
/// on the grid once at construction and never modified.
class EntropyProfile {
public:
  EntropyProfile(ProfileFunction m0, const Grid& grid) : fn_(std::move(m0)), grid_(grid) {
    const std::size_t n = grid.n;
    m_.resize(n);
    mx_.resize(n);
    mxx_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Jet j = fn_.jet(grid.x(i));
      if (!(j.v > 0.0) || !std::isfinite(j.v))
        throw DomainError("entropy profile m must be positive (x = " + std::to_string(grid.x(i)) + ")");
      m_[i] = j.v;
      mx_[i] = j.d;
      mxx_[i] = j.dd;
    }
  }

  ProfileFunction::Source source() const { return fn_.source(); }
  const Grid& grid() const { return grid_; }

  std::span<const double> m() const { return m_; }
  std::span<const double> m_x() const { return mx_; }
  std::span<const double> m_xx() const { return mxx_; }

  /// Evaluate the underlying function at any x (wrapped into the period).
  Jet at(double x) const { return fn_.jet(grid_.wrap(x)); }

private:
  ProfileFunction fn_;
  Grid grid_;
  std::vector<double> m_, mx_, mxx_;
};

struct StateField {
  Grid grid;
  GasConstants gas;
  double t = 0.0;
  std::vector<double> z;
  std::vector<double> u;
  std::shared_ptr<const EntropyProfile> profile;

  std::span<const double> m() const { return profile->m(); }
};

/// Periodic fourth-order central difference, first or second derivative.
inline std::vector<double> derivative(std::span<const double> f, const Grid& grid, int order) {
  const std::size_t n = f.size();
  if (n != grid.n) throw DomainError("sequence length does not match the grid");
  if (order != 1 && order != 2) throw DomainError("derivative order must be 1 or 2");
  const double h = grid.h();
  std::vector<double> d(n);
  auto at = [&](std::size_t i, std::ptrdiff_t k) {
    return f[static_cast<std::size_t>((static_cast<std::ptrdiff_t>(i) + k + 2 * static_cast<std::ptrdiff_t>(n)) %
                                      static_cast<std::ptrdiff_t>(n))];
  };
  if (order == 1) {
    const double s = 1.0 / (12.0 * h);
    for (std::size_t i = 0; i < n; ++i)
      d[i] = (-at(i, 2) + 8.0 * at(i, 1) - 8.0 * at(i, -1) + at(i, -2)) * s;
  } else {
    const double s = 1.0 / (12.0 * h * h);
    for (std::size_t i = 0; i < n; ++i)
      d[i] = (-at(i, 2) + 16.0 * at(i, 1) - 30.0 * f[i] + 16.0 * at(i, -1) - at(i, -2)) * s;
  }
  return d;
}

/// How the thermodynamic initial datum is specified.
enum class ThermoInput { Z, Tau, Pressure };

struct InitialData {
  ProfileFunction u0 = ProfileFunction::constant(0.0);
  ProfileFunction thermo = ProfileFunction::constant(1.0);
  ThermoInput kind = ThermoInput::Z;
  ProfileFunction m0 = ProfileFunction::constant(1.0);
};

inline StateField build_initial(const InitialData& data, const Grid& grid, const GasConstants& gc) {
  auto profile = std::make_shared<const EntropyProfile>(data.m0, grid);
  StateField s;
  s.grid = grid;
  s.gas = gc;
  s.t = 0.0;
  s.z.resize(grid.n);
  s.u.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    s.u[i] = data.u0(x);
    const double v = data.thermo(x);
    double z = 0.0;
    switch (data.kind) {
      case ThermoInput::Z: z = v; break;
      case ThermoInput::Tau:
        if (!(v > 0.0))
          throw VacuumGuardError("tau0 must be positive (x = " + std::to_string(x) + ")");
        z = z_of_tau(v, gc);
        break;
      case ThermoInput::Pressure: z = z_at_pressure(v, profile->m()[i], gc); break;
    }
    if (!(z > gc.z_floor) || !std::isfinite(z))
      throw VacuumGuardError("initial z at or below the vacuum floor (x = " + std::to_string(x) + ")");
    if (!std::isfinite(s.u[i])) throw DomainError("initial u is not finite");
    s.z[i] = z;
  }
  s.profile = std::move(profile);
  return s;
}

/// Assumption-2 style bounds. Unset entries are not checked.
struct AssumptionBounds {
  std::optional<double> Z_L, Z_U, M1, M2, M3, M4;
};

enum class Verdict { Pass, Fail, Unchecked };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Unchecked: return "unchecked";
  }
  return "?";
}

struct Extreme {
  double value = std::numeric_limits<double>::quiet_NaN();
  double x = 0.0;
  double t = 0.0;
};

struct AssumptionReport {
  Extreme z_min, z_max;
  double m_min = 0.0, m_max = 0.0, mx_max = 0.0, mxx_max = 0.0;
  AssumptionBounds bounds;
  Verdict z_lower = Verdict::Unchecked, z_upper = Verdict::Unchecked;
  Verdict m_lower = Verdict::Unchecked, m_upper = Verdict::Unchecked;
  Verdict mx_bound = Verdict::Unchecked, mxx_bound = Verdict::Unchecked;

  bool all_pass() const {
    for (Verdict v : {z_lower, z_upper, m_lower, m_upper, mx_bound, mxx_bound})
      if (v == Verdict::Fail) return false;
    return true;
  }
};

namespace detail {

inline void observe_state(const StateField& s, Extreme& lo, Extreme& hi) {
  for (std::size_t i = 0; i < s.z.size(); ++i) {
    const double z = s.z[i];
    if (std::isnan(lo.value) || z < lo.value) lo = {z, s.grid.x(i), s.t};
    if (std::isnan(hi.value) || z > hi.value) hi = {z, s.grid.x(i), s.t};
  }
}

inline Verdict check_less(std::optional<double> lower, double value) {
  if (!lower) return Verdict::Unchecked;
  return *lower < value ? Verdict::Pass : Verdict::Fail;
}

inline void finish_report(AssumptionReport& r, const EntropyProfile& profile) {
  const auto m = profile.m();
  const auto mx = profile.m_x();
  const auto mxx = profile.m_xx();
  r.m_min = *std::min_element(m.begin(), m.end());
  r.m_max = *std::max_element(m.begin(), m.end());
  r.mx_max = 0.0;
  r.mxx_max = 0.0;
  for (double v : mx) r.mx_max = std::max(r.mx_max, std::abs(v));
  for (double v : mxx) r.mxx_max = std::max(r.mxx_max, std::abs(v));
  const auto& b = r.bounds;
  r.z_lower = check_less(b.Z_L, r.z_min.value);
  r.z_upper = b.Z_U ? (r.z_max.value < *b.Z_U ? Verdict::Pass : Verdict::Fail) : Verdict::Unchecked;
  r.m_lower = check_less(b.M1, r.m_min);
  r.m_upper = b.M2 ? (r.m_max < *b.M2 ? Verdict::Pass : Verdict::Fail) : Verdict::Unchecked;
  r.mx_bound = b.M3 ? (r.mx_max < *b.M3 ? Verdict::Pass : Verdict::Fail) : Verdict::Unchecked;
  r.mxx_bound = b.M4 ? (r.mxx_max < *b.M4 ? Verdict::Pass : Verdict::Fail) : Verdict::Unchecked;
}

}  // namespace detail

/// Compare observed extremes of a set of states against the bounds.
inline AssumptionReport validate_assumptions(std::span<const StateField> states,
                                             const EntropyProfile& profile,
                                             const AssumptionBounds& bounds) {
  AssumptionReport r;
  r.bounds = bounds;
  for (const auto& s : states) detail::observe_state(s, r.z_min, r.z_max);
  detail::finish_report(r, profile);
  return r;
}

inline AssumptionReport validate_assumptions(const StateField& state, const EntropyProfile& profile,
                                             const AssumptionBounds& bounds) {
  return validate_assumptions(std::span<const StateField>(&state, 1), profile, bounds);
}

}  // namespace lagwave
