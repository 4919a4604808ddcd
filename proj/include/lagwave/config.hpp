#pragma once

// Run configuration: flat `key = value` text with dotted section names.
//
//   # comment
//   gas.gamma = 3
//   grid.n = 1024
//   param.amp = 0.2
//   initial.u0 = -amp*sin(2*pi*x)
//
// Sections: gas, grid, initial, solver, detect, diagnostics, certify,
// output, param. Every key is checked against the known set so typos fail
// at load rather than silently falling back to defaults.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lagwave/charpath.hpp"
#include "lagwave/detector.hpp"
#include "lagwave/eos.hpp"
#include "lagwave/errors.hpp"
#include "lagwave/expr.hpp"
#include "lagwave/fields.hpp"
#include "lagwave/riccati.hpp"
#include "lagwave/solver.hpp"

namespace lagwave {

/// Raw key/value pairs in file order.
class ConfigText {
public:
  static ConfigText parse(std::string_view text, const std::string& origin = "<config>") {
    ConfigText c;
    c.origin_ = origin;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string line(text.substr(start, end - start));
      start = end + 1;
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) {
        if (end == text.size()) break;
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      if (c.values_.count(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
      c.values_[key] = value;
      c.order_.push_back(key);
      if (end == text.size()) break;
    }
    return c;
  }

  static ConfigText load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    auto c = parse(ss.str(), path);
    c.base_dir_ = std::filesystem::path(path).parent_path();
    return c;
  }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) order_.push_back(key);
    values_[key] = value;
  }

  const std::vector<std::string>& keys() const { return order_; }
  const std::string& origin() const { return origin_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }
  void set_base_dir(std::filesystem::path p) { base_dir_ = std::move(p); }

  /// Serialise back to text (file order).
  std::string str() const {
    std::string out;
    for (const auto& k : order_) out += k + " = " + values_.at(k) + "\n";
    return out;
  }

  static std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
  }

private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
  std::string origin_;
  std::filesystem::path base_dir_;
};

struct DiagnosticsConfig {
  std::vector<double> seeds;
  std::vector<Direction> directions = {Direction::Forward, Direction::Backward};
  std::vector<ResidualKind> residuals;
  /// Residual windows end at this fraction of the measured blowup time.
  double window_fraction = 0.8;
};

struct CertifyConfig {
  AssumptionBounds bounds;
  double epsilon = 0.01;
  std::optional<double> A;
  std::optional<double> delta_rc;
};

struct OutputConfig {
  std::string directory = "out";
  bool emit_svg = true;
  bool emit_diagnostics = false;
  /// Write every k-th stored snapshot to the fields CSV.
  std::size_t field_stride = 1;
};

struct RunConfig {
  GasConstants gas;
  Grid grid;
  InitialData initial;
  std::map<std::string, std::string> initial_source;  // u0, thermo, m0 -> text
  SolverConfig solver;
  BlowupOptions detect;
  DiagnosticsConfig diagnostics;
  CertifyConfig certify;
  OutputConfig output;
  std::map<std::string, double> params;
};

namespace detail {

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> k = {
      "gas.gamma", "gas.K", "gas.c_v", "gas.z_floor",
      "grid.x0", "grid.x1", "grid.n",
      "initial.u0", "initial.u0_file", "initial.z0", "initial.z0_file", "initial.tau0", "initial.tau0_file",
      "initial.p0", "initial.p0_file", "initial.m0", "initial.m0_file",
      "solver.cfl", "solver.t_end", "solver.gradient_cap", "solver.resolution_cap", "solver.snapshot_stride",
      "solver.dt_min", "solver.max_steps",
      "detect.resolved_cells", "detect.window_fraction",
      "diagnostics.seeds", "diagnostics.directions", "diagnostics.residuals", "diagnostics.window_fraction",
      "certify.Z_L", "certify.Z_U", "certify.M1", "certify.M2", "certify.M3", "certify.M4", "certify.epsilon",
      "certify.A", "certify.delta_rc",
      "output.directory", "output.emit_svg", "output.emit_diagnostics", "output.field_stride"};
  return k;
}

inline std::string section_of(const std::string& key) { return key.substr(0, key.find('.')); }

[[noreturn]] inline void fail(const std::string& key, const std::string& what) {
  throw ConfigError("[" + section_of(key) + "] " + key + ": " + what);
}

inline double to_number(const std::string& key, const std::string& v) {
  const char* b = v.c_str();
  char* e = nullptr;
  errno = 0;
  const double d = std::strtod(b, &e);
  if (e == b || *e != '\0' || errno == ERANGE || !std::isfinite(d)) fail(key, "not a finite number: '" + v + "'");
  return d;
}

inline std::size_t to_count(const std::string& key, const std::string& v) {
  const double d = to_number(key, v);
  if (d < 0 || d != std::floor(d) || d > 1e15) fail(key, "not a non-negative integer: '" + v + "'");
  return static_cast<std::size_t>(d);
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(key, "not a boolean: '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : v) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur), cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace detail

/// Build and validate a RunConfig. Every failure is a ConfigError naming the
/// offending block and key.
inline RunConfig build_config(const ConfigText& text) {
  using detail::fail;
  for (const auto& k : text.keys()) {
    if (k.rfind("param.", 0) == 0) {
      if (k.size() == 6) fail(k, "empty parameter name");
      continue;
    }
    if (!detail::known_keys().count(k)) fail(k, "unknown key");
  }
  RunConfig rc;
  auto num = [&](const std::string& k, double def) {
    const auto v = text.get(k);
    return v ? detail::to_number(k, *v) : def;
  };
  auto opt_num = [&](const std::string& k) -> std::optional<double> {
    const auto v = text.get(k);
    if (!v) return std::nullopt;
    return detail::to_number(k, *v);
  };

  for (const auto& k : text.keys())
    if (k.rfind("param.", 0) == 0) rc.params[k.substr(6)] = detail::to_number(k, *text.get(k));

  try {
    rc.gas = make_constants(num("gas.gamma", 1.4), num("gas.K", 1.0), num("gas.c_v", 1.0),
                            num("gas.z_floor", 1e-10));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[gas] ") + e.what());
  }

  try {
    const double n = num("grid.n", 256);
    if (n < 0 || n != std::floor(n)) fail("grid.n", "not a non-negative integer");
    rc.grid = Grid(num("grid.x0", 0.0), num("grid.x1", 1.0), static_cast<std::size_t>(n));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[grid] ") + e.what());
  }

  auto profile = [&](const std::string& name, std::optional<double> def) -> std::optional<ProfileFunction> {
    const std::string ek = "initial." + name, fk = "initial." + name + "_file";
    const auto e = text.get(ek), f = text.get(fk);
    if (e && f) fail(ek, "give either an expression or a file, not both");
    if (e) {
      try {
        rc.initial_source[name] = *e;
        return ProfileFunction(parse_profile(*e, rc.params));
      } catch (const ParseError& err) {
        fail(ek, err.what());
      }
    }
    if (f) {
      auto path = std::filesystem::path(*f);
      if (path.is_relative()) path = text.base_dir() / path;
      if (!std::filesystem::exists(path)) fail(fk, "file not found: " + path.string());
      try {
        rc.initial_source[name] = "file:" + path.string();
        return read_profile_file(path.string());
      } catch (const std::exception& err) {
        fail(fk, err.what());
      }
    }
    if (def) {
      rc.initial_source[name] = detail::format_number(*def);
      return ProfileFunction::constant(*def);
    }
    return std::nullopt;
  };

  rc.initial.u0 = *profile("u0", 0.0);
  rc.initial.m0 = *profile("m0", 1.0);
  int thermo_given = 0;
  for (const auto& [name, kind] : {std::pair{"z0", ThermoInput::Z}, std::pair{"tau0", ThermoInput::Tau},
                                   std::pair{"p0", ThermoInput::Pressure}}) {
    if (auto p = profile(name, std::nullopt)) {
      ++thermo_given;
      rc.initial.thermo = *p;
      rc.initial.kind = kind;
    }
  }
  if (thermo_given == 0) {
    rc.initial.thermo = ProfileFunction::constant(1.0);
    rc.initial.kind = ThermoInput::Z;
    rc.initial_source["z0"] = "1";
  } else if (thermo_given > 1) {
    fail("initial.z0", "give exactly one of z0, tau0, p0");
  }

  auto& s = rc.solver;
  s.cfl = num("solver.cfl", s.cfl);
  s.t_end = num("solver.t_end", s.t_end);
  s.gradient_cap = num("solver.gradient_cap", s.gradient_cap);
  s.resolution_cap = num("solver.resolution_cap", s.resolution_cap);
  s.dt_min = num("solver.dt_min", s.dt_min);
  if (auto v = text.get("solver.snapshot_stride")) s.snapshot_stride = detail::to_count("solver.snapshot_stride", *v);
  if (auto v = text.get("solver.max_steps")) s.max_steps = detail::to_count("solver.max_steps", *v);
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[solver] ") + e.what());
  }

  rc.detect.resolved_cells = num("detect.resolved_cells", rc.detect.resolved_cells);
  rc.detect.window_fraction = num("detect.window_fraction", rc.detect.window_fraction);
  if (!(rc.detect.resolved_cells > 0.0)) fail("detect.resolved_cells", "must be positive");
  if (!(rc.detect.window_fraction > 0.0 && rc.detect.window_fraction <= 1.0))
    fail("detect.window_fraction", "must lie in (0, 1]");

  auto& dg = rc.diagnostics;
  if (auto v = text.get("diagnostics.seeds"))
    for (const auto& tok : detail::split_list(*v)) dg.seeds.push_back(detail::to_number("diagnostics.seeds", tok));
  if (auto v = text.get("diagnostics.directions")) {
    dg.directions.clear();
    for (const auto& tok : detail::split_list(*v)) {
      if (tok == "forward") dg.directions.push_back(Direction::Forward);
      else if (tok == "backward") dg.directions.push_back(Direction::Backward);
      else if (tok == "both") dg.directions = {Direction::Forward, Direction::Backward};
      else fail("diagnostics.directions", "expected forward, backward or both, got '" + tok + "'");
    }
  }
  if (auto v = text.get("diagnostics.residuals")) {
    for (const auto& tok : detail::split_list(*v)) {
      if (tok == "all") {
        dg.residuals.assign(all_residual_kinds().begin(), all_residual_kinds().end());
        continue;
      }
      try {
        dg.residuals.push_back(parse_residual_kind(tok));
      } catch (const DomainError& e) {
        fail("diagnostics.residuals", e.what());
      }
    }
  }
  dg.window_fraction = num("diagnostics.window_fraction", dg.window_fraction);
  if (!(dg.window_fraction > 0.0 && dg.window_fraction <= 1.0))
    fail("diagnostics.window_fraction", "must lie in (0, 1]");

  auto& cf = rc.certify;
  cf.bounds.Z_L = opt_num("certify.Z_L");
  cf.bounds.Z_U = opt_num("certify.Z_U");
  cf.bounds.M1 = opt_num("certify.M1");
  cf.bounds.M2 = opt_num("certify.M2");
  cf.bounds.M3 = opt_num("certify.M3");
  cf.bounds.M4 = opt_num("certify.M4");
  for (const auto& [k, v] : {std::pair{"certify.Z_L", cf.bounds.Z_L}, std::pair{"certify.Z_U", cf.bounds.Z_U},
                             std::pair{"certify.M1", cf.bounds.M1}, std::pair{"certify.M2", cf.bounds.M2}})
    if (v && !(*v > 0.0)) fail(k, "must be positive");
  for (const auto& [k, v] : {std::pair{"certify.M3", cf.bounds.M3}, std::pair{"certify.M4", cf.bounds.M4}})
    if (v && !(*v >= 0.0)) fail(k, "must be non-negative");
  cf.epsilon = num("certify.epsilon", cf.epsilon);
  if (!(cf.epsilon >= 0.0)) fail("certify.epsilon", "must be non-negative");
  cf.A = opt_num("certify.A");
  cf.delta_rc = opt_num("certify.delta_rc");
  if (cf.delta_rc && !(*cf.delta_rc >= 0.0)) fail("certify.delta_rc", "must be non-negative");

  auto& out = rc.output;
  if (auto v = text.get("output.directory")) {
    if (v->empty()) fail("output.directory", "empty path");
    out.directory = *v;  // relative to the working directory
  }
  if (auto v = text.get("output.emit_svg")) out.emit_svg = detail::to_bool("output.emit_svg", *v);
  if (auto v = text.get("output.emit_diagnostics"))
    out.emit_diagnostics = detail::to_bool("output.emit_diagnostics", *v);
  if (auto v = text.get("output.field_stride")) {
    out.field_stride = detail::to_count("output.field_stride", *v);
    if (out.field_stride == 0) fail("output.field_stride", "must be at least 1");
  }
  return rc;
}

}  // namespace lagwave
