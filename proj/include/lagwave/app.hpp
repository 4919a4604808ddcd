#pragma once

// Command implementations behind the lagwave executable. Each returns an
// exit status: 0 success, 2 config error, 3 numeric failure, 4 I/O error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lagwave/charpath.hpp"
#include "lagwave/config.hpp"
#include "lagwave/detector.hpp"
#include "lagwave/io.hpp"
#include "lagwave/riccati.hpp"
#include "lagwave/solver.hpp"

namespace lagwave::app {

enum ExitCode : int { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

/// Error raised inside a pipeline stage, carrying the stage name.
class StageError : public std::runtime_error {
public:
  StageError(std::string stage, const std::string& what, int code)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const { return stage_; }
  int code() const { return code_; }

private:
  std::string stage_;
  int code_;
};

struct RunSummary {
  int exit_code = kOk;
  std::string error;
  double min_y0 = std::numeric_limits<double>::quiet_NaN();
  double min_q0 = std::numeric_limits<double>::quiet_NaN();
  std::string certificate = "none";
  std::optional<double> t_star_bound;
  std::string termination;
  double t_stop = 0.0;
  std::optional<BlowupEstimate> blowup;
  std::map<ResidualKind, double> residual_max;
  std::vector<std::string> files;
};

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(name, e.what(), kConfig);
  } catch (const IoError& e) {
    throw StageError(name, e.what(), kIo);
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), kNumeric);
  }
}

inline io::CertificateSet certify_state(const StateField& s0, const RunConfig& rc) {
  io::CertificateSet set;
  const auto& b = rc.certify.bounds;
  if (b.Z_U && b.M1 && b.M2 && b.M3 && b.M4)
    set.thm14 = certify_thm14(s0, b, rc.gas.gamma, rc.certify.epsilon);
  else
    set.thm14_note = "needs certify.Z_U and certify.M1..M4";
  if (rc.certify.A)
    set.thm15 = certify_thm15(s0, *rc.certify.A, b);
  else
    set.thm15_note = "certify.A not given";
  return set;
}

class OutputDir {
public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  template <class Writer>
  void write(const std::string& name, Writer&& w) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    w(out);
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
    files_.push_back(path.string());
  }

  const std::vector<std::string>& files() const { return files_; }

private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

inline std::vector<double> default_seeds(const Grid& g, std::size_t count = 8) {
  std::vector<double> s;
  for (std::size_t k = 0; k < count; ++k) s.push_back(g.x0 + (static_cast<double>(k) + 0.5) * g.length() / count);
  return s;
}

/// Full pipeline: build, evolve, detect, trace and check residuals,
/// certify, export. Throws StageError.
inline RunSummary run_pipeline(const RunConfig& rc, std::ostream* progress = nullptr) {
  RunSummary sum;
  const StateField s0 = stage("build", [&] { return build_initial(rc.initial, rc.grid, rc.gas); });
  {
    const auto d = compute_diagnostics(s0);
    sum.min_y0 = *std::min_element(d.y.begin(), d.y.end());
    sum.min_q0 = *std::min_element(d.q.begin(), d.q.end());
  }
  const io::CertificateSet certs = stage("certify", [&] { return certify_state(s0, rc); });
  const Certificate primary = certs.primary();
  sum.certificate = to_string(primary.kind);
  sum.t_star_bound = primary.t_star_bound;

  if (progress) *progress << "evolving " << rc.grid.n << " cells to t = " << rc.solver.t_end << '\n';
  const Trajectory traj = stage("evolve", [&] { return evolve(s0, rc.solver); });
  sum.termination = to_string(traj.termination);
  sum.t_stop = traj.t_stop;
  sum.blowup = stage("detect", [&] { return detect_blowup(traj, rc.detect); });

  // Characteristics and residuals.
  std::vector<CharacteristicCurve> curves;
  std::map<ResidualKind, std::vector<io::CurveResidual>> residuals;
  const auto kinds = rc.diagnostics.residuals.empty()
                         ? std::vector<ResidualKind>(all_residual_kinds().begin(), all_residual_kinds().end())
                         : rc.diagnostics.residuals;
  const double t_window = sum.blowup ? rc.diagnostics.window_fraction * sum.blowup->t_blow
                                     : std::numeric_limits<double>::infinity();
  stage("diagnostics", [&] {
    if (traj.snapshots.size() < 5) return 0;
    TrajectorySampler sampler(traj);
    const auto seeds = rc.diagnostics.seeds.empty() ? default_seeds(rc.grid) : rc.diagnostics.seeds;
    for (double x : seeds)
      for (Direction dir : rc.diagnostics.directions) {
        curves.push_back(trace(sampler, x, dir));
        for (const char* q : {"z", "u", "c", "y", "q"}) sample_along(curves.back(), sampler, q);
      }
    for (ResidualKind k : kinds) {
      double worst = 0.0;
      for (std::size_t id = 0; id < curves.size(); ++id) {
        if (curves[id].direction != required_direction(k)) continue;
        io::CurveResidual row{id, &curves[id], residual(sampler, curves[id], k)};
        worst = std::max(worst, row.series.max_abs(t_window));
        residuals[k].push_back(std::move(row));
      }
      if (!residuals[k].empty()) sum.residual_max[k] = worst;
    }
    return 0;
  });

  const AssumptionReport report = validate_assumptions(traj, rc.certify.bounds);

  stage("export", [&] {
    OutputDir out(rc.output.directory);
    out.write("fields.csv", [&](std::ostream& o) { io::write_fields_csv(o, traj, rc.output.field_stride); });
    if (rc.output.emit_diagnostics)
      out.write("diagnostics.csv",
                [&](std::ostream& o) { io::write_trajectory_csv(o, traj, true, rc.output.field_stride); });
    out.write("log.csv", [&](std::ostream& o) { io::write_log_csv(o, traj); });
    out.write("characteristics.csv",
              [&](std::ostream& o) { write_curves_csv(o, curves, {"z", "u", "c", "y", "q"}); });
    for (const auto& [k, rows] : residuals)
      out.write(std::string("curves_") + to_string(k) + ".csv",
                [&](std::ostream& o) { io::write_residual_csv(o, rows); });
    io::MeasuredBlowup measured{to_string(traj.termination), traj.t_stop, sum.blowup};
    out.write("certificate.txt",
              [&](std::ostream& o) { io::write_certificate_report(o, certs, rc.certify.bounds, measured); });
    out.write("assumptions.txt", [&](std::ostream& o) { io::write_assumption_report(o, report); });
    out.write("summary.txt", [&](std::ostream& o) {
      o << "# run summary\n";
      o << "termination = " << sum.termination << '\n';
      o << "t_stop = " << io::num(sum.t_stop) << '\n';
      if (!traj.message.empty()) o << "# " << traj.message << '\n';
      o << "min_y0 = " << io::num(sum.min_y0) << '\n';
      o << "min_q0 = " << io::num(sum.min_q0) << '\n';
      o << "certificate = " << sum.certificate << '\n';
      o << "t_star_bound = " << (sum.t_star_bound ? io::num(*sum.t_star_bound) : "none") << '\n';
      o << "t_blow = " << (sum.blowup ? io::num(sum.blowup->t_blow) : "none") << '\n';
      if (sum.blowup) {
        o << "t_blow_uncertainty = " << io::num(sum.blowup->uncertainty) << '\n';
        o << "t_blow_from = " << sum.blowup->which << '\n';
      }
      o << "snapshots = " << traj.snapshots.size() << '\n';
      o << "steps = " << (traj.log.size() - 1) << '\n';
      o << "curves = " << curves.size() << '\n';
      o << "residual_window_end = " << io::num(t_window) << '\n';
      for (const auto& [k, v] : sum.residual_max) o << "residual_max." << to_string(k) << " = " << io::num(v) << '\n';
    });
    if (rc.output.emit_svg) {
      std::optional<double> tb;
      if (sum.blowup) tb = sum.blowup->t_blow;
      out.write("characteristics.svg", [&](std::ostream& o) {
        io::write_characteristics_svg(o, curves, rc.grid, traj.t_stop, tb);
      });
      out.write("yq_series.svg", [&](std::ostream& o) { io::write_yq_svg(o, traj); });
    }
    sum.files = out.files();
    return 0;
  });

  const bool early = traj.termination == Termination::CflCollapse || traj.termination == Termination::VacuumGuard;
  if (early && primary.kind == CertificateKind::None) {
    sum.exit_code = kNumeric;
    sum.error = std::string("run stopped with ") + to_string(traj.termination) + ": " + traj.message;
  }
  return sum;
}

inline RunConfig load_config(const std::string& path) { return build_config(ConfigText::load(path)); }

inline int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig rc = load_config(path);
    const StateField s0 = stage("build", [&] { return build_initial(rc.initial, rc.grid, rc.gas); });
    const auto report = validate_assumptions(s0, *s0.profile, rc.certify.bounds);
    out << "config ok: gamma = " << io::num(rc.gas.gamma) << ", n = " << rc.grid.n << ", t_end = "
        << io::num(rc.solver.t_end) << '\n';
    io::write_assumption_report(out, report);
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const StageError& e) {
    err << "error in " << e.what() << '\n';
    return e.code();
  }
}

inline int cmd_run(const std::string& path, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  try {
    rc = load_config(path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  }
  try {
    const RunSummary s = run_pipeline(rc, &out);
    out << "termination = " << s.termination << " at t = " << io::num(s.t_stop) << '\n';
    out << "certificate = " << s.certificate << '\n';
    if (s.blowup) out << "t_blow = " << io::num(s.blowup->t_blow) << " +- " << io::num(s.blowup->uncertainty) << '\n';
    for (const auto& f : s.files) out << "wrote " << f << '\n';
    if (s.exit_code != kOk) err << s.error << '\n';
    return s.exit_code;
  } catch (const StageError& e) {
    err << "error in " << e.what() << '\n';
    return e.code();
  }
}

inline int cmd_certify(const std::string& path, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  try {
    rc = load_config(path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  }
  try {
    const StateField s0 = stage("build", [&] { return build_initial(rc.initial, rc.grid, rc.gas); });
    const io::CertificateSet set = stage("certify", [&] { return certify_state(s0, rc); });
    const auto report = validate_assumptions(s0, *s0.profile, rc.certify.bounds);
    stage("export", [&] {
      OutputDir dir(rc.output.directory);
      dir.write("certificate.txt",
                [&](std::ostream& o) { io::write_certificate_report(o, set, rc.certify.bounds, std::nullopt); });
      dir.write("assumptions.txt", [&](std::ostream& o) { io::write_assumption_report(o, report); });
      return 0;
    });
    io::write_certificate_report(out, set, rc.certify.bounds, std::nullopt);
    return kOk;
  } catch (const StageError& e) {
    err << "error in " << e.what() << '\n';
    return e.code();
  }
}

inline std::string sanitize(const std::string& s) {
  std::string r;
  for (char ch : s) r += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-') ? ch : '_';
  return r;
}

/// One run per value of `axis`, each in its own subdirectory of the
/// template's output directory, plus summary.csv there. Failures are
/// recorded per row.
inline int cmd_sweep(const std::string& path, const std::string& axis, const std::vector<std::string>& values,
                     std::ostream& out, std::ostream& err, unsigned workers = 0) {
  ConfigText base;
  RunConfig base_rc;
  try {
    base = ConfigText::load(path);
    if (!detail::known_keys().count(axis) && axis.rfind("param.", 0) != 0)
      throw ConfigError("sweep axis '" + axis + "' is not a config key");
    if (axis.rfind("output.", 0) == 0) throw ConfigError("sweep axis cannot be an output key");
    base_rc = build_config(base);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  }

  std::vector<RunSummary> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      RunSummary& row = rows[i];
      try {
        ConfigText c = base;
        c.set(axis, values[i]);
        c.set("output.directory",
              (std::filesystem::path(base_rc.output.directory) / ("run_" + std::to_string(i) + "_" + sanitize(values[i])))
                  .string());
        row = run_pipeline(build_config(c));
      } catch (const ConfigError& e) {
        row.exit_code = kConfig;
        row.error = e.what();
      } catch (const StageError& e) {
        row.exit_code = e.code();
        row.error = e.what();
      } catch (const std::exception& e) {
        row.exit_code = kNumeric;
        row.error = e.what();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(values.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  try {
    OutputDir dir(base_rc.output.directory);
    dir.write("summary.csv", [&](std::ostream& o) {
      o << "axis,value,exit_code,min_y0,min_q0,certificate,t_star_bound,termination,t_stop,t_blow,t_blow_uncertainty";
      for (auto k : all_residual_kinds()) o << ",residual_" << to_string(k);
      o << ",error\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        o << axis << ',' << values[i] << ',' << r.exit_code << ',' << io::num(r.min_y0) << ',' << io::num(r.min_q0)
          << ',' << r.certificate << ',' << (r.t_star_bound ? io::num(*r.t_star_bound) : "") << ','
          << r.termination << ',' << io::num(r.t_stop) << ',' << (r.blowup ? io::num(r.blowup->t_blow) : "") << ','
          << (r.blowup ? io::num(r.blowup->uncertainty) : "");
        for (auto k : all_residual_kinds()) {
          auto it = r.residual_max.find(k);
          o << ',' << (it == r.residual_max.end() ? "" : io::num(it->second));
        }
        std::string e = r.error;
        std::replace(e.begin(), e.end(), ',', ';');
        std::replace(e.begin(), e.end(), '\n', ' ');
        o << ',' << e << '\n';
      }
    });
    out << "wrote " << dir.files().front() << " (" << rows.size() << " rows)\n";
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}

}  // namespace lagwave::app
