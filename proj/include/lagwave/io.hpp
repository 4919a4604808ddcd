#pragma once

// Text artefacts: field and curve CSV, key = value reports, SVG plots.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lagwave/charpath.hpp"
#include "lagwave/detector.hpp"
#include "lagwave/diagnostics.hpp"
#include "lagwave/fields.hpp"
#include "lagwave/riccati.hpp"
#include "lagwave/solver.hpp"

namespace lagwave::io {

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline const char* kFieldsHeader = "t,x,z,u,m,p,c,alpha,beta,y,q";
inline const char* kTrajectoryHeader = "t,x,z,u,m,p,c";
inline const char* kDiagnosticColumns = "alpha,beta,y,q,y_tilde,q_tilde,a0,a2";

/// `t,x,z,u,m,p,c,alpha,beta,y,q`, one row per (snapshot, cell).
inline void write_fields_csv(std::ostream& out, const Trajectory& traj, std::size_t stride = 1) {
  out << kFieldsHeader << '\n';
  const std::size_t ns = traj.snapshots.size();
  for (std::size_t k = 0; k < ns; ++k) {
    if (k % stride != 0 && k + 1 != ns) continue;
    const auto& s = traj.snapshots[k];
    const auto d = compute_diagnostics(s);
    for (std::size_t i = 0; i < s.grid.n; ++i) {
      out << num(s.t) << ',' << num(s.grid.x(i)) << ',' << num(d.z[i]) << ',' << num(d.u[i]) << ',' << num(d.m[i])
          << ',' << num(d.p[i]) << ',' << num(d.c[i]) << ',' << num(d.alpha[i]) << ',' << num(d.beta[i]) << ','
          << num(d.y[i]) << ',' << num(d.q[i]) << '\n';
    }
  }
}

/// `t,x,z,u,m,p,c` plus, with `diagnostics`, the appended
/// `alpha,beta,y,q,y_tilde,q_tilde,a0,a2` columns.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj, bool diagnostics,
                                 std::size_t stride = 1) {
  out << kTrajectoryHeader;
  if (diagnostics) out << ',' << kDiagnosticColumns;
  out << '\n';
  const std::size_t ns = traj.snapshots.size();
  for (std::size_t k = 0; k < ns; ++k) {
    if (k % stride != 0 && k + 1 != ns) continue;
    const auto& s = traj.snapshots[k];
    const auto d = compute_diagnostics(s);
    for (std::size_t i = 0; i < s.grid.n; ++i) {
      out << num(s.t) << ',' << num(s.grid.x(i)) << ',' << num(d.z[i]) << ',' << num(d.u[i]) << ','
          << num(d.m[i]) << ',' << num(d.p[i]) << ',' << num(d.c[i]);
      if (diagnostics)
        out << ',' << num(d.alpha[i]) << ',' << num(d.beta[i]) << ',' << num(d.y[i]) << ',' << num(d.q[i]) << ','
            << num(d.y_tilde[i]) << ',' << num(d.q_tilde[i]) << ',' << num(d.a0[i]) << ',' << num(d.a2[i]);
      out << '\n';
    }
  }
}

/// Per-step log of conserved integrals and monitors.
inline void write_log_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,int_u,int_tau,int_energy,max_gradient,y_min,q_min,y_max,q_max,dip_width_cells\n";
  for (const auto& r : traj.log)
    out << num(r.t) << ',' << num(r.int_u) << ',' << num(r.int_tau) << ',' << num(r.int_energy) << ','
        << num(r.max_gradient) << ',' << num(r.y_min) << ',' << num(r.q_min) << ',' << num(r.y_max) << ','
        << num(r.q_max) << ',' << num(r.dip_width_cells) << '\n';
}

struct CurveResidual {
  std::size_t curve_id = 0;
  const CharacteristicCurve* curve = nullptr;
  ResidualSeries series;
};

/// `curve_id,direction,t,x,value,residual`.
inline void write_residual_csv(std::ostream& out, const std::vector<CurveResidual>& rows) {
  out << "curve_id,direction,t,x,value,residual\n";
  for (const auto& r : rows) {
    const auto& c = *r.curve;
    for (std::size_t i = 0; i < c.size(); ++i)
      out << r.curve_id << ',' << to_string(c.direction) << ',' << num(c.t[i]) << ',' << num(c.x[i]) << ','
          << num(r.series.value[i]) << ',' << num(r.series.residual[i]) << '\n';
  }
}

inline void write_bounds(std::ostream& out, const AssumptionBounds& b) {
  auto opt = [&](const char* k, const std::optional<double>& v) {
    out << "bounds." << k << " = " << (v ? num(*v) : std::string("unset")) << '\n';
  };
  opt("Z_L", b.Z_L);
  opt("Z_U", b.Z_U);
  opt("M1", b.M1);
  opt("M2", b.M2);
  opt("M3", b.M3);
  opt("M4", b.M4);
}

inline void write_certificate_fields(std::ostream& out, const std::string& prefix, const Certificate& c) {
  out << prefix << "kind = " << to_string(c.kind) << '\n';
  out << prefix << "threshold = " << num(c.threshold) << '\n';
  out << prefix << "epsilon = " << num(c.epsilon) << '\n';
  out << prefix << "witness_x = " << num(c.witness_x) << '\n';
  out << prefix << "witness_value = " << num(c.witness_value) << '\n';
  out << prefix << "t_star_bound = " << (c.t_star_bound ? num(*c.t_star_bound) : std::string("none")) << '\n';
  out << prefix << "conditional_on_assumptions = " << (c.conditional ? "true" : "false") << '\n';
}

struct CertificateSet {
  std::optional<Certificate> thm14;
  std::optional<Certificate> thm15;
  std::string thm14_note;
  std::string thm15_note;

  /// The certificate reported at top level: a T* bound when available,
  /// otherwise a threshold certificate, otherwise none.
  Certificate primary() const {
    if (thm15 && thm15->kind != CertificateKind::None) return *thm15;
    if (thm14 && thm14->kind != CertificateKind::None) return *thm14;
    if (thm14) return *thm14;
    if (thm15) return *thm15;
    return {};
  }
};

struct MeasuredBlowup {
  std::string termination;
  double t_stop = 0.0;
  std::optional<BlowupEstimate> estimate;
};

inline void write_certificate_report(std::ostream& out, const CertificateSet& set, const AssumptionBounds& bounds,
                                     const std::optional<MeasuredBlowup>& measured) {
  out << "# blowup certificate\n";
  out << "# valid only while the solution stays inside the stated bounds; see the assumption report\n";
  write_certificate_fields(out, "", set.primary());
  write_bounds(out, bounds);
  if (set.thm14) {
    const auto& c = *set.thm14;
    out << "\n# threshold test on the initial data\n";
    write_certificate_fields(out, "thm14.", c);
    out << "thm14.N = " << num(c.N) << '\n';
    out << "thm14.N_tilde = " << num(c.N_tilde) << '\n';
    out << "thm14.min_y = " << num(c.min_y) << '\n';
    out << "thm14.min_q = " << num(c.min_q) << '\n';
    out << "thm14.min_y_tilde = " << num(c.min_y_tilde) << '\n';
    out << "thm14.min_q_tilde = " << num(c.min_q_tilde) << '\n';
    out << "thm14.roots_anywhere = " << (c.roots_anywhere ? "true" : "false") << '\n';
    out << "thm14.lowest_root = " << num(c.lowest_root) << '\n';
    out << "thm14.tilde_discriminant_negative = " << (c.tilde_discriminant_negative ? "true" : "false") << '\n';
  } else if (!set.thm14_note.empty()) {
    out << "\n# threshold test skipped: " << set.thm14_note << '\n';
  }
  if (set.thm15) {
    const auto& c = *set.thm15;
    out << "\n# convexity-side test\n";
    write_certificate_fields(out, "thm15.", c);
    out << "thm15.A = " << num(c.A) << '\n';
    out << "thm15.condition_holds = " << (c.condition_holds ? "true" : "false") << '\n';
    out << "thm15.min_neg_a2 = " << num(c.min_neg_a2) << '\n';
    if (!c.note.empty()) out << "# " << c.note << '\n';
  } else if (!set.thm15_note.empty()) {
    out << "\n# convexity-side test skipped: " << set.thm15_note << '\n';
  }
  if (measured) {
    out << "\n# measured\n";
    out << "termination = " << measured->termination << '\n';
    out << "t_stop = " << num(measured->t_stop) << '\n';
    if (measured->estimate) {
      out << "t_blow = " << num(measured->estimate->t_blow) << '\n';
      out << "t_blow_uncertainty = " << num(measured->estimate->uncertainty) << '\n';
      out << "x_blow = " << num(measured->estimate->x_loc) << '\n';
    } else {
      out << "t_blow = none\n";
    }
  }
}

inline void write_assumption_report(std::ostream& out, const AssumptionReport& r) {
  out << "# observed extremes against the supplied bounds\n";
  out << "z_min = " << num(r.z_min.value) << '\n';
  out << "z_min_x = " << num(r.z_min.x) << '\n';
  out << "z_min_t = " << num(r.z_min.t) << '\n';
  out << "z_max = " << num(r.z_max.value) << '\n';
  out << "z_max_x = " << num(r.z_max.x) << '\n';
  out << "z_max_t = " << num(r.z_max.t) << '\n';
  out << "m_min = " << num(r.m_min) << '\n';
  out << "m_max = " << num(r.m_max) << '\n';
  out << "max_abs_m_x = " << num(r.mx_max) << '\n';
  out << "max_abs_m_xx = " << num(r.mxx_max) << '\n';
  write_bounds(out, r.bounds);
  out << "verdict.Z_L = " << to_string(r.z_lower) << '\n';
  out << "verdict.Z_U = " << to_string(r.z_upper) << '\n';
  out << "verdict.M1 = " << to_string(r.m_lower) << '\n';
  out << "verdict.M2 = " << to_string(r.m_upper) << '\n';
  out << "verdict.M3 = " << to_string(r.mx_bound) << '\n';
  out << "verdict.M4 = " << to_string(r.mxx_bound) << '\n';
  out << "all_pass = " << (r.all_pass() ? "true" : "false") << '\n';
}

// ---------------------------------------------------------------------------
// SVG

namespace svg {

struct Frame {
  double x0, x1, y0, y1;  // data ranges
  double left = 60, right = 20, top = 30, bottom = 45;
  double width = 640, height = 420;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

inline void header(std::ostream& out, const Frame& f, const std::string& title, const std::string& xlabel,
                   const std::string& ylabel) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << f.width / 2 << "\" y=\"18\" text-anchor=\"middle\">" << title << "</text>\n";
  out << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.width - f.left - f.right
      << "\" height=\"" << f.height - f.top - f.bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  char buf[64];
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
    std::snprintf(buf, sizeof buf, "%.3g", xv);
    out << "<text x=\"" << f.px(xv) << "\" y=\"" << f.height - f.bottom + 15 << "\" text-anchor=\"middle\">" << buf
        << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", yv);
    out << "<text x=\"" << f.left - 5 << "\" y=\"" << f.py(yv) + 4 << "\" text-anchor=\"end\">" << buf
        << "</text>\n";
  }
  out << "<text x=\"" << f.width / 2 << "\" y=\"" << f.height - 8 << "\" text-anchor=\"middle\">" << xlabel
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << f.height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << f.height / 2 << ")\">" << ylabel << "</text>\n";
}

inline void polyline(std::ostream& out, const Frame& f, const std::vector<double>& xs, const std::vector<double>& ys,
                     const char* colour) {
  if (xs.empty()) return;
  out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
  char buf[64];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", f.px(xs[i]), f.py(ys[i]));
    out << buf;
  }
  out << "\"/>\n";
}

}  // namespace svg

/// (x, t) diagram of the traced curves. Paths are split at the periodic seam.
inline void write_characteristics_svg(std::ostream& out, const std::vector<CharacteristicCurve>& curves,
                                      const Grid& grid, double t_max, std::optional<double> t_blow) {
  svg::Frame f{grid.x0, grid.x1, 0.0, t_max > 0.0 ? t_max : 1.0};
  svg::header(out, f, "characteristics", "x", "t");
  for (const auto& c : curves) {
    const char* colour = c.direction == Direction::Forward ? "#1f77b4" : "#d62728";
    std::vector<double> xs, ts;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!xs.empty() && std::abs(c.x[i] - xs.back()) > 0.5 * grid.length()) {
        svg::polyline(out, f, xs, ts, colour);
        xs.clear();
        ts.clear();
      }
      xs.push_back(c.x[i]);
      ts.push_back(c.t[i]);
    }
    svg::polyline(out, f, xs, ts, colour);
  }
  if (t_blow && *t_blow <= f.y1)
    out << "<line x1=\"" << f.px(f.x0) << "\" x2=\"" << f.px(f.x1) << "\" y1=\"" << f.py(*t_blow) << "\" y2=\""
        << f.py(*t_blow) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  out << "</svg>\n";
}

/// min y and min q over the grid against t.
inline void write_yq_svg(std::ostream& out, const Trajectory& traj) {
  std::vector<double> t, y, q;
  double lo = 0.0, hi = 0.0;
  for (const auto& r : traj.log) {
    t.push_back(r.t);
    y.push_back(r.y_min);
    q.push_back(r.q_min);
    lo = std::min({lo, r.y_min, r.q_min});
    hi = std::max({hi, r.y_min, r.q_min});
  }
  if (hi == lo) hi = lo + 1.0;
  const double t1 = t.empty() || t.back() <= 0.0 ? 1.0 : t.back();
  svg::Frame f{t.empty() ? 0.0 : t.front(), t1, lo, hi};
  svg::header(out, f, "min y (blue), min q (red)", "t", "value");
  svg::polyline(out, f, t, y, "#1f77b4");
  svg::polyline(out, f, t, q, "#d62728");
  out << "</svg>\n";
}

}  // namespace lagwave::io
