#pragma once

// Grid-level gradient diagnostics of a state: alpha, beta, y, q, their
// unscaled variants and the coefficients of the characteristic ODEs they
// satisfy. This is the single definition site for all of them; tracing and
// residual code interpolate these arrays rather than recomputing.
//
// With e = (gamma+1)/(2(gamma-1)), kappa = 3(3-gamma)/(2(3 gamma-1)):
//
//   alpha   = u_x + m z_x + (gamma-1)/gamma m_x z
//   beta    = u_x - m z_x - (gamma-1)/gamma m_x z
//   y_tilde = z^e ((u + m z)_x - 2/(3 gamma-1) m_x z)
//   q_tilde = z^e ((u - m z)_x + 2/(3 gamma-1) m_x z)
//   mu_bar  = m^{-kappa},  y = mu_bar y_tilde,  q = mu_bar q_tilde
//   k1 = (gamma+1) K_c/(2(gamma-1)) z^{2/(gamma-1)},  k2 = (gamma-1)/(gamma(gamma+1)) z m_x
//   a0_t = K_c/gamma [(gamma-1)/(3 gamma-1) m m_xx - (3 gamma+1)(gamma-1)/(3 gamma-1)^2 m_x^2] z^{3e+1}
//   a1_t = K_c kappa m_x z^{(gamma+1)/(gamma-1)}
//   a2_t = -K_c e z^{e-1}
//   a0 = mu_bar a0_t,  a2 = a2_t / mu_bar

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lagwave/eos.hpp"
#include "lagwave/errors.hpp"
#include "lagwave/fields.hpp"

namespace lagwave {

struct DiagnosticFields {
  std::vector<double> z, u, m, m_x, m_xx, tau, p, c, u_x, z_x, s, r;
  std::vector<double> alpha, beta;
  std::vector<double> y, q, y_tilde, q_tilde;
  std::vector<double> k1, k2, a0, a2, a0_t, a1_t, a2_t, mu_bar;

  /// Field by name; throws DomainError for unknown names.
  std::span<const double> get(std::string_view name) const {
    if (const auto* v = find(name)) return *v;
    throw DomainError("unknown quantity '" + std::string(name) + "'");
  }

  bool has(std::string_view name) const { return find(name) != nullptr; }

  static const std::vector<std::string_view>& names() {
    static const std::vector<std::string_view> all = {
        "z",     "u",    "m",       "m_x",     "m_xx", "tau",  "p",    "c",    "u_x",
        "z_x",   "s",    "r",       "alpha",   "beta", "y",    "q",    "y_tilde",
        "q_tilde", "k1", "k2",      "a0",      "a2",   "a0_t", "a1_t", "a2_t", "mu_bar"};
    return all;
  }

private:
  const std::vector<double>* find(std::string_view name) const {
    const std::vector<double>* table[] = {&z,     &u,    &m,       &m_x,     &m_xx, &tau,  &p,
                                          &c,     &u_x,  &z_x,     &s,       &r,    &alpha, &beta,
                                          &y,     &q,    &y_tilde, &q_tilde, &k1,   &k2,   &a0,
                                          &a2,    &a0_t, &a1_t,    &a2_t,    &mu_bar};
    const auto& n = names();
    for (std::size_t i = 0; i < n.size(); ++i)
      if (n[i] == name) return table[i];
    return nullptr;
  }
};

/// Exponents that recur in the diagnostic formulas.
struct DiagnosticExponents {
  double e;      // (gamma+1)/(2(gamma-1))
  double kappa;  // 3(3-gamma)/(2(3 gamma-1))
  double sound;  // (gamma+1)/(gamma-1)

  explicit DiagnosticExponents(double g)
      : e((g + 1.0) / (2.0 * (g - 1.0))),
        kappa(3.0 * (3.0 - g) / (2.0 * (3.0 * g - 1.0))),
        sound((g + 1.0) / (g - 1.0)) {}
};

inline DiagnosticFields compute_diagnostics(const StateField& s) {
  const std::size_t n = s.grid.n;
  const GasConstants& gc = s.gas;
  const double g = gc.gamma;
  const double Kc = gc.K_c;
  const DiagnosticExponents ex(g);

  DiagnosticFields d;
  d.z = s.z;
  d.u = s.u;
  const auto m = s.profile->m();
  const auto mx = s.profile->m_x();
  const auto mxx = s.profile->m_xx();
  d.m.assign(m.begin(), m.end());
  d.m_x.assign(mx.begin(), mx.end());
  d.m_xx.assign(mxx.begin(), mxx.end());
  d.u_x = derivative(s.u, s.grid, 1);
  d.z_x = derivative(s.z, s.grid, 1);

  // m z_x + (gamma-1)/gamma m_x z = m^{1/gamma} (m^{(gamma-1)/gamma} z)_x. The
  // bracket is a power of p, so this form vanishes to rounding at constant
  // pressure, as the solver's flux does.
  const double ent = (g - 1.0) / g;
  std::vector<double> w(n), mroot(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::pow(m[i], ent) * s.z[i];
    mroot[i] = std::pow(m[i], 1.0 / g);
  }
  const auto w_x = derivative(w, s.grid, 1);

  for (auto* v : {&d.tau, &d.p, &d.c, &d.s, &d.r, &d.alpha, &d.beta, &d.y, &d.q, &d.y_tilde,
                  &d.q_tilde, &d.k1, &d.k2, &d.a0, &d.a2, &d.a0_t, &d.a1_t, &d.a2_t, &d.mu_bar})
    v->resize(n);

  const double two_over = 2.0 / (3.0 * g - 1.0);
  const double a0_c1 = (g - 1.0) / (3.0 * g - 1.0);
  const double a0_c2 = (3.0 * g + 1.0) * (g - 1.0) / ((3.0 * g - 1.0) * (3.0 * g - 1.0));
  const double k1_c = (g + 1.0) * Kc / (2.0 * (g - 1.0));
  const double k2_c = (g - 1.0) / (g * (g + 1.0));

  for (std::size_t i = 0; i < n; ++i) {
    const double z = d.z[i], mi = d.m[i], mxi = d.m_x[i], mxxi = d.m_xx[i];
    const double ux = d.u_x[i];
    d.tau[i] = tau_of_z(z, gc);
    d.p[i] = pressure(z, mi, gc);
    d.c[i] = sound_speed(z, mi, gc);
    d.s[i] = d.u[i] + mi * z;
    d.r[i] = d.u[i] - mi * z;
    const double grad = mroot[i] * w_x[i];
    d.alpha[i] = ux + grad;
    d.beta[i] = ux - grad;

    const double ze = std::pow(z, ex.e);
    const double mu = std::pow(mi, -ex.kappa);
    d.mu_bar[i] = mu;
    const double rest = (1.0 / g - two_over) * mxi * z;
    d.y_tilde[i] = ze * (ux + grad + rest);
    d.q_tilde[i] = ze * (ux - grad - rest);
    d.y[i] = mu * d.y_tilde[i];
    d.q[i] = mu * d.q_tilde[i];

    d.k1[i] = k1_c * std::pow(z, 2.0 / (g - 1.0));
    d.k2[i] = k2_c * z * mxi;
    d.a0_t[i] = Kc / g * (a0_c1 * mi * mxxi - a0_c2 * mxi * mxi) * std::pow(z, 3.0 * ex.e + 1.0);
    d.a1_t[i] = Kc * ex.kappa * mxi * std::pow(z, ex.sound);
    d.a2_t[i] = -Kc * ex.e * std::pow(z, ex.e - 1.0);
    d.a0[i] = mu * d.a0_t[i];
    d.a2[i] = d.a2_t[i] / mu;
  }
  return d;
}

struct AlphaBeta {
  std::vector<double> alpha, beta;
};

inline AlphaBeta alpha_beta(const StateField& s) {
  auto d = compute_diagnostics(s);
  return {std::move(d.alpha), std::move(d.beta)};
}

struct YQFields {
  std::vector<double> y, q, y_tilde, q_tilde;
};

inline YQFields yq_fields(const StateField& s) {
  auto d = compute_diagnostics(s);
  return {std::move(d.y), std::move(d.q), std::move(d.y_tilde), std::move(d.q_tilde)};
}

struct Coefficients {
  std::vector<double> k1, k2, a0, a2, a0_t, a1_t, a2_t, mu_bar;
};

inline Coefficients coefficients(const StateField& s) {
  auto d = compute_diagnostics(s);
  return {std::move(d.k1),   std::move(d.k2),   std::move(d.a0),   std::move(d.a2),
          std::move(d.a0_t), std::move(d.a1_t), std::move(d.a2_t), std::move(d.mu_bar)};
}

/// (m^{-2/(3 gamma-1)})_xx from m, m_x, m_xx. Its sign is minus the sign of a0.
inline double entropy_convexity(double m, double m_x, double m_xx, double gamma) {
  const double k = -2.0 / (3.0 * gamma - 1.0);
  return k * std::pow(m, k - 2.0) * (m * m_xx + (k - 1.0) * m_x * m_x);
}

}  // namespace lagwave
