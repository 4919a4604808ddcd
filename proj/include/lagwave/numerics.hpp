#pragma once

// Small numerical kernels shared by the field, tracing and diagnostic code:
// finite-difference weights on arbitrary nodes, periodic and not-a-knot
// cubic splines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "lagwave/errors.hpp"

namespace lagwave {

/// Finite-difference weights (Fornberg) for the derivative of order `order`
/// at `x0` using the given nodes.
inline std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order) {
  const std::size_t n = nodes.size();
  const int m = order;
  // c[j][k]: weight of node j for derivative k
  std::vector<std::vector<double>> c(n, std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min(static_cast<int>(i), m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = c[j][static_cast<std::size_t>(m)];
  return w;
}

/// Interpolating cubic spline through periodic samples on a uniform grid
/// x_i = x0 + i h, i = 0..n-1, with f(x + n h) = f(x).
class PeriodicSpline {
public:
  PeriodicSpline() = default;

  PeriodicSpline(std::span<const double> values, double x0, double h)
      : f_(values.begin(), values.end()), m2_(values.size()), x0_(x0), h_(h) {
    const std::size_t n = f_.size();
    if (n < 3) throw DomainError("periodic spline needs at least 3 samples");
    // M_{i-1} + 4 M_i + M_{i+1} = 6 (f_{i+1} - 2 f_i + f_{i-1}) / h^2, cyclic.
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double fm = f_[(i + n - 1) % n], fp = f_[(i + 1) % n];
      rhs[i] = 6.0 * (fp - 2.0 * f_[i] + fm) / (h * h);
    }
    solve_cyclic(rhs);
  }

  double operator()(double x) const {
    const auto [i, t] = locate(x);
    const std::size_t j = (i + 1) % f_.size();
    const double a = 1.0 - t, b = t;
    return a * f_[i] + b * f_[j] + ((a * a * a - a) * m2_[i] + (b * b * b - b) * m2_[j]) * h_ * h_ / 6.0;
  }

  double derivative(double x) const {
    const auto [i, t] = locate(x);
    const std::size_t j = (i + 1) % f_.size();
    const double a = 1.0 - t, b = t;
    return (f_[j] - f_[i]) / h_ - (3.0 * a * a - 1.0) / 6.0 * h_ * m2_[i] +
           (3.0 * b * b - 1.0) / 6.0 * h_ * m2_[j];
  }

  std::size_t size() const { return f_.size(); }

private:
  std::pair<std::size_t, double> locate(double x) const {
    const double n = static_cast<double>(f_.size());
    double s = (x - x0_) / h_;
    s -= n * std::floor(s / n);
    double fl = std::floor(s);
    std::size_t i = static_cast<std::size_t>(fl);
    if (i >= f_.size()) i = 0, fl = 0.0, s = 0.0;
    return {i, s - fl};
  }

  // Cyclic tridiagonal system with constant (1, 4, 1) stencil, Sherman-Morrison.
  void solve_cyclic(const std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    const double alpha = 1.0, beta = 1.0;  // corner entries
    const double gamma = -4.0;
    std::vector<double> diag(n, 4.0);
    diag[0] = 4.0 - gamma;
    diag[n - 1] = 4.0 - alpha * beta / gamma;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    auto x = thomas(diag, rhs);
    auto z = thomas(diag, u);
    const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) m2_[i] = x[i] - fact * z[i];
  }

  static std::vector<double> thomas(const std::vector<double>& diag, const std::vector<double>& r) {
    const std::size_t n = diag.size();
    std::vector<double> cp(n), dp(n), x(n);
    cp[0] = 1.0 / diag[0];
    dp[0] = r[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double den = diag[i] - cp[i - 1];
      cp[i] = 1.0 / den;
      dp[i] = (r[i] - dp[i - 1]) / den;
    }
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
  }

  std::vector<double> f_;
  std::vector<double> m2_;
  double x0_ = 0.0;
  double h_ = 1.0;
};

/// Not-a-knot cubic spline through (x_i, y_i) with strictly increasing x.
class NotAKnotSpline {
public:
  NotAKnotSpline() = default;

  NotAKnotSpline(std::vector<double> xs, std::vector<double> ys)
      : x_(std::move(xs)), y_(std::move(ys)) {
    const std::size_t n = x_.size();
    if (n != y_.size()) throw DomainError("spline abscissae and values differ in length");
    if (n < 4) throw DomainError("not-a-knot spline needs at least 4 samples");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw DomainError("spline abscissae must be strictly increasing");

    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i)
      r[i] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);

    // Unknowns M_1..M_{n-2}; M_0 and M_{n-1} eliminated with the
    // not-a-knot conditions (continuous third derivative at x_1, x_{n-2}).
    const std::size_t k = n - 2;
    std::vector<double> lo(k, 0.0), di(k, 0.0), up(k, 0.0), rhs(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t i = j + 1;
      lo[j] = h[i - 1];
      di[j] = 2.0 * (h[i - 1] + h[i]);
      up[j] = h[i];
      rhs[j] = r[i];
    }
    const double h0 = h[0], h1 = h[1];
    di[0] += h0 * (h0 + h1) / h1;
    if (k > 1) up[0] -= h0 * h0 / h1;
    const double ha = h[n - 3], hb = h[n - 2];
    di[k - 1] += hb * (ha + hb) / ha;
    if (k > 1) lo[k - 1] -= hb * hb / ha;

    std::vector<double> inner(k);
    if (k == 1) {
      inner[0] = rhs[0] / di[0];
    } else {
      std::vector<double> cp(k), dp(k);
      cp[0] = up[0] / di[0];
      dp[0] = rhs[0] / di[0];
      for (std::size_t j = 1; j < k; ++j) {
        const double den = di[j] - lo[j] * cp[j - 1];
        cp[j] = up[j] / den;
        dp[j] = (rhs[j] - lo[j] * dp[j - 1]) / den;
      }
      inner[k - 1] = dp[k - 1];
      for (std::size_t j = k - 1; j-- > 0;) inner[j] = dp[j] - cp[j] * inner[j + 1];
    }
    m2_.assign(n, 0.0);
    for (std::size_t j = 0; j < k; ++j) m2_[j + 1] = inner[j];
    m2_[0] = ((h0 + h1) * m2_[1] - h0 * m2_[2]) / h1;
    m2_[n - 1] = ((ha + hb) * m2_[n - 2] - hb * m2_[n - 3]) / ha;
  }

  double operator()(double x) const { return eval(x, 0); }
  double derivative(double x) const { return eval(x, 1); }
  double second_derivative(double x) const { return eval(x, 2); }

  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }

private:
  double eval(double x, int order) const {
    const std::size_t n = x_.size();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
    i = i == 0 ? 0 : i - 1;
    if (i > n - 2) i = n - 2;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
    switch (order) {
      case 0:
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m2_[i] + (b * b * b - b) * m2_[i + 1]) * h * h / 6.0;
      case 1:
        return (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m2_[i] +
               (3.0 * b * b - 1.0) / 6.0 * h * m2_[i + 1];
      default:
        return a * m2_[i] + b * m2_[i + 1];
    }
  }

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m2_;
};

}  // namespace lagwave
