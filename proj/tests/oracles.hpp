#pragma once

// Slow reference implementations the library is checked against. None of
// them calls into the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace oracle {

// eta <g, x> + D_{1/2}(x, y).
inline double omd_objective(std::span<const double> x, std::span<const double> y,
                            std::span<const double> g, double eta) {
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double sy = std::sqrt(y[i]);
    v += eta * g[i] * x[i] + 2.0 * (sy + x[i] / sy - 2.0 * std::sqrt(x[i]));
  }
  return v;
}

// Negative scaled Tsallis-1/2 entropy and its gradient.
inline double neg_tsallis_half(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += std::sqrt(xi);
  return -4.0 * (s - 1.0);
}

// psi(x) - psi(y) - <grad psi(y), x - y>.
inline double bregman_half(std::span<const double> x, std::span<const double> y) {
  double lin = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) lin += (-2.0 / std::sqrt(y[i])) * (x[i] - y[i]);
  return neg_tsallis_half(x) - neg_tsallis_half(y) - lin;
}

// Minimiser of f over {x >= delta, x0 + x1 = 1} by a uniform scan.
inline std::vector<double> scan_d2(const std::function<double(std::span<const double>)>& f,
                                   double delta, std::size_t points = 1000000) {
  double best = std::numeric_limits<double>::infinity();
  double arg = delta;
  const double span = 1.0 - 2.0 * delta;
  for (std::size_t k = 0; k < points; ++k) {
    const double a = delta + span * static_cast<double>(k) / static_cast<double>(points - 1);
    const double x[2] = {a, 1.0 - a};
    const double v = f(x);
    if (v < best) {
      best = v;
      arg = a;
    }
  }
  return {arg, 1.0 - arg};
}

// Minimiser of a convex f over {x >= delta, sum x = 1} in d = 3: a ~5e5-point
// triangular grid, then five zoomed 41x41 grids around the incumbent.
inline std::vector<double> scan_d3(const std::function<double(std::span<const double>)>& f,
                                   double delta) {
  const double span = 1.0 - 3.0 * delta;
  double best = std::numeric_limits<double>::infinity();
  double b0 = delta, b1 = delta;
  auto try_point = [&](double a, double b) {
    // points on a face can land a rounding error outside it
    const double c = 1.0 - a - b;
    if (a < delta - 1e-12 || b < delta - 1e-12 || c < delta - 1e-12) return;
    const double x[3] = {std::max(a, delta), std::max(b, delta), std::max(c, delta)};
    const double v = f(x);
    if (v < best) {
      best = v;
      b0 = a;
      b1 = b;
    }
  };
  const int n = 1000;
  double h = span / n;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) try_point(delta + h * i, delta + h * j);
  for (int level = 0; level < 5; ++level) {
    const double c0 = b0, c1 = b1;
    const double w = 2.0 * h;
    h /= 10.0;
    for (int i = -20; i <= 20; ++i)
      for (int j = -20; j <= 20; ++j) try_point(c0 + w * i / 20.0, c1 + w * j / 20.0);
  }
  return {b0, b1, 1.0 - b0 - b1};
}

// Stationarity residual of argmin_{x >= delta, sum x = 1} eta <g, x> + D_{1/2}(x, y).
// Free coordinates must share one multiplier; clipped ones need a
// non-negative bound multiplier.
inline double kkt_residual(std::span<const double> x, std::span<const double> y,
                           std::span<const double> g, double eta, double delta) {
  const std::size_t d = x.size();
  std::vector<double> r(d);
  std::vector<bool> free(d);
  double lambda = 0.0;
  std::size_t n_free = 0;
  for (std::size_t i = 0; i < d; ++i) {
    r[i] = eta * g[i] - 2.0 / std::sqrt(x[i]) + 2.0 / std::sqrt(y[i]);
    free[i] = x[i] > delta * (1.0 + 1e-9) + 1e-15;
    if (free[i]) {
      lambda -= r[i];
      ++n_free;
    }
  }
  if (n_free == 0) return 0.0;
  lambda /= static_cast<double>(n_free);
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double s = r[i] + lambda;
    worst = std::max(worst, free[i] ? std::abs(s) : std::max(0.0, -s));
  }
  return worst;
}

// Weighted mean of v under exp(-gamma (A/v + B v)) on [lo, hi], trapezoid rule.
inline double trapezoid_ewoo(double A, double B, double gamma, double lo, double hi,
                             std::size_t points = 1000000) {
  const double h = (hi - lo) / static_cast<double>(points - 1);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < points; ++k) {
    const double v = lo + h * static_cast<double>(k);
    m = std::min(m, A / v + B * v);
  }
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double v = lo + h * static_cast<double>(k);
    const double w = (k == 0 || k + 1 == points ? 0.5 : 1.0) * std::exp(-gamma * (A / v + B * v - m));
    num += w * v;
    den += w;
  }
  return num / den;
}

}  // namespace oracle
