// Test-only oracles, independent of the library's own quadrature paths.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace oracles {

/// Adaptive Simpson integration.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 0, double fa = std::nan(""), double fb = std::nan(""),
                               double fm = std::nan("")) {
  if (std::isnan(fa)) fa = f(a);
  if (std::isnan(fb)) fb = f(b);
  const double m = 0.5 * (a + b);
  if (std::isnan(fm)) fm = f(m);
  const double l = 0.5 * (a + m), r = 0.5 * (m + b);
  const double fl = f(l), fr = f(r);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
  if (depth > 48 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, 0.5 * tol, depth + 1, fa, fm, fl) +
         adaptive_simpson(f, m, b, 0.5 * tol, depth + 1, fm, fb, fr);
}

/// Gamma at integer and half-integer arguments, exactly.
inline double gamma_half(double x) {
  if (x == 0.5) return std::sqrt(std::acos(-1.0));
  if (x == 1.0) return 1.0;
  if (x > 1.0) return (x - 1.0) * gamma_half(x - 1.0);
  throw std::invalid_argument("gamma_half: argument must be a positive integer or half-integer");
}

/// Closed form of the best Sobolev constant, pi N (N-2) (Gamma(N/2)/Gamma(N))^{2/N}.
inline double sobolev_gamma_formula(int dim) {
  const double pi = std::acos(-1.0);
  return pi * dim * (dim - 2) * std::pow(gamma_half(0.5 * dim) / gamma_half(dim), 2.0 / dim);
}

/// First positive zero of the Bessel function J_1, by bisection on its series.
inline double bessel_j1(double x) {
  // power series, fine for |x| < 6
  double term = 0.5 * x;
  double sum = term;
  for (int k = 1; k < 40; ++k) {
    term *= -x * x / (4.0 * k * (k + 1.0));
    sum += term;
  }
  return sum;
}

inline double bessel_j1_first_zero() {
  double lo = 3.0, hi = 4.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (bessel_j1(lo) * bessel_j1(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// First positive root of tan x = x (the first zero of J_{3/2}), by bisection.
inline double tan_eq_x_root() {
  double lo = 0.5 * std::acos(-1.0) + 1e-9, hi = 1.5 * std::acos(-1.0) - 1e-9;
  auto f = [](double x) { return std::sin(x) - x * std::cos(x); };
  // root of sin x - x cos x = 0 is the same equation, pole-free
  lo = 3.0;
  hi = 4.7;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(lo) * f(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Monte-Carlo volume of the unit ball in R^dim.
inline double mc_ball_volume(int dim, long samples, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double x = u(gen);
      r2 += x * x;
    }
    if (r2 <= 1.0) ++hits;
  }
  return std::pow(2.0, dim) * static_cast<double>(hits) / static_cast<double>(samples);
}

/// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
