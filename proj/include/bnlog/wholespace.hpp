#pragma once

#include <cmath>
#include <stdexcept>

#include "bnlog/common.hpp"

namespace bnlog {

namespace detail {

/// int_R^inf r^a (eps^2 + r^2)^{-q} dr by the binomial tail series, valid for
/// 2q - a > 1 and eps << R.  Throws if the series has not effectively
/// converged, which signals that the quadrature cutoff R is too small.
inline double tail_integral(double a, double q, double eps, double R) {
  if (2.0 * q - a <= 1.0) throw std::invalid_argument("tail_integral: divergent tail");
  double acc = 0.0;
  double coef = 1.0;  // binom(-q, k) (-1)^k = q(q+1)...(q+k-1)/k!
  double term = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double expo = a - 2.0 * q - 2.0 * k + 1.0;
    term = coef * std::pow(eps, 2.0 * k) * std::pow(R, expo) / (-expo);
    acc += (k % 2 == 0 ? term : -term);
    coef *= (q + k) / (k + 1.0);
  }
  if (std::abs(term) > 1e-9 * std::abs(acc) + 1e-300) {
    throw std::runtime_error("tail-estimate failure: quadrature cutoff too small");
  }
  return acc;
}

/// int_0^inf r^a (eps^2 + r^2)^{-q} dr: Gauss panels on [0, R_inf] plus tail.
/// The inner panels resolve the eps scale, the outer ones are log-spaced.
inline double radial_power_integral(double a, double q, double eps, double r_inf = 1e3) {
  auto f = [&](double r) { return std::pow(r, a) * std::pow(eps * eps + r * r, -q); };
  const double split = std::min(8.0 * eps, r_inf);
  double acc = gauss8_panels(f, 0.0, split, 64);
  if (split < r_inf) {
    const int outer_panels = 128;
    const double ratio = std::pow(r_inf / split, 1.0 / outer_panels);
    double lo = split;
    for (int p = 0; p < outer_panels; ++p) {
      const double hi = lo * ratio;
      acc += gauss8(f, lo, hi);
      lo = hi;
    }
  }
  return acc + tail_integral(a, q, eps, r_inf);
}

}  // namespace detail

/// int_{R^N} (1 + |y|^2)^{-q} dy (finite for 2q > N).
inline double whole_space_kernel_integral(int dim, double q) {
  return sphere_measure(dim) * detail::radial_power_integral(dim - 1.0, q, 1.0);
}

/// int_{R^N} U_eps^p dx for the normalized bubble
/// U_eps = C_N (eps/(eps^2+r^2))^{(N-2)/2}; finite for p(N-2) > N.
inline double whole_space_bubble_power(int dim, double p, double eps = 1.0) {
  require_dim(dim);
  const double half = 0.5 * (dim - 2);
  if (p * (dim - 2.0) <= dim) throw std::invalid_argument("whole_space_bubble_power: divergent integral");
  const double c = std::pow(bubble_normalization(dim), p) * std::pow(eps, p * half);
  return sphere_measure(dim) * c * detail::radial_power_integral(dim - 1.0, p * half, eps);
}

/// int_{R^N} |grad U_eps|^2 dx.
inline double whole_space_bubble_grad(int dim, double eps = 1.0) {
  require_dim(dim);
  const double c = bubble_normalization(dim);
  const double n2 = dim - 2.0;
  const double pref = sphere_measure(dim) * c * c * n2 * n2 * std::pow(eps, n2);
  return pref * detail::radial_power_integral(dim + 1.0, static_cast<double>(dim), eps);
}

}  // namespace bnlog
