#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace bnlog {

inline constexpr double kPi = std::numbers::pi;

/// Surface measure of the unit (N-1)-sphere in R^N.
inline double sphere_measure(int dim) {
  switch (dim) {
    case 3: return 4.0 * kPi;
    case 4: return 2.0 * kPi * kPi;
    case 5: return 8.0 * kPi * kPi / 3.0;
    default: throw std::invalid_argument("sphere_measure: unsupported dimension " + std::to_string(dim));
  }
}

inline void require_dim(int dim) {
  if (dim < 3 || dim > 5) {
    throw std::invalid_argument("unsupported dimension " + std::to_string(dim) + " (must be 3, 4 or 5)");
  }
}

/// Lebesgue measure of the ball of radius R in R^N.
inline double ball_volume(int dim, double radius) {
  return sphere_measure(dim) * std::pow(radius, dim) / dim;
}

/// Critical Sobolev exponent 2N/(N-2).
inline double critical_exponent(int dim) {
  require_dim(dim);
  return 2.0 * dim / (dim - 2.0);
}

/// Normalization constant of the standard bubble, [N(N-2)]^((N-2)/4).
inline double bubble_normalization(int dim) {
  require_dim(dim);
  return std::pow(static_cast<double>(dim) * (dim - 2), 0.25 * (dim - 2));
}

/// Seeded RNG wrapper so every randomized check is reproducible.
struct Rng {
  std::mt19937_64 gen;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(gen);
  }

  /// Log-uniform over [lo, hi], lo > 0.
  double log_uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
    return std::exp(d(gen));
  }
};

// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 4> kGaussNodes = {
    0.18343464249564980, 0.52553240991632899, 0.79666647741362674, 0.96028985649753623};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.36268378337836198, 0.31370664587788729, 0.22238103445337447, 0.10122853629037626};

/// 8-point Gauss-Legendre quadrature over [a, b].
template <class F>
double gauss8(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double x = half * kGaussNodes[k];
    acc += kGaussWeights[k] * (f(mid - x) + f(mid + x));
  }
  return half * acc;
}

/// Composite Gauss-Legendre over [a, b] split into `panels` equal panels.
template <class F>
double gauss8_panels(F&& f, double a, double b, int panels) {
  double acc = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    acc += gauss8(f, a + p * h, a + (p + 1) * h);
  }
  return acc;
}

}  // namespace bnlog
