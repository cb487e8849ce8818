#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bnlog/common.hpp"
#include "bnlog/functional.hpp"
#include "bnlog/wholespace.hpp"

namespace bnlog {

/// Best Sobolev constant S of H_0^1 -> L^{2*}, computed from the explicit
/// extremal bubble: S = (int |grad U|^2) / (int U^{2*})^{2/2*}.
inline double sobolev_constant(int dim) {
  require_dim(dim);
  const double grad = whole_space_bubble_grad(dim);
  const double crit = whole_space_bubble_power(dim, critical_exponent(dim));
  return grad / std::pow(crit, 2.0 / critical_exponent(dim));
}

/// Membership and signed margins for the admissible parameter regions.
/// A1/A2 apply when N = 4, A3/A4 when N = 3 or 5; Sigma1/Sigma2 always.
/// The margin of each region is the literal left-hand side of its defining
/// inequality; membership additionally requires the lambda window where the
/// definition imposes one.
struct RegionVerdict {
  bool in_a1 = false, in_a2 = false, in_a3 = false, in_a4 = false;
  bool in_sigma1 = false, in_sigma2 = false;
  double margin_a1 = std::numeric_limits<double>::quiet_NaN();
  double margin_a2 = std::numeric_limits<double>::quiet_NaN();
  double margin_a3 = std::numeric_limits<double>::quiet_NaN();
  double margin_a4 = std::numeric_limits<double>::quiet_NaN();
  double margin_sigma1 = std::numeric_limits<double>::quiet_NaN();
  double margin_sigma2 = std::numeric_limits<double>::quiet_NaN();

  bool in_any_a() const { return in_a1 || in_a2 || in_a3 || in_a4; }
};

inline RegionVerdict classify(const ProblemParams& p, double S, double lambda1, double volume) {
  if (!(S > 0.0) || !(lambda1 > 0.0) || !(volume > 0.0)) {
    throw std::invalid_argument("classify: S, lambda1 and volume must be positive");
  }
  if (!(p.mu > 0.0) || !(p.theta < 0.0)) throw std::invalid_argument("classify: need mu > 0 and theta < 0");

  RegionVerdict v;
  const int N = p.dim;
  const double sN2 = std::pow(S, 0.5 * N);                 // S^{N/2}
  const double muN2 = std::pow(p.mu, -0.5 * (N - 2));      // mu^{-(N-2)/2}
  const bool lambda_window = (p.lambda >= 0.0 && p.lambda < lambda1);
  const double lfrac = (lambda1 - p.lambda) / lambda1;

  v.margin_sigma1 = std::pow(lfrac, 0.5 * N) * muN2 * sN2 + 0.5 * N * p.theta * volume;
  v.in_sigma1 = lambda_window && v.margin_sigma1 > 0.0;
  v.margin_sigma2 = muN2 * sN2 + 0.5 * N * p.theta * std::exp(-p.lambda / p.theta) * volume;
  v.in_sigma2 = v.margin_sigma2 > 0.0;

  if (N == 4) {
    v.margin_a1 = (lfrac * lfrac / p.mu) * S * S + std::exp(1.0) * p.theta * volume;
    v.in_a1 = lambda_window && v.margin_a1 >= 0.0;
    v.margin_a2 = S * S / p.mu + p.theta * std::exp(1.0 - p.lambda / p.theta) * volume;
    v.in_a2 = v.margin_a2 >= 0.0;
  } else {
    const double eh = std::exp(0.5 * (N - 2));
    v.margin_a3 = std::pow(lfrac, 0.5 * N) * muN2 * sN2 + p.theta * eh * volume;
    v.in_a3 = lambda_window && v.margin_a3 >= 0.0;
    v.margin_a4 = muN2 * sN2 + p.theta * std::exp(0.5 * (N - 2) - p.lambda / p.theta) * volume;
    v.in_a4 = v.margin_a4 >= 0.0;
  }
  return v;
}

/// Radius of the ball B_rho hosting the local minimum, per the region that
/// admits the parameters (the lambda-window region takes precedence; the two
/// formulas agree at lambda = 0).
inline double rho(const ProblemParams& p, double S, double lambda1, const RegionVerdict& v) {
  const int N = p.dim;
  const double lfrac = (lambda1 - p.lambda) / (lambda1 * p.mu);
  if (N == 4) {
    if (v.in_a1) return std::sqrt(lfrac) * S;
    if (v.in_a2) return S / std::sqrt(p.mu);
  } else {
    const double pc = critical_exponent(N);
    if (v.in_a3) return std::pow(lfrac * std::pow(S, 0.5 * pc), 1.0 / (pc - 2.0));
    if (v.in_a4) return std::pow(std::pow(S, 0.5 * pc) / p.mu, 1.0 / (pc - 2.0));
  }
  throw std::invalid_argument("rho: parameters lie in neither admissible region");
}

inline double rho(const ProblemParams& p, double S, double lambda1, double volume) {
  return rho(p, S, lambda1, classify(p, S, lambda1, volume));
}

/// Additive compactness gap (1/N) mu^{-(N-2)/2} S^{N/2}; equals S^2/(4 mu)
/// when N = 4.
inline double energy_gap_threshold(const ProblemParams& p, double S) {
  if (!(p.mu > 0.0)) throw std::invalid_argument("energy_gap_threshold: mu must be positive");
  const int N = p.dim;
  return std::pow(p.mu, -0.5 * (N - 2)) * std::pow(S, 0.5 * N) / N;
}

}  // namespace bnlog
