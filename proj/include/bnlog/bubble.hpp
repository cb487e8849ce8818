#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bnlog/common.hpp"
#include "bnlog/functional.hpp"
#include "bnlog/radial.hpp"
#include "bnlog/wholespace.hpp"

namespace bnlog {

/// Truncated bubble phi(r) * C_N (eps/(eps^2+r^2))^{(N-2)/2} with a quintic
/// smoothstep cutoff: phi = 1 on [0, rho], 0 beyond 2 rho, C^2 in between.
struct BubbleSpec {
  int dim = 4;
  double eps = 0.01;
  double cutoff_radius = 0.2;  // the plateau radius rho; support ends at 2 rho

  double normalization() const { return bubble_normalization(dim); }
};

inline void check_spec(const RadialGrid& g, const BubbleSpec& spec) {
  require_dim(spec.dim);
  if (spec.dim != g.dim) throw std::invalid_argument("bubble spec dimension does not match grid");
  if (!(spec.eps > 0.0)) throw std::invalid_argument("bubble spec: eps must be positive");
  if (!(spec.cutoff_radius > 0.0) || 2.0 * spec.cutoff_radius > g.radius) {
    throw std::invalid_argument("bubble spec: need 0 < 2*cutoff_radius <= R");
  }
}

inline double cutoff_value(double r, double rho) {
  if (r <= rho) return 1.0;
  if (r >= 2.0 * rho) return 0.0;
  const double t = (r - rho) / rho;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

inline double cutoff_deriv(double r, double rho) {
  if (r <= rho || r >= 2.0 * rho) return 0.0;
  const double t = (r - rho) / rho;
  return -30.0 * t * t * (t - 1.0) * (t - 1.0) / rho;
}

inline double bubble_value(const BubbleSpec& s, double r) {
  const double half = 0.5 * (s.dim - 2);
  const double q = s.eps / (s.eps * s.eps + r * r);
  return s.normalization() * (s.dim == 4 ? q : std::pow(q, half));
}

inline double bubble_deriv(const BubbleSpec& s, double r) {
  const double n2 = s.dim - 2.0;
  const double d = s.eps * s.eps + r * r;
  return -s.normalization() * n2 * r * std::pow(s.eps, 0.5 * n2) * std::pow(d, -0.5 * s.dim);
}

inline double psi_value(const BubbleSpec& s, double r) {
  const double phi = cutoff_value(r, s.cutoff_radius);
  return phi == 0.0 ? 0.0 : phi * bubble_value(s, r);
}

inline double psi_deriv(const BubbleSpec& s, double r) {
  const double phi = cutoff_value(r, s.cutoff_radius);
  if (phi == 0.0) return 0.0;
  return cutoff_deriv(r, s.cutoff_radius) * bubble_value(s, r) + phi * bubble_deriv(s, r);
}

/// Nodal samples of psi_eps on the grid.
inline RadialField bubble_field(const RadialGrid& g, const BubbleSpec& spec) {
  check_spec(g, spec);
  RadialField f = RadialField::sample(g, [&](double r) { return psi_value(spec, r); });
  f.values.back() = 0.0;
  return f;
}

struct BubbleIdentity {
  double grad = 0.0;  // int |grad U|^2 over R^N
  double crit = 0.0;  // int U^{2*} over R^N
};

/// Whole-space identity int |grad U|^2 = int U^{2*} = S^{N/2}; both sides are
/// computed independently and must agree to 1e-3 relative.
inline BubbleIdentity whole_space_bubble_identity(int dim, double eps = 1.0) {
  BubbleIdentity id;
  id.grad = whole_space_bubble_grad(dim, eps);
  id.crit = whole_space_bubble_power(dim, critical_exponent(dim), eps);
  if (std::abs(id.grad - id.crit) > 1e-3 * std::abs(id.crit)) {
    throw std::runtime_error("whole-space bubble identity mismatch beyond 1e-3");
  }
  return id;
}

inline double default_delta(int dim) {
  switch (dim) {
    case 3: return 0.75;   // window (1/2, 3/2)
    case 4: return 0.25;   // fixed by the N = 4 decomposition
    case 5: return 0.125;  // window (0, 1/6)
    default: require_dim(dim); return 0.0;
  }
}

inline void check_delta_window(int dim, double delta) {
  if (dim == 4) return;
  const double lo = std::max(0.0, (4.0 - dim) / (2.0 * (dim - 2.0)));
  const double hi = (6.0 - dim) / (2.0 * (dim - 2.0));
  if (!(delta > lo && delta < hi)) {
    throw std::invalid_argument("delta outside the admissible window for N = " + std::to_string(dim));
  }
}

/// Truncated-bubble integrals entering the energy expansion.  Evaluated by
/// per-element Gauss quadrature of the closed-form integrand on the grid
/// partition; the nodal weights cannot see the O(eps^4)-level residuals the
/// rate fits need.
struct BubbleIntegrals {
  double eps = 0.0;
  double delta = 0.0;
  double grad = 0.0;          // int |grad psi|^2
  double crit = 0.0;          // int psi^{2*}
  double mass1 = 0.0;         // int psi
  double mass2 = 0.0;         // int psi^2
  double mass_crit_m1 = 0.0;  // int psi^{2*-1}
  double p_delta = 0.0;       // int psi^{2+2delta}
};

namespace detail {

/// sum over elements intersecting [0, hi] of the 8-point Gauss rule applied
/// to f(r) * r^{N-1}, times the sphere measure.
template <class F>
double grid_gauss(const RadialGrid& g, double hi, F&& f) {
  double acc = 0.0;
  const int nm1 = g.dim - 1;
  for (std::size_t j = 0; j < g.cell_count(); ++j) {
    if (g.nodes[j] >= hi) break;
    const double a = g.nodes[j], b = std::min(g.nodes[j + 1], hi);
    acc += gauss8([&](double r) { return f(r) * std::pow(r, nm1); }, a, b);
  }
  return sphere_measure(g.dim) * acc;
}

}  // namespace detail

inline BubbleIntegrals bubble_integrals(const RadialGrid& g, const BubbleSpec& spec, double delta) {
  check_spec(g, spec);
  check_delta_window(spec.dim, delta);
  if (spec.dim == 4) delta = 0.25;
  const double support = 2.0 * spec.cutoff_radius;
  const double pc = critical_exponent(spec.dim);

  BubbleIntegrals out;
  out.eps = spec.eps;
  out.delta = delta;
  out.grad = detail::grid_gauss(g, support, [&](double r) {
    const double d = psi_deriv(spec, r);
    return d * d;
  });
  auto power_int = [&](double p) {
    return detail::grid_gauss(g, support, [&](double r) { return std::pow(psi_value(spec, r), p); });
  };
  out.crit = power_int(pc);
  out.mass1 = power_int(1.0);
  out.mass2 = power_int(2.0);
  out.mass_crit_m1 = power_int(pc - 1.0);
  out.p_delta = power_int(2.0 + 2.0 * delta);
  return out;
}

/// Per-epsilon record of the bubble integrals, with the whole-space limits of
/// the two quantities that converge to S^{N/2}.
struct BubbleSweep {
  int dim = 4;
  double cutoff_radius = 0.2;
  double delta = 0.25;
  std::vector<BubbleIntegrals> records;  // eps strictly decreasing
  double grad_limit = 0.0;
  double crit_limit = 0.0;
};

inline std::vector<double> geometric_ladder(double from, double to, int count) {
  if (count < 2 || !(from > to) || !(to > 0.0)) throw std::invalid_argument("bad epsilon ladder");
  std::vector<double> eps(count);
  const double ratio = std::pow(to / from, 1.0 / (count - 1));
  double v = from;
  for (int i = 0; i < count; ++i, v *= ratio) eps[i] = v;
  eps.back() = to;
  return eps;
}

inline BubbleSweep run_bubble_sweep(const RadialGrid& g, double cutoff_radius, std::span<const double> eps_list,
                                    double delta) {
  if (eps_list.size() < 6) throw std::invalid_argument("bubble sweep needs at least 6 epsilon values");
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("epsilon list must be strictly decreasing");
  }
  if (eps_list.front() / eps_list.back() < 100.0) {
    throw std::invalid_argument("epsilon sweep must span at least two decades");
  }
  if (eps_list.front() > cutoff_radius / 10.0) {
    throw std::invalid_argument("sweep epsilon must satisfy eps <= cutoff_radius/10");
  }

  BubbleSweep sweep;
  sweep.dim = g.dim;
  sweep.cutoff_radius = cutoff_radius;
  sweep.delta = delta;
  sweep.grad_limit = whole_space_bubble_grad(g.dim);
  sweep.crit_limit = whole_space_bubble_power(g.dim, critical_exponent(g.dim));
  for (double e : eps_list) {
    sweep.records.push_back(bubble_integrals(g, BubbleSpec{g.dim, e, cutoff_radius}, delta));
  }
  return sweep;
}

/// One fitted asymptotic rate.
struct RateFit {
  std::string quantity;
  std::string kind;        // "power", "residual" or "dcoef"
  double expected = 0.0;   // expected exponent (power/residual kinds)
  double fitted = std::numeric_limits<double>::quiet_NaN();
  double coefficient = std::numeric_limits<double>::quiet_NaN();  // amplitude, or d
  double drift = std::numeric_limits<double>::quiet_NaN();        // d-stability over the last decade
  int points_used = 0;
  bool pass = false;
};

struct RateReport {
  std::vector<RateFit> fits;
  bool all_pass = true;
};

namespace detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

inline RateFit fit_power(const std::string& name, std::span<const double> eps, std::span<const double> value,
                         double expected, double tol) {
  RateFit fit;
  fit.quantity = name;
  fit.kind = "power";
  fit.expected = expected;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(value[i] > 0.0)) {
      throw std::runtime_error("rate fit for " + name + ": nonpositive value at eps = " + std::to_string(eps[i]));
    }
    if (i > 0 && !(value[i] < value[i - 1])) {
      throw std::runtime_error("rate fit for " + name + ": non-monotone data at eps = " + std::to_string(eps[i]) +
                               " (grid under-resolved for smallest eps?)");
    }
    lx.push_back(std::log(eps[i]));
    ly.push_back(std::log(value[i]));
  }
  const LineFit lf = least_squares(lx, ly);
  fit.fitted = lf.slope;
  fit.coefficient = std::exp(lf.intercept);
  fit.points_used = static_cast<int>(lx.size());
  fit.pass = std::abs(fit.fitted - expected) <= tol;
  return fit;
}

inline RateFit fit_residual(const std::string& name, std::span<const double> eps, std::span<const double> value,
                            double limit, double expected, double tol) {
  RateFit fit;
  fit.quantity = name;
  fit.kind = "residual";
  fit.expected = expected;
  const double floor = 1e-11 * std::max(1.0, std::abs(limit));
  std::vector<double> le, lr;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double res = std::abs(value[i] - limit);
    if (res <= floor) continue;  // below the quadrature noise floor
    le.push_back(eps[i]);
    lr.push_back(res);
  }
  if (le.size() < 3) {
    throw std::runtime_error("rate fit for " + name + ": fewer than 3 resolvable residuals");
  }
  for (std::size_t i = 1; i < lr.size(); ++i) {
    if (!(lr[i] < lr[i - 1])) {
      throw std::runtime_error("rate fit for " + name + ": non-monotone residuals at eps = " +
                               std::to_string(le[i]) + " (grid under-resolved for smallest eps?)");
    }
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < le.size(); ++i) {
    lx.push_back(std::log(le[i]));
    ly.push_back(std::log(lr[i]));
  }
  const LineFit lf = least_squares(lx, ly);
  fit.fitted = lf.slope;
  fit.coefficient = std::exp(lf.intercept);
  fit.points_used = static_cast<int>(lx.size());
  fit.pass = std::abs(fit.fitted - expected) <= tol;
  return fit;
}

/// Stabilizing coefficient d of int psi^2 = d * model(eps) + lower order,
/// model = eps^2 |log eps| (N = 4) or eps^2 (N = 5).  d comes from a linear
/// fit of value/eps^2 against |log eps| (N = 4) or the last-decade mean
/// (N = 5); drift compares the last-decade refit against the full sweep.
inline RateFit fit_dcoef(const std::string& name, std::span<const double> eps, std::span<const double> value,
                         bool log_model) {
  RateFit fit;
  fit.quantity = name;
  fit.kind = "dcoef";
  fit.expected = 0.0;
  std::vector<double> x, z;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    x.push_back(std::abs(std::log(eps[i])));
    z.push_back(value[i] / (eps[i] * eps[i]));
  }
  const double eps_min = eps.back();
  std::vector<double> xs, zs;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] <= 10.0 * eps_min) {
      xs.push_back(x[i]);
      zs.push_back(z[i]);
    }
  }
  if (log_model) {
    const double d_full = least_squares(x, z).slope;
    const double d_last = least_squares(xs, zs).slope;
    fit.coefficient = d_last;
    fit.drift = std::abs(d_last / d_full - 1.0);
  } else {
    auto mean = [](std::span<const double> v) {
      double s = 0.0;
      for (double a : v) s += a;
      return s / v.size();
    };
    const double m = mean(zs);
    double lo = zs[0], hi = zs[0];
    for (double a : zs) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    fit.coefficient = m;
    fit.drift = (hi - lo) / m;
    // the power fit doubles as the reported exponent
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(value[i]));
    }
    fit.fitted = least_squares(lx, ly).slope;
    fit.expected = 2.0;
  }
  fit.points_used = static_cast<int>(xs.size());
  fit.pass = fit.coefficient > 0.0 && fit.drift <= 0.05 &&
             (log_model || std::abs(fit.fitted - fit.expected) <= 0.1);
  return fit;
}

}  // namespace detail

/// Fit every quantity of the sweep against its expected asymptotic order.
inline RateReport rate_regression(const BubbleSweep& sweep, double tol = 0.1) {
  if (sweep.records.size() < 6) throw std::invalid_argument("rate_regression: need at least 6 sweep points");
  const int N = sweep.dim;
  std::vector<double> eps, grad, crit, m1, m2, mc1, pd;
  for (const auto& r : sweep.records) {
    eps.push_back(r.eps);
    grad.push_back(r.grad);
    crit.push_back(r.crit);
    m1.push_back(r.mass1);
    m2.push_back(r.mass2);
    mc1.push_back(r.mass_crit_m1);
    pd.push_back(r.p_delta);
  }
  RateReport rep;
  const double half = 0.5 * (N - 2);
  rep.fits.push_back(detail::fit_residual("grad", eps, grad, sweep.grad_limit, N - 2.0, tol));
  rep.fits.push_back(detail::fit_residual("crit", eps, crit, sweep.crit_limit, static_cast<double>(N), tol));
  rep.fits.push_back(detail::fit_power("mass1", eps, m1, half, tol));
  if (N == 3) {
    rep.fits.push_back(detail::fit_power("mass2", eps, m2, 1.0, tol));
  } else {
    rep.fits.push_back(detail::fit_dcoef("mass2", eps, m2, /*log_model=*/N == 4));
  }
  rep.fits.push_back(detail::fit_power("mass_crit_m1", eps, mc1, half, tol));
  rep.fits.push_back(detail::fit_power("p_delta", eps, pd, 2.0 - (N - 2.0) * sweep.delta, tol));
  for (const auto& f : rep.fits) rep.all_pass = rep.all_pass && f.pass;
  return rep;
}

/// Two-sided data of the logarithmic decomposition bound: for w > 0,
///   int (w + b psi)^2 log(w + b psi)^2 - int w^2 log w^2 - 2b int w psi log w^2
///   <= (2/(e d)) b^2 int w^{2d} psi^2 + (2/(e d)) b^{2+2d} int psi^{2+2d}
///      + 2b int w psi + 6 b^2 int psi^2.
struct LogDecomposition {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs, nonnegative when the bound holds
};

inline LogDecomposition check_log_decomposition(const RadialGrid& g, std::span<const double> w,
                                                const BubbleSpec& spec, double beta, double delta) {
  check_spec(g, spec);
  check_field(g, w);
  if (!(beta > 0.0)) throw std::invalid_argument("check_log_decomposition: beta must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("check_log_decomposition: delta must be positive");
  if (spec.dim == 4) delta = 0.25;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (!(w[i] > 0.0)) throw std::invalid_argument("check_log_decomposition: w must be positive on the interior");
  }

  const double support = 2.0 * spec.cutoff_radius;
  auto w_at = [&](std::size_t j, double r) {
    const double t = (r - g.nodes[j]) / (g.nodes[j + 1] - g.nodes[j]);
    return (1.0 - t) * w[j] + t * w[j + 1];
  };
  auto xlog = [](double t) { return t > 0.0 ? 2.0 * t * t * std::log(t) : 0.0; };  // t^2 log t^2

  double lhs = 0.0, rhs = 0.0;
  const int nm1 = g.dim - 1;
  const double omega = sphere_measure(g.dim);
  const double cde = 2.0 / (std::exp(1.0) * delta);
  for (std::size_t j = 0; j < g.cell_count(); ++j) {
    if (g.nodes[j] >= support) break;
    const double a = g.nodes[j], b = std::min(g.nodes[j + 1], support);
    lhs += gauss8(
        [&](double r) {
          const double wv = w_at(j, r);
          const double pv = psi_value(spec, r);
          const double u = wv + beta * pv;
          const double logw2 = 2.0 * std::log(wv);
          return (xlog(u) - xlog(wv) - 2.0 * beta * wv * pv * logw2) * std::pow(r, nm1);
        },
        a, b);
    rhs += gauss8(
        [&](double r) {
          const double wv = w_at(j, r);
          const double pv = psi_value(spec, r);
          return (cde * beta * beta * std::pow(wv, 2.0 * delta) * pv * pv +
                  cde * std::pow(beta, 2.0 + 2.0 * delta) * std::pow(pv, 2.0 + 2.0 * delta) +
                  2.0 * beta * wv * pv + 6.0 * beta * beta * pv * pv) *
                 std::pow(r, nm1);
        },
        a, b);
  }
  LogDecomposition out;
  out.lhs = omega * lhs;
  out.rhs = omega * rhs;
  out.margin = out.rhs - out.lhs;
  return out;
}

/// Lower bound on the mass of the critical cross term:
///   int w psi^{2*-1} >= (1/2) C_N^{2*-1} w(0) eps^{(N-2)/2} int_{R^N} (1+|y|^2)^{-(N+2)/2}
/// under the half-value condition inf_{B_rho} w >= w(0)/2.
struct MassBound {
  double integral = 0.0;
  double leading = 0.0;
  double margin = 0.0;  // integral - leading
  double ratio = 0.0;
  double inf_over_core = 0.0;
};

inline MassBound check_mass_lower_bound(const RadialGrid& g, std::span<const double> w, const BubbleSpec& spec) {
  check_spec(g, spec);
  check_field(g, w);
  double inf_core = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.node_count() && g.nodes[i] <= spec.cutoff_radius; ++i) {
    inf_core = std::min(inf_core, w[i]);
  }
  const double w0 = w[0];
  if (!(inf_core >= 0.5 * w0)) {
    throw std::invalid_argument("check_mass_lower_bound: half-value condition fails for this cutoff radius");
  }

  const double pc = critical_exponent(spec.dim);
  auto w_at = [&](std::size_t j, double r) {
    const double t = (r - g.nodes[j]) / (g.nodes[j + 1] - g.nodes[j]);
    return (1.0 - t) * w[j] + t * w[j + 1];
  };
  double integral = 0.0;
  const int nm1 = g.dim - 1;
  const double support = 2.0 * spec.cutoff_radius;
  for (std::size_t j = 0; j < g.cell_count(); ++j) {
    if (g.nodes[j] >= support) break;
    const double a = g.nodes[j], b = std::min(g.nodes[j + 1], support);
    integral += gauss8(
        [&](double r) { return w_at(j, r) * std::pow(psi_value(spec, r), pc - 1.0) * std::pow(r, nm1); }, a, b);
  }
  integral *= sphere_measure(g.dim);

  const double kernel = whole_space_kernel_integral(spec.dim, 0.5 * (spec.dim + 2));
  MassBound out;
  out.integral = integral;
  out.leading = 0.5 * std::pow(spec.normalization(), pc - 1.0) * w0 *
                std::pow(spec.eps, 0.5 * (spec.dim - 2)) * kernel;
  out.margin = out.integral - out.leading;
  out.ratio = out.integral / out.leading;
  out.inf_over_core = inf_core;
  return out;
}

/// Pointwise superadditivity of the critical power (N = 3, 5):
///   (a+b)^{2*} >= a^{2*} + b^{2*} + 2* a^{2*-1} b + 2* a b^{2*-1}.
inline ViolationReport check_superadditivity(long sample_count, int dim, std::uint64_t rng_seed) {
  if (dim != 3 && dim != 5) throw std::invalid_argument("check_superadditivity: dim must be 3 or 5");
  if (sample_count < 1) throw std::invalid_argument("check_superadditivity: sample_count >= 1 required");
  const double p = critical_exponent(dim);
  Rng rng(rng_seed);
  ViolationReport rep;
  auto probe = [&](double a, double b) {
    const double lhs = std::pow(a + b, p);
    const double rhs =
        std::pow(a, p) + std::pow(b, p) + p * std::pow(a, p - 1.0) * b + p * a * std::pow(b, p - 1.0);
    rep.worst_margin = std::min(rep.worst_margin, lhs - rhs);
    if (violates(rhs, lhs)) ++rep.violations;
    ++rep.samples;
  };
  probe(0.0, 1.0);
  probe(1.0, 0.0);
  probe(1.0, 1.0);
  for (long s = 0; s < sample_count; ++s) {
    probe(rng.log_uniform(1e-6, 1e3), rng.log_uniform(1e-6, 1e3));
  }
  return rep;
}

}  // namespace bnlog
