#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bnlog/bubble.hpp"
#include "bnlog/common.hpp"
#include "bnlog/functional.hpp"
#include "bnlog/radial.hpp"
#include "bnlog/regions.hpp"

namespace bnlog {

enum class SolutionKind { local_min, mountain_pass };

struct SolveOutcome {
  RadialField field;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  SolutionKind kind = SolutionKind::local_min;
  double norm = 0.0;  // H_0^1 norm sqrt(int |grad u|^2)
  EnergyReport report;
  bool constraint_inactive = true;   // ball constraint slack at convergence
  bool descent_monotone = true;      // J strictly decreased along accepted steps
};

struct SolveOptions {
  double tol_min = 1e-8;
  double tol_mp = 1e-6;
  int path_points = 64;
  int max_descent = 4000;
  int max_newton = 200;
  int max_deform = 20000;
  std::uint64_t seed = 1;
};

namespace detail {

/// Solve the tridiagonal system (A - diag(b)) x = rhs where A is the discrete
/// -Laplace acting on nodes 0..n-1 (Newton systems are shifted like this).
inline std::vector<double> solve_shifted(const RadialGrid& g, std::span<const double> shift,
                                         std::span<const double> rhs) {
  const std::size_t n = g.cell_count();
  std::vector<double> sub(n, 0.0), diag(n), sup(n, 0.0), x(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double left = (i == 0) ? 0.0 : g.flux_coef[i - 1];
    const double vol = g.cell_volume[i];
    diag[i] = (left + g.flux_coef[i]) / vol - shift[i];
    if (i > 0) sub[i] = -g.flux_coef[i - 1] / vol;
    if (i + 1 < n) sup[i] = -g.flux_coef[i] / vol;
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    x[i] -= m * x[i - 1];
  }
  x[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - sup[i] * x[i + 1]) / diag[i];
  return x;
}

inline void axpy(RadialField& y, double a, const RadialField& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y.values[i] += a * x.values[i];
}

inline RadialField lin_comb(const RadialField& a, double s, const RadialField& b, double t) {
  RadialField r(*a.grid);
  for (std::size_t i = 0; i < r.size(); ++i) r.values[i] = s * a.values[i] + t * b.values[i];
  return r;
}

inline double h1_distance(const RadialGrid& g, const RadialField& a, const RadialField& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < g.cell_count(); ++j) {
    const double du = (a[j + 1] - b[j + 1]) - (a[j] - b[j]);
    acc += g.flux_coef[j] * du * du;
  }
  return std::sqrt(sphere_measure(g.dim) * acc);
}

/// Damped Newton refinement of a critical point; returns the reached residual.
inline double newton_refine(const RadialGrid& g, const ProblemParams& p, RadialField& u, double target,
                            int max_it, int* iter_count = nullptr) {
  const std::size_t n = g.cell_count();
  const double pc = p.crit_exp();
  RadialField grad_f = gradient(g, p, u);
  double res = dual_norm(g, grad_f);
  for (int it = 0; it < max_it && res > target; ++it) {
    if (iter_count) ++*iter_count;
    std::vector<double> shift(n, 0.0), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double up = u[i] > 0.0 ? u[i] : 0.0;
      if (up > 0.0) {
        shift[i] = p.lambda + p.mu * (pc - 1.0) * detail::pos_pow(up, pc - 2.0) +
                   p.theta * (2.0 * std::log(up) + 2.0);
      }
      rhs[i] = -grad_f[i];
    }
    std::vector<double> step;
    try {
      step = solve_shifted(g, shift, rhs);
    } catch (const std::exception&) {
      break;
    }
    double s = 1.0;
    bool accepted = false;
    for (int half = 0; half < 25; ++half, s *= 0.5) {
      RadialField trial = u;
      for (std::size_t i = 0; i < n; ++i) trial.values[i] += s * step[i];
      RadialField gt = gradient(g, p, trial);
      const double rt = dual_norm(g, gt);
      if (rt < res) {
        u = std::move(trial);
        grad_f = std::move(gt);
        res = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return res;
}

}  // namespace detail

/// Scan J along the first-eigenfunction ray; the logarithmic term makes
/// J(t e_1) < 0 for small t > 0 when theta < 0.
inline double scan_ray_minimum(const RadialGrid& g, const ProblemParams& p, const RadialField& dir,
                               double t_max) {
  double best_t = 0.0, best_j = 0.0;
  const int steps = 480;
  const double lo = std::log(1e-16), hi = std::log(t_max);
  for (int k = 0; k <= steps; ++k) {
    const double t = std::exp(lo + (hi - lo) * k / steps);
    RadialField u = dir;
    for (auto& v : u.values) v *= t;
    const double j = energy(g, p, u).total;
    if (j < best_j) {
      best_j = j;
      best_t = t;
    }
  }
  if (!(best_j < 0.0)) {
    throw std::runtime_error(
        "find_local_min: no negative-energy starting point on the eigen ray "
        "(parameters too close to the admissible region boundary)");
  }
  return best_t;
}

/// Projected H^1 steepest descent with Armijo backtracking inside the ball
/// ||u|| <= rho_ball, followed by a Newton polish.  Returns the interior local
/// minimum u_0 >= 0 with J(u_0) < 0.
inline SolveOutcome find_local_min(const RadialGrid& g, const ProblemParams& p, double rho_ball,
                                   std::optional<RadialField> init = std::nullopt,
                                   const SolveOptions& opts = {}) {
  if (!(rho_ball > 0.0)) throw std::invalid_argument("find_local_min: rho must be positive");
  const std::size_t n = g.cell_count();

  RadialField u(g);
  bool have_init = false;
  if (init) {
    check_dirichlet(g, init->values);
    if (h1_norm(g, init->values) > 0.0) {
      u = *init;
      have_init = true;
      const double nu = h1_norm(g, u.values);
      if (nu > rho_ball) for (auto& v : u.values) v *= rho_ball / nu;
    }
  }
  if (!have_init) {
    const RadialField e1 = lowest_eigenpairs(g, 1)[0].vector;
    const double t_cap = 0.5 * rho_ball / h1_norm(g, e1.values);
    const double t0 = scan_ray_minimum(g, p, e1, t_cap);
    u = e1;
    for (auto& v : u.values) v *= t0;
  }

  SolveOutcome out;
  out.kind = SolutionKind::local_min;
  double j_cur = energy(g, p, u).total;
  int iters = 0;
  bool monotone = true;

  // Phase 1: projected gradient descent in the H^1 metric.
  for (int it = 0; it < opts.max_descent; ++it) {
    RadialField grad_f = gradient(g, p, u);
    const double res = dual_norm(g, grad_f);
    if (res <= 1e2 * opts.tol_min || res <= 1e-10) break;
    RadialField dir = solve_dirichlet(g, grad_f);
    for (auto& v : dir.values) v = -v;
    const double m = -res * res;  // <J'(u), dir> in the quadrature pairing
    double tau = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, tau *= 0.5) {
      RadialField trial = u;
      detail::axpy(trial, tau, dir);
      const double nt = h1_norm(g, trial.values);
      if (nt > rho_ball) for (auto& v : trial.values) v *= rho_ball / nt;
      const double jt = energy(g, p, trial).total;
      if (jt <= j_cur + 1e-4 * tau * m) {
        if (!(jt < j_cur)) monotone = false;
        u = std::move(trial);
        ++iters;
        accepted = true;
        const bool stalled = std::abs(j_cur - jt) <= 1e-15 * std::abs(j_cur);
        j_cur = jt;
        if (stalled) it = opts.max_descent;  // hand over to Newton
        break;
      }
    }
    if (!accepted) break;  // no Armijo progress at this scale; Newton takes over
  }

  // Phase 2: Newton polish well past the requested tolerance so reruns from
  // different initializations land on the same discrete critical point.
  const double target = std::min(1e-3 * opts.tol_min, 1e-12);
  double res = detail::newton_refine(g, p, u, target, opts.max_newton, &iters);

  out.field = u;
  out.energy = energy(g, p, u).total;
  out.report = energy(g, p, u);
  out.residual = res;
  out.iterations = iters;
  out.norm = h1_norm(g, u.values);
  out.descent_monotone = monotone;
  out.constraint_inactive = out.norm < rho_ball * (1.0 - 1e-9);

  if (res > opts.tol_min) {
    throw std::runtime_error("find_local_min: residual " + std::to_string(res) +
                             " did not reach tolerance " + std::to_string(opts.tol_min));
  }
  if (!(out.energy < 0.0)) {
    throw std::runtime_error("find_local_min: converged point has nonnegative energy");
  }
  if (!out.constraint_inactive) {
    throw std::runtime_error("find_local_min: ball constraint active at convergence (run rejected)");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] < -1e-10) throw std::runtime_error("find_local_min: converged point is not nonnegative");
  }
  return out;
}

/// c_K := J(u_0): the local minimum is also a least energy solution, so its
/// level is the least-energy level.
inline double least_energy_level(const SolveOutcome& outcome) {
  if (outcome.kind != SolutionKind::local_min) {
    throw std::invalid_argument("least_energy_level: outcome must be a local minimum");
  }
  return outcome.energy;
}

/// J(u_0 + beta psi_eps) evaluated by per-element Gauss quadrature with u_0
/// interpolated and psi in closed form.  The nodal quadrature cannot resolve
/// the O(eps^2) margins of the sup_beta comparison at the small end of the
/// epsilon sweep; this evaluator can.
inline double energy_along_bubble(const RadialGrid& g, const ProblemParams& p, const RadialField& u0,
                                  const BubbleSpec& spec, double beta) {
  check_dirichlet(g, u0.values);
  const double pc = p.crit_exp();
  const int nm1 = g.dim - 1;
  double acc = 0.0;
  for (std::size_t j = 0; j < g.cell_count(); ++j) {
    const double a = g.nodes[j], b = g.nodes[j + 1];
    const double slope = (u0[j + 1] - u0[j]) / (b - a);
    acc += gauss8(
        [&](double r) {
          const double w = u0[j] + slope * (r - a);
          const double u = w + beta * psi_value(spec, r);
          const double du = slope + beta * psi_deriv(spec, r);
          const double up = u > 0.0 ? u : 0.0;
          double val = 0.5 * du * du;
          if (up > 0.0) {
            const double up2 = up * up;
            val -= 0.5 * p.lambda * up2;
            val -= p.mu / pc * detail::pos_pow(up, pc);
            val -= 0.5 * p.theta * (2.0 * up2 * std::log(up) - up2);
          }
          return val * std::pow(r, nm1);
        },
        a, b);
  }
  return sphere_measure(g.dim) * acc;
}

struct BetaScan {
  double beta_star = 0.0;
  double sup_value = 0.0;
  double baseline = 0.0;  // J(u_0) through the same quadrature
  int evaluations = 0;
};

/// Maximize beta -> J(u_0 + beta psi_eps) by golden section after bracketing.
inline BetaScan beta_sup_scan(const RadialGrid& g, const ProblemParams& p, const RadialField& u0,
                              const BubbleSpec& spec) {
  check_spec(g, spec);
  BetaScan scan;
  auto f = [&](double beta) {
    ++scan.evaluations;
    return energy_along_bubble(g, p, u0, spec, beta);
  };
  scan.baseline = f(0.0);

  const double unit = 1.0 / std::sqrt(p.mu);
  double b_prev = 0.0, j_prev = scan.baseline;
  double b_cur = 0.0625 * unit, j_cur = f(b_cur);
  double b_next = 0.0, j_next = 0.0;
  bool bracketed = false;
  for (int k = 0; k < 60; ++k) {
    b_next = b_cur * 1.5;
    j_next = f(b_next);
    if (j_next < j_cur && j_cur > j_prev) {
      bracketed = true;
      break;
    }
    b_prev = b_cur;
    j_prev = j_cur;
    b_cur = b_next;
    j_cur = j_next;
    if (b_cur > 1e3 * unit) break;
  }
  if (!bracketed) throw std::runtime_error("beta_sup_scan: bracketing failure (no interior maximizer)");

  // Golden-section maximization on [b_prev, b_next].
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = b_prev, hi = b_next;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-8 * unit) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    }
  }
  scan.beta_star = 0.5 * (lo + hi);
  scan.sup_value = std::max(f1, f2);
  return scan;
}

/// March the discrete radial equation -Lap u = f(u) outward from a center
/// value: every interior row of the flux scheme is solved exactly, so the
/// returned boundary value is the only defect.  Critical points of the
/// discrete functional correspond to roots of the boundary mismatch in the
/// center amplitude (discrete shooting).
inline double radial_march(const RadialGrid& g, const ProblemParams& p, double center,
                           RadialField* field_out = nullptr) {
  const std::size_t n = g.cell_count();
  const double pc = p.crit_exp();
  auto f = [&](double u) {
    if (u <= 0.0) return 0.0;
    return p.lambda * u + p.mu * detail::pos_pow(u, pc - 1.0) + p.theta * detail::pos_xlog(u);
  };
  std::vector<double> u(n + 1, 0.0);
  u[0] = center;
  u[1] = u[0] - g.cell_volume[0] * f(u[0]) / g.flux_coef[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double flux_in = g.flux_coef[i - 1] * (u[i] - u[i - 1]);
    u[i + 1] = u[i] + (flux_in - g.cell_volume[i] * f(u[i])) / g.flux_coef[i];
    if (!std::isfinite(u[i + 1]) || std::abs(u[i + 1]) > 1e15) {
      return u[i + 1] > 0.0 ? 1e15 : -1e15;
    }
  }
  if (field_out) {
    field_out->grid = &g;
    field_out->values = u;
    field_out->values[n] = 0.0;
  }
  return u[n];
}

/// Locate a discrete critical point by bisecting the shooting mismatch in the
/// center amplitude, starting from a seed.  Returns the solved field, or
/// nullopt when no sign change brackets the seed.
inline std::optional<RadialField> find_critical_by_shooting(const RadialGrid& g, const ProblemParams& p,
                                                            double seed) {
  if (!(seed > 0.0)) return std::nullopt;
  const int half_steps = 48;  // covers amplitudes within 2^12 of the seed
  double prev_a = 0.0, prev_f = 0.0;
  double lo = 0.0, hi = 0.0;
  bool have_prev = false, bracketed = false;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int k = -half_steps; k <= half_steps; ++k) {
    const double a = seed * std::pow(2.0, 0.25 * k);
    const double fa = radial_march(g, p, a);
    if (have_prev && ((prev_f < 0.0 && fa > 0.0) || (prev_f > 0.0 && fa < 0.0))) {
      const double gap = std::abs(std::log(0.5 * (a + prev_a) / seed));
      if (gap < best_gap) {
        best_gap = gap;
        lo = prev_a;
        hi = a;
        bracketed = true;
      }
    }
    prev_a = a;
    prev_f = fa;
    have_prev = true;
  }
  if (!bracketed) return std::nullopt;

  double flo = radial_march(g, p, lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = radial_march(g, p, mid);
    if ((flo < 0.0) == (fm < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * hi) break;
  }
  RadialField out(g);
  radial_march(g, p, 0.5 * (lo + hi), &out);
  return out;
}

/// Epsilon window for the sup_beta comparison against the compactness
/// threshold.  The window sits where the u_0 cross term dominates the
/// truncation corrections for the per-dimension default parameters; each
/// window spans 2.4 decades and every scale is resolved by the default grid.
struct EpsWindow {
  double from = 0.0;
  double to = 0.0;
};

inline EpsWindow beta_scan_window(int dim) {
  switch (dim) {
    case 3: return {2.5e-4, 1.0e-6};
    case 4: return {3.125e-3, 1.22e-5};
    case 5: return {1.25e-2, 4.88e-5};
    default: require_dim(dim); return {};
  }
}

struct BetaSweepResult {
  std::vector<double> eps;
  std::vector<BetaScan> scans;
  double worst_margin = 0.0;  // min over eps of c_K + gap - sup
  double best_eps = 0.0;      // argmin of the sup (the natural endpoint scale)
  double beta_min = 0.0;
  double beta_max = 0.0;
};

/// Run beta_sup_scan over an epsilon ladder and compare each sup against
/// c_K + gap through the same hybrid quadrature.
inline BetaSweepResult run_beta_sweep(const RadialGrid& g, const ProblemParams& p, const RadialField& u0,
                                      double cutoff_radius, std::span<const double> eps_list, double gap) {
  BetaSweepResult out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  out.beta_min = std::numeric_limits<double>::infinity();
  double best_sup = std::numeric_limits<double>::infinity();
  for (double eps : eps_list) {
    const BetaScan scan = beta_sup_scan(g, p, u0, BubbleSpec{g.dim, eps, cutoff_radius});
    out.eps.push_back(eps);
    out.scans.push_back(scan);
    out.worst_margin = std::min(out.worst_margin, scan.baseline + gap - scan.sup_value);
    out.beta_min = std::min(out.beta_min, scan.beta_star);
    out.beta_max = std::max(out.beta_max, scan.beta_star);
    if (scan.sup_value < best_sup) {
      best_sup = scan.sup_value;
      out.best_eps = eps;
    }
  }
  return out;
}

/// Discrete path for the mountain-pass deformation.
struct PathState {
  std::vector<RadialField> points;  // gamma(t_j), j = 0..P; endpoints pinned
  std::vector<double> energies;
};

struct PathTrace {
  std::vector<double> max_energy_history;
  std::vector<double> residual_history;
  std::vector<double> final_energies;
  long respace_rejected = 0;
  int restarts = 0;
};

/// Mountain-pass deformation: start from the segment u_0 -> endpoint, then
/// repeatedly pull the maximal-energy interior point down its H^1 gradient,
/// re-spacing the path to stay connected.  Terminates at a critical point of
/// positive level; the returned candidate is Newton-polished.
inline SolveOutcome mountain_pass(const RadialGrid& g, const ProblemParams& p, const SolveOutcome& u0_outcome,
                                  const RadialField& endpoint, const SolveOptions& opts = {},
                                  PathTrace* trace = nullptr) {
  if (u0_outcome.kind != SolutionKind::local_min) {
    throw std::invalid_argument("mountain_pass: first argument must be the local-minimum outcome");
  }
  const RadialField& u0 = u0_outcome.field;
  const double j0 = u0_outcome.energy;
  if (!(energy(g, p, endpoint).total <= j0)) {
    throw std::invalid_argument("mountain_pass: endpoint must satisfy J(endpoint) <= J(u_0)");
  }

  int path_points = std::max(8, opts.path_points);
  PathTrace local_trace;
  PathTrace& tr = trace ? *trace : local_trace;

  // Validated polish of a near-critical path point.  The discrete shooting
  // solve is tried first (it pins the exact discrete critical point and is
  // immune to the nearly-degenerate concentration ridge that defeats damped
  // Newton here); Newton and the raw point are fallbacks.  `level_cap` is the
  // smallest path maximum seen so far: a pass level cannot exceed it.
  auto finish = [&](const RadialField& cand, double res, double level_cap, int iters,
                    const PathState& path, SolveOutcome& out) -> bool {
    const double slack = 1e-6 * (1.0 + std::abs(level_cap));
    auto validate = [&](const RadialField& field, double fres) {
      if (!(fres <= opts.tol_mp)) return false;
      const double fj = energy(g, p, field).total;
      if (!(fj > 0.0) || fj > level_cap + slack) return false;
      if (detail::h1_distance(g, field, u0) < 0.1 * u0_outcome.norm) return false;
      double interior_min = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i + 1 < field.size(); ++i) interior_min = std::min(interior_min, field[i]);
      return interior_min > -1e-10;
    };
    auto accept = [&](const RadialField& field, double fres, int extra) {
      out.kind = SolutionKind::mountain_pass;
      out.field = field;
      out.report = energy(g, p, field);
      out.energy = out.report.total;
      out.residual = fres;
      out.iterations = iters + extra;
      out.norm = h1_norm(g, field.values);
      tr.final_energies = path.energies;
    };

    if (auto shot = find_critical_by_shooting(g, p, cand[0])) {
      int extra = 0;
      const double sres = detail::newton_refine(g, p, *shot, std::min(1e-2 * opts.tol_mp, 1e-10), 10, &extra);
      if (validate(*shot, sres)) {
        accept(*shot, sres, extra);
        return true;
      }
    }
    RadialField polished = cand;
    int polish_iters = 0;
    const double pres =
        detail::newton_refine(g, p, polished, std::min(1e-2 * opts.tol_mp, 1e-10), 120, &polish_iters);
    if (validate(polished, pres)) {
      accept(polished, pres, polish_iters);
      return true;
    }
    if (res <= opts.tol_mp && validate(cand, res)) {
      accept(cand, res, 0);
      return true;
    }
    return false;
  };

  for (int attempt = 0; attempt < 3; ++attempt) {
    const int P = path_points;
    PathState path;
    path.points.reserve(P + 1);
    for (int j = 0; j <= P; ++j) {
      const double t = static_cast<double>(j) / P;
      path.points.push_back(detail::lin_comb(u0, 1.0 - t, endpoint, t));
    }
    path.energies.resize(P + 1);
    for (int j = 0; j <= P; ++j) path.energies[j] = energy(g, p, path.points[j]).total;

    // Moves are capped to a fraction of the path spacing so the maximal point
    // settles onto the col instead of being flung into a valley.
    const double spacing = detail::h1_distance(g, endpoint, u0) / P;
    double prev_max = std::numeric_limits<double>::infinity();
    double minimax_seen = std::numeric_limits<double>::infinity();
    bool collapsed = false;
    int it = 0;
    for (; it < opts.max_deform; ++it) {
      // maximal interior point; ties go to the larger residual
      int jmax = 1;
      for (int j = 2; j < P; ++j) {
        const double slack = 1e-14 * std::abs(path.energies[jmax]);
        if (path.energies[j] > path.energies[jmax] + slack) {
          jmax = j;
        } else if (std::abs(path.energies[j] - path.energies[jmax]) <= slack) {
          if (dual_norm(g, gradient(g, p, path.points[j])) >
              dual_norm(g, gradient(g, p, path.points[jmax]))) {
            jmax = j;
          }
        }
      }
      RadialField& cand = path.points[jmax];
      RadialField grad_f = gradient(g, p, cand);
      const double res = dual_norm(g, grad_f);
      tr.max_energy_history.push_back(path.energies[jmax]);
      tr.residual_history.push_back(res);
      prev_max = path.energies[jmax];
      minimax_seen = std::min(minimax_seen, prev_max);

      if (res <= opts.tol_mp || it % 5 == 0) {
        // polish attempt from the maximal point; mandatory once the residual
        // criterion is met, opportunistic otherwise
        SolveOutcome out;
        if (finish(cand, res, minimax_seen, it, path, out)) return out;
        if (res <= opts.tol_mp) {
          collapsed = true;  // criterion met but the level is not a valid pass level
          break;
        }
      }

      // line-searched step along the negative H^1 gradient, length-capped;
      // the maximal point moves first, the rest of the interior relaxes after
      // it so the path tracks the descending hump instead of tearing open
      auto descend_point = [&](int j) -> bool {
        RadialField gf = (j == jmax) ? std::move(grad_f) : gradient(g, p, path.points[j]);
        RadialField dir = solve_dirichlet(g, gf);
        const double rj = std::sqrt(std::max(0.0, h1_inner(g, dir.values, dir.values)));
        for (auto& v : dir.values) v = -v;
        const double tau_cap = std::min(1.0, 0.25 * spacing / std::max(rj, 1e-300));
        const double m = -rj * rj;
        double tau = tau_cap;
        for (int bt = 0; bt < 40; ++bt, tau *= 0.5) {
          RadialField trial = path.points[j];
          detail::axpy(trial, tau, dir);
          const double jt = energy(g, p, trial).total;
          if (jt <= path.energies[j] + 1e-4 * tau * m) {
            path.points[j] = std::move(trial);
            path.energies[j] = jt;
            return true;
          }
        }
        return false;
      };
      const bool moved_max = descend_point(jmax);
      for (int j = 1; j < P; ++j) {
        if (j != jmax) descend_point(j);
      }
      if (!moved_max) {
        // progress floor at the maximum: salvage a nearly-critical point
        SolveOutcome out;
        if (finish(path.points[jmax], res, minimax_seen, it, path, out)) return out;
        collapsed = true;
        break;
      }

      if (detail::h1_distance(g, path.points[jmax], u0) < 1e-3 * detail::h1_distance(g, endpoint, u0)) {
        collapsed = true;  // path maximum slid into the minimum's basin
        break;
      }

      // re-space by H^1 arc length every sweep; keeps the col populated so the
      // discrete maximum cannot tunnel under the ridge between far-apart nodes
      {
        std::vector<double> cum(P + 1, 0.0);
        for (int j = 1; j <= P; ++j) {
          cum[j] = cum[j - 1] + detail::h1_distance(g, path.points[j], path.points[j - 1]);
        }
        if (cum[P] > 0.0) {
          PathState fresh;
          fresh.points.reserve(P + 1);
          fresh.points.push_back(path.points.front());
          int seg = 1;
          for (int j = 1; j < P; ++j) {
            const double target_len = cum[P] * j / P;
            while (seg < P && cum[seg] < target_len) ++seg;
            const double t = (target_len - cum[seg - 1]) / (cum[seg] - cum[seg - 1]);
            fresh.points.push_back(detail::lin_comb(path.points[seg - 1], 1.0 - t, path.points[seg], t));
          }
          fresh.points.push_back(path.points.back());
          fresh.energies.resize(P + 1);
          for (int j = 0; j <= P; ++j) fresh.energies[j] = energy(g, p, fresh.points[j]).total;
          const double new_max = *std::max_element(fresh.energies.begin() + 1, fresh.energies.end() - 1);
          if (new_max <= prev_max + 1e-6 * (1.0 + std::abs(prev_max))) {
            path = std::move(fresh);
          } else {
            ++tr.respace_rejected;
          }
        }
      }
    }

    if (collapsed) {
      path_points *= 2;
      ++tr.restarts;
      continue;
    }
    throw std::runtime_error("mountain_pass: residual stagnation (max level " + std::to_string(prev_max) +
                             " after " + std::to_string(opts.max_deform) + " deformation steps)");
  }
  throw std::runtime_error("mountain_pass: path collapse persisted across restarts");
}

struct GapVerdict {
  bool ok = false;
  double threshold = 0.0;  // c_K + (1/N) mu^{-(N-2)/2} S^{N/2}
  double margin = 0.0;     // threshold - c_M
};

/// Strict check c_M < c_K + (1/N) mu^{-(N-2)/2} S^{N/2}.
inline GapVerdict verify_energy_gap(double c_m, double c_k, const ProblemParams& p, double S) {
  if (!(c_m > 0.0)) {
    throw std::invalid_argument("verify_energy_gap: mountain-pass level must be positive");
  }
  GapVerdict v;
  v.threshold = c_k + energy_gap_threshold(p, S);
  v.margin = v.threshold - c_m;
  v.ok = c_m < v.threshold;
  return v;
}

struct SphereFloor {
  double alpha_hat = 0.0;  // minimum observed J over the sphere samples
  int samples = 0;
};

/// Sampled lower bound for J on the sphere ||u|| = rho: random combinations of
/// the first 10 discrete eigenfunctions plus the directions through u_0 and
/// psi_eps.  A nonpositive sample would contradict the mountain-pass floor
/// within the radial class and aborts the run.
inline SphereFloor estimate_sphere_floor(const RadialGrid& g, const ProblemParams& p, double rho_ball,
                                         int sample_count, std::uint64_t rng_seed,
                                         std::span<const RadialField> extra_directions = {}) {
  if (sample_count < 1) throw std::invalid_argument("estimate_sphere_floor: sample_count >= 1 required");
  const int n_modes = 10;
  const auto pairs = lowest_eigenpairs(g, n_modes);
  Rng rng(rng_seed);

  SphereFloor floor;
  floor.alpha_hat = std::numeric_limits<double>::infinity();
  auto probe = [&](const RadialField& dir) {
    const double nrm = h1_norm(g, dir.values);
    if (!(nrm > 0.0)) return;
    RadialField u = dir;
    for (auto& v : u.values) v *= rho_ball / nrm;
    const double j = energy(g, p, u).total;
    if (j <= 0.0) {
      throw std::runtime_error("estimate_sphere_floor: nonpositive sample on the sphere (discretization alarm)");
    }
    floor.alpha_hat = std::min(floor.alpha_hat, j);
    ++floor.samples;
  };

  for (const auto& d : extra_directions) probe(d);
  RadialField mix(g);
  for (int s = 0; s < sample_count; ++s) {
    std::fill(mix.values.begin(), mix.values.end(), 0.0);
    for (const auto& pr : pairs) {
      const double c = rng.uniform(-1.0, 1.0);
      detail::axpy(mix, c, pr.vector);
    }
    probe(mix);
  }
  return floor;
}

struct PositivityReport {
  double min_value = 0.0;
  double min_interior = 0.0;
  bool nonnegative = false;          // min over all nodes >= -1e-10
  bool strictly_positive_interior = false;
};

inline PositivityReport positivity_report(const SolveOutcome& outcome) {
  const RadialField& u = outcome.field;
  PositivityReport rep;
  rep.min_value = *std::min_element(u.values.begin(), u.values.end());
  rep.min_interior = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < u.size(); ++i) rep.min_interior = std::min(rep.min_interior, u[i]);
  rep.nonnegative = rep.min_value >= -1e-10;
  rep.strictly_positive_interior = rep.min_interior > 0.0;
  return rep;
}

/// Pick the path endpoint u_0 + beta_end psi with J(endpoint) <= J(u_0) and
/// ||endpoint|| > rho, extending the sup scan beyond its maximizer.
inline RadialField make_mountain_pass_endpoint(const RadialGrid& g, const ProblemParams& p,
                                               const SolveOutcome& u0_outcome, const BubbleSpec& spec,
                                               double rho_ball, double* beta_end_out = nullptr) {
  const RadialField psi = bubble_field(g, spec);
  const double unit = 1.0 / std::sqrt(p.mu);
  double beta = unit;
  for (int k = 0; k < 200; ++k) {
    RadialField cand = u0_outcome.field;
    detail::axpy(cand, beta, psi);
    if (energy(g, p, cand).total <= u0_outcome.energy && h1_norm(g, cand.values) > rho_ball) {
      if (beta_end_out) *beta_end_out = beta;
      return cand;
    }
    beta *= 1.15;
  }
  throw std::runtime_error("mountain_pass: could not construct a below-level endpoint");
}

}  // namespace bnlog
