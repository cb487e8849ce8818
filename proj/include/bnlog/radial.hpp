#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "bnlog/common.hpp"

namespace bnlog {

/// Radial discretization of the ball of radius R in R^N.
///
/// Nodes follow the stretched map r(s) = R * s * exp(-kappa*(1-s)), s = i/n,
/// which clusters geometrically toward r = 0 (innermost spacing ~ R*e^-kappa/n)
/// while keeping the outer spacing ~ R*(1+kappa)/n.  All scales between
/// R*e^-kappa and R are resolved simultaneously, which the concentrating
/// bubble profiles require.
///
/// Quadrature weights are the exact control-volume moments of r^{N-1} around
/// each node (times the sphere measure), so they sum to |B_R| exactly and the
/// discrete Laplacian below is symmetric in the induced inner product.
struct RadialGrid {
  int dim = 0;
  double radius = 0.0;
  std::vector<double> nodes;         // r_0 = 0 < r_1 < ... < r_n = R
  std::vector<double> quad_weights;  // omega_N * V_i, sum = |B_R|

  // Laplacian building blocks (without the omega_N factor):
  std::vector<double> flux_coef;    // per element j: r_{j+1/2}^{N-1} / h_j
  std::vector<double> cell_volume;  // per node i: control volume of r^{N-1} dr

  std::size_t node_count() const { return nodes.size(); }
  std::size_t cell_count() const { return nodes.size() - 1; }
};

inline constexpr double kGridStretch = 16.11809565095832;  // ln(1e7)

inline RadialGrid build_grid(int dim, double radius, int intervals) {
  require_dim(dim);
  if (!(radius > 0.0)) throw std::invalid_argument("build_grid: radius must be positive");
  if (intervals < 16) throw std::invalid_argument("build_grid: node_count too small (need >= 16)");

  RadialGrid g;
  g.dim = dim;
  g.radius = radius;
  const int n = intervals;
  g.nodes.resize(n + 1);
  g.nodes[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    const double s = static_cast<double>(i) / n;
    g.nodes[i] = radius * s * std::exp(-kGridStretch * (1.0 - s));
  }
  g.nodes[n] = radius;
  for (int i = 0; i < n; ++i) {
    if (!(g.nodes[i] < g.nodes[i + 1])) throw std::runtime_error("build_grid: nodes not strictly increasing");
  }

  const double omega = sphere_measure(dim);
  g.flux_coef.resize(n);
  g.cell_volume.assign(n + 1, 0.0);
  g.quad_weights.assign(n + 1, 0.0);

  auto rpow = [dim](double r) { return std::pow(r, dim); };
  double prev_mid = 0.0;  // left face of node i's control volume
  for (int j = 0; j < n; ++j) {
    const double h = g.nodes[j + 1] - g.nodes[j];
    const double mid = 0.5 * (g.nodes[j] + g.nodes[j + 1]);
    g.flux_coef[j] = std::pow(mid, dim - 1) / h;
    g.cell_volume[j] = (rpow(mid) - rpow(prev_mid)) / dim;
    prev_mid = mid;
  }
  g.cell_volume[n] = (rpow(radius) - rpow(prev_mid)) / dim;
  for (int i = 0; i <= n; ++i) g.quad_weights[i] = omega * g.cell_volume[i];
  return g;
}

/// Nodal values of a radial function; boundary node carries the Dirichlet value.
struct RadialField {
  const RadialGrid* grid = nullptr;
  std::vector<double> values;

  RadialField() = default;
  explicit RadialField(const RadialGrid& g) : grid(&g), values(g.node_count(), 0.0) {}

  template <class F>
  static RadialField sample(const RadialGrid& g, F&& f) {
    RadialField u(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) u.values[i] = f(g.nodes[i]);
    return u;
  }

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

inline void check_field(const RadialGrid& g, std::span<const double> v) {
  if (v.size() != g.node_count()) throw std::invalid_argument("field length does not match grid");
}

/// Field that must satisfy the Dirichlet edge condition u(R) = 0.
inline void check_dirichlet(const RadialGrid& g, std::span<const double> v) {
  check_field(g, v);
  if (v.back() != 0.0) throw std::invalid_argument("field violates the Dirichlet condition u(R) = 0");
}

/// omega_N * sum_i w_i f_i, the discrete form of int_{B_R} f dx for radial f.
inline double quad(const RadialGrid& g, std::span<const double> f) {
  check_field(g, f);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += g.quad_weights[i] * f[i];
  return acc;
}

inline double quad(const RadialGrid& g, const RadialField& f) { return quad(g, std::span<const double>(f.values)); }

/// Weighted inner product <u, v> = omega_N * sum w_i u_i v_i.
inline double quad_inner(const RadialGrid& g, std::span<const double> u, std::span<const double> v) {
  check_field(g, u);
  check_field(g, v);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += g.quad_weights[i] * u[i] * v[i];
  return acc;
}

/// int |grad u|^2 of the piecewise-linear interpolant (midpoint flux form).
inline double dirichlet_energy(const RadialGrid& g, std::span<const double> u) {
  check_dirichlet(g, u);
  double acc = 0.0;
  for (std::size_t j = 0; j < g.cell_count(); ++j) {
    const double du = u[j + 1] - u[j];
    acc += g.flux_coef[j] * du * du;
  }
  return sphere_measure(g.dim) * acc;
}

inline double dirichlet_energy(const RadialGrid& g, const RadialField& u) {
  return dirichlet_energy(g, std::span<const double>(u.values));
}

/// Bilinear form of the Dirichlet energy, int grad(u).grad(v).
inline double h1_inner(const RadialGrid& g, std::span<const double> u, std::span<const double> v) {
  check_field(g, u);
  check_field(g, v);
  double acc = 0.0;
  for (std::size_t j = 0; j < g.cell_count(); ++j) {
    acc += g.flux_coef[j] * (u[j + 1] - u[j]) * (v[j + 1] - v[j]);
  }
  return sphere_measure(g.dim) * acc;
}

inline double h1_norm(const RadialGrid& g, std::span<const double> u) {
  double e = 0.0;
  for (std::size_t j = 0; j < g.cell_count(); ++j) {
    const double du = u[j + 1] - u[j];
    e += g.flux_coef[j] * du * du;
  }
  return std::sqrt(sphere_measure(g.dim) * e);
}

/// -Laplace u in radial form, -u'' - (N-1)/r u'.  Flux differences over the
/// control volumes; the origin row reduces to the regularized -2N(u_1-u_0)/r_1^2
/// which is exact on quadratics.  The boundary row is reported as 0.
inline RadialField laplacian_apply(const RadialGrid& g, const RadialField& u) {
  check_dirichlet(g, u.values);
  const std::size_t n = g.cell_count();
  RadialField out(g);
  out.values[0] = g.flux_coef[0] * (u[0] - u[1]) / g.cell_volume[0];
  for (std::size_t i = 1; i < n; ++i) {
    out.values[i] =
        (g.flux_coef[i - 1] * (u[i] - u[i - 1]) + g.flux_coef[i] * (u[i] - u[i + 1])) / g.cell_volume[i];
  }
  out.values[n] = 0.0;
  return out;
}

namespace detail {

/// Solve T x = rhs where T is the (SPD, tridiagonal) stiffness matrix of the
/// discrete -Laplace with u(R) = 0, acting on nodes 0..n-1.
inline std::vector<double> solve_stiffness(const RadialGrid& g, std::span<const double> rhs) {
  const std::size_t n = g.cell_count();  // unknowns: nodes 0..n-1
  if (rhs.size() != n) throw std::invalid_argument("solve_stiffness: bad rhs length");
  std::vector<double> diag(n), sup(n - 1), x(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double left = (i == 0) ? 0.0 : g.flux_coef[i - 1];
    diag[i] = left + g.flux_coef[i];
    if (i + 1 < n) sup[i] = -g.flux_coef[i];
  }
  // Thomas elimination (no pivoting needed: SPD M-matrix).
  for (std::size_t i = 1; i < n; ++i) {
    const double m = sup[i - 1] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    x[i] -= m * x[i - 1];
  }
  x[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    x[i] = (x[i] - sup[i] * x[i + 1]) / diag[i];
  }
  if (!std::isfinite(x[0])) throw std::runtime_error("solve_stiffness: linear solve failed");
  return x;
}

}  // namespace detail

/// Solve -Laplace v = f with v(R) = 0.
inline RadialField solve_dirichlet(const RadialGrid& g, const RadialField& f) {
  check_field(g, f.values);
  const std::size_t n = g.cell_count();
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = g.cell_volume[i] * f[i];
  std::vector<double> x = detail::solve_stiffness(g, rhs);
  RadialField v(g);
  std::copy(x.begin(), x.end(), v.values.begin());
  v.values[n] = 0.0;
  return v;
}

/// Discrete H^-1 norm of a residual field: solve -Laplace v = residual and
/// return sqrt(int |grad v|^2).  Zero iff the residual vanishes.
inline double dual_norm(const RadialGrid& g, const RadialField& residual) {
  RadialField v = solve_dirichlet(g, residual);
  return std::sqrt(std::max(0.0, dirichlet_energy(g, v)));
}

/// First `count` Dirichlet eigenpairs of the discrete -Laplace, by inverse
/// iteration with deflation in the volume-weighted inner product.
struct EigenPair {
  double value = 0.0;
  RadialField vector;  // normalized so that <v, v>_quad = 1
};

inline std::vector<EigenPair> lowest_eigenpairs(const RadialGrid& g, int count, double rel_tol = 1e-10,
                                                int max_iter = 500) {
  const std::size_t n = g.cell_count();
  std::vector<EigenPair> pairs;
  const double omega = sphere_measure(g.dim);

  auto d_inner = [&](std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += g.cell_volume[i] * a[i] * b[i];
    return acc;
  };
  auto stiff_quad = [&](std::span<const double> a) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double right = (j + 1 < n) ? a[j + 1] : 0.0;
      const double du = right - a[j];
      acc += g.flux_coef[j] * du * du;
    }
    return acc;
  };

  std::mt19937_64 rng(12345);
  for (int k = 0; k < count; ++k) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = g.nodes[i] / g.radius;
      x[i] = std::sin((k + 1) * kPi * r) + 1e-3 * std::uniform_real_distribution<double>(-1, 1)(rng);
    }
    double lambda = 0.0, lambda_prev = -1.0;
    int it = 0;
    for (; it < max_iter; ++it) {
      // D-orthogonalize against converged modes, normalize, invert.
      for (const auto& p : pairs) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += g.cell_volume[i] * x[i] * p.vector.values[i];
        c *= omega;
        for (std::size_t i = 0; i < n; ++i) x[i] -= c * p.vector.values[i];
      }
      const double nrm = std::sqrt(omega * d_inner(x, x));
      if (!(nrm > 0.0)) throw std::runtime_error("eigen solve: iterate collapsed");
      for (auto& v : x) v /= nrm;
      lambda = stiff_quad(x) / d_inner(x, x);
      if (lambda_prev > 0.0 && std::abs(lambda - lambda_prev) <= rel_tol * lambda) break;
      lambda_prev = lambda;
      std::vector<double> rhs(n);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = g.cell_volume[i] * x[i];
      x = detail::solve_stiffness(g, rhs);
    }
    if (it == max_iter) throw std::runtime_error("eigen solve: no convergence after iteration cap");
    EigenPair p;
    p.value = lambda;
    p.vector = RadialField(g);
    const double nrm = std::sqrt(omega * d_inner(x, x));
    for (std::size_t i = 0; i < n; ++i) p.vector.values[i] = x[i] / nrm;
    p.vector.values[n] = 0.0;
    pairs.push_back(std::move(p));
  }
  return pairs;
}

/// Smallest Dirichlet eigenvalue; converges to (j_{N/2-1,1}/R)^2 as h -> 0.
inline double smallest_eigenvalue(const RadialGrid& g) { return lowest_eigenpairs(g, 1)[0].value; }

}  // namespace bnlog
