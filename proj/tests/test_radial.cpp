#include <doctest.h>

#include <cmath>
#include <vector>

#include "bnlog/radial.hpp"
#include "bnlog/wholespace.hpp"
#include "oracles.hpp"

using namespace bnlog;

TEST_CASE("grid weights sum to the ball volume") {
  // N=4 unit ball: pi^2/2, cross-checked against a seeded Monte-Carlo volume
  const RadialGrid g4 = build_grid(4, 1.0, 2048);
  double wsum = 0.0;
  for (double w : g4.quad_weights) wsum += w;
  const double exact = kPi * kPi / 2.0;
  CHECK(std::abs(wsum - exact) <= 1e-12 * exact);
  const double mc = oracles::mc_ball_volume(4, 2000000, 7);
  CHECK(std::abs(mc - exact) <= 0.02);  // ~3 sigma for 2e6 samples

  const RadialGrid g3 = build_grid(3, 1.0, 2048);
  wsum = 0.0;
  for (double w : g3.quad_weights) wsum += w;
  CHECK(std::abs(wsum - 4.0 * kPi / 3.0) <= 1e-12 * wsum);

  const RadialGrid g5 = build_grid(5, 2.0, 2048);
  wsum = 0.0;
  for (double w : g5.quad_weights) wsum += w;
  CHECK(std::abs(wsum - (8.0 * kPi * kPi / 15.0) * 32.0) <= 1e-12 * wsum);
}

TEST_CASE("grid invariants and rejection") {
  const RadialGrid g = build_grid(3, 2.5, 64);
  CHECK(g.nodes.front() == 0.0);
  CHECK(g.nodes.back() == 2.5);
  for (std::size_t i = 0; i + 1 < g.node_count(); ++i) CHECK(g.nodes[i] < g.nodes[i + 1]);
  CHECK_THROWS_AS(build_grid(6, 1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(2, 1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(4, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(4, -1.0, 64), std::invalid_argument);
}

TEST_CASE("quadrature of simple radial functions") {
  const RadialGrid g = build_grid(3, 1.0, 2048);
  const RadialField one = RadialField::sample(g, [](double) { return 1.0; });
  CHECK(quad(g, one) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-12));

  const RadialField r2 = RadialField::sample(g, [](double r) { return r * r; });
  CHECK(quad(g, r2) == doctest::Approx(4.0 * kPi / 5.0).epsilon(1e-4));

  RadialField bad;
  bad.values = {1.0, 2.0};
  CHECK_THROWS_AS(quad(g, bad.values), std::invalid_argument);
}

TEST_CASE("quadrature of the slow bubble-kernel tail") {
  // (1+r^2)^{-3} over R^4 equals pi^2/2; a large truncated ball gets close,
  // the dedicated whole-space integral nails it
  const double exact = kPi * kPi / 2.0;
  const RadialGrid g = build_grid(4, 60.0, 4096);
  const RadialField f = RadialField::sample(g, [](double r) { return std::pow(1.0 + r * r, -3.0); });
  CHECK(quad(g, f) == doctest::Approx(exact).epsilon(2e-3));
  CHECK(whole_space_kernel_integral(4, 3.0) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("laplacian is exact on the quadratic 1 - r^2") {
  // At nodes with r below ~1e-4 the nodal samples of 1 - r^2 round to 1.0, so
  // the divided differences carry rounding noise rather than curvature; the
  // flux scheme itself is exact on quadratics wherever the data resolves them.
  for (int dim : {3, 4, 5}) {
    const RadialGrid g = build_grid(dim, 1.0, 512);
    const RadialField u = RadialField::sample(g, [](double r) { return 1.0 - r * r; });
    const RadialField lap = laplacian_apply(g, u);
    for (std::size_t i = 1; i < g.cell_count(); ++i) {
      if (g.nodes[i] >= 0.05) {
        CHECK(lap[i] == doctest::Approx(2.0 * dim).epsilon(1e-8));
      } else if (g.nodes[i] >= 1e-4) {
        CHECK(lap[i] == doctest::Approx(2.0 * dim).epsilon(1e-2));
      }
    }
  }
}

TEST_CASE("laplacian of zero and of the first eigenfunction") {
  const RadialGrid g = build_grid(3, 1.0, 2048);
  const RadialField z(g);
  const RadialField lz = laplacian_apply(g, z);
  for (double v : lz.values) CHECK(v == 0.0);

  // N=3 first eigenfunction is sin(pi r)/r with eigenvalue pi^2
  RadialField e = RadialField::sample(g, [](double r) { return r == 0.0 ? kPi : std::sin(kPi * r) / r; });
  e.values.back() = 0.0;
  const RadialField le = laplacian_apply(g, e);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (g.nodes[i] < 0.01) continue;  // below the nodal rounding floor
    worst = std::max(worst, std::abs(le[i] - kPi * kPi * e[i]));
  }
  CHECK(worst <= 2e-3 * kPi * kPi);  // O(h^2) at this resolution
}

TEST_CASE("dirichlet energy") {
  const RadialGrid g = build_grid(4, 1.0, 2048);
  const RadialField u = RadialField::sample(g, [](double r) { return 1.0 - r * r; });
  CHECK(dirichlet_energy(g, u) == doctest::Approx(4.0 * kPi * kPi / 3.0).epsilon(1e-4));
  const RadialField z(g);
  CHECK(dirichlet_energy(g, z) == 0.0);

  const auto e1 = lowest_eigenpairs(g, 1)[0];
  const double rayleigh = dirichlet_energy(g, e1.vector) / quad_inner(g, e1.vector.values, e1.vector.values);
  CHECK(rayleigh == doctest::Approx(e1.value).epsilon(1e-10));
}

TEST_CASE("summation by parts is exact for the matched pair") {
  const RadialGrid g = build_grid(5, 1.0, 512);
  const RadialField u = RadialField::sample(g, [](double r) { return std::cos(kPi * r / 2.0) * (1.0 - r * r); });
  const RadialField au = laplacian_apply(g, u);
  const double lhs = quad_inner(g, au.values, u.values);
  const double rhs = dirichlet_energy(g, u);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("smallest eigenvalue matches the Bessel zeros") {
  const double targets[3] = {kPi * kPi, std::pow(oracles::bessel_j1_first_zero(), 2),
                             std::pow(oracles::tan_eq_x_root(), 2)};
  const int dims[3] = {3, 4, 5};
  for (int k = 0; k < 3; ++k) {
    const RadialGrid g = build_grid(dims[k], 1.0, 4096);
    const double lam = smallest_eigenvalue(g);
    CHECK(lam == doctest::Approx(targets[k]).epsilon(1e-3));
  }
  // reported reference values
  CHECK(targets[1] == doctest::Approx(14.682).epsilon(1e-4));
  CHECK(targets[2] == doctest::Approx(20.19).epsilon(1e-3));
}

TEST_CASE("eigenvalue refinement order is at least 1.9") {
  std::vector<double> logh, logerr;
  const double exact = kPi * kPi;
  for (int n : {512, 1024, 2048, 4096}) {
    const RadialGrid g = build_grid(3, 1.0, n);
    logh.push_back(std::log(1.0 / n));
    logerr.push_back(std::log(std::abs(smallest_eigenvalue(g) - exact)));
  }
  CHECK(oracles::slope(logh, logerr) >= 1.9);
}

TEST_CASE("radius scaling of the eigenvalue") {
  const RadialGrid g = build_grid(3, 2.0, 2048);
  CHECK(smallest_eigenvalue(g) == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-3));
}

TEST_CASE("dual norm") {
  const RadialGrid g = build_grid(4, 1.0, 1024);
  const RadialField z(g);
  CHECK(dual_norm(g, z) == 0.0);

  // residual -Lap(1-r^2) = 8 recovers v = 1-r^2, dual norm sqrt(4 pi^2/3)
  RadialField c8 = RadialField::sample(g, [](double) { return 8.0; });
  c8.values.back() = 0.0;
  const RadialField v = solve_dirichlet(g, c8);
  for (std::size_t i = 0; i < g.node_count(); i += 100) {
    CHECK(v[i] == doctest::Approx(1.0 - g.nodes[i] * g.nodes[i]).epsilon(1e-8));
  }
  CHECK(dual_norm(g, c8) == doctest::Approx(std::sqrt(4.0 * kPi * kPi / 3.0)).epsilon(1e-4));

  // energy identity: ||g||_* = sqrt(<g, v>_quad) exactly at the discrete level
  Rng rng(3);
  RadialField noise(g);
  for (std::size_t i = 0; i < g.cell_count(); ++i) noise.values[i] = rng.uniform(-1.0, 1.0);
  const RadialField vn = solve_dirichlet(g, noise);
  const double dn = dual_norm(g, noise);
  CHECK(dn * dn == doctest::Approx(quad_inner(g, noise.values, vn.values)).epsilon(1e-12));

  // dual_norm(-Lap v) = sqrt(dirichlet_energy(v)) with the same matrix
  const RadialField w = RadialField::sample(g, [](double r) { return std::sin(kPi * r) * (1.0 - r); });
  const RadialField aw = laplacian_apply(g, w);
  CHECK(dual_norm(g, aw) == doctest::Approx(std::sqrt(dirichlet_energy(g, w))).epsilon(1e-11));
}
