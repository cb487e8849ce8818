#include <doctest.h>

#include <cmath>
#include <vector>

#include "bnlog/bubble.hpp"
#include "bnlog/regions.hpp"
#include "oracles.hpp"

using namespace bnlog;

TEST_CASE("bubble field values and cutoff smoothness") {
  const RadialGrid g = build_grid(4, 1.0, 512);
  const BubbleSpec s4{4, 0.05, 0.2};
  CHECK(bubble_value(s4, 0.0) == doctest::Approx(2.0 * std::sqrt(2.0) / 0.05).epsilon(1e-14));
  CHECK(psi_value(s4, 0.4) == 0.0);
  CHECK(psi_value(s4, 0.5) == 0.0);

  const BubbleSpec s3{3, 0.01, 0.2};
  const double r = 0.1;
  const double expect = std::pow(3.0, 0.25) * std::sqrt(0.01 / (0.01 * 0.01 + r * r));
  CHECK(psi_value(s3, r) == doctest::Approx(expect).epsilon(1e-14));

  // quintic smoothstep: C^2 contact at both plateau edges
  const double rho_c = 0.2;
  for (double edge : {rho_c, 2.0 * rho_c}) {
    const double h = 1e-5;
    const double inside = cutoff_deriv(edge + (edge == rho_c ? h : -h), rho_c);
    CHECK(std::abs(inside) <= 1e-6);  // derivative ~ O(h^2) just inside the edges
  }
  CHECK(cutoff_value(0.3, 0.2) == doctest::Approx(0.5).epsilon(1e-12));

  const RadialField f = bubble_field(g, s4);
  CHECK(f.values.back() == 0.0);
  CHECK_THROWS_AS(bubble_field(g, BubbleSpec{4, 0.05, 0.6}), std::invalid_argument);  // 2 rho > R
  CHECK_THROWS_AS(bubble_field(g, BubbleSpec{3, 0.05, 0.2}), std::invalid_argument);  // dim mismatch
}

TEST_CASE("whole-space bubble identity") {
  // N = 4: both integrals equal 32 pi^2 / 3
  const BubbleIdentity id4 = whole_space_bubble_identity(4);
  const double exact = 32.0 * kPi * kPi / 3.0;
  CHECK(id4.grad == doctest::Approx(exact).epsilon(1e-6));
  CHECK(id4.crit == doctest::Approx(exact).epsilon(1e-6));

  // scale invariance across two decades of eps
  const double ref = id4.grad;
  for (double eps : {0.1, 0.5, 2.0, 10.0}) {
    const BubbleIdentity id = whole_space_bubble_identity(4, eps);
    CHECK(std::abs(id.grad - ref) <= 1e-6 * ref);
    CHECK(std::abs(id.crit - id4.crit) <= 1e-6 * ref);
  }

  // N = 3: both equal S^{3/2}
  const double s3 = sobolev_constant(3);
  const BubbleIdentity id3 = whole_space_bubble_identity(3);
  CHECK(id3.grad == doctest::Approx(std::pow(s3, 1.5)).epsilon(1e-6));
}

TEST_CASE("truncation monotonicity") {
  const RadialGrid g = build_grid(5, 1.0, 1024);
  const BubbleSpec s{5, 0.01, 0.2};
  const BubbleIntegrals rec = bubble_integrals(g, s, default_delta(5));
  const double pc = critical_exponent(5);
  CHECK(rec.crit <= whole_space_bubble_power(5, pc, s.eps) * (1.0 + 1e-12));
  CHECK(rec.mass_crit_m1 <= whole_space_bubble_power(5, pc - 1.0, s.eps) * (1.0 + 1e-12));
  CHECK(rec.mass2 <= whole_space_bubble_power(5, 2.0, s.eps) * (1.0 + 1e-12));
}

TEST_CASE("delta window is enforced") {
  const RadialGrid g3 = build_grid(3, 1.0, 512);
  CHECK_THROWS_AS(bubble_integrals(g3, BubbleSpec{3, 0.01, 0.2}, 0.4), std::invalid_argument);
  CHECK_NOTHROW(bubble_integrals(g3, BubbleSpec{3, 0.01, 0.2}, 0.75));
  const RadialGrid g5 = build_grid(5, 1.0, 512);
  CHECK_THROWS_AS(bubble_integrals(g5, BubbleSpec{5, 0.01, 0.2}, 0.2), std::invalid_argument);
  CHECK_NOTHROW(bubble_integrals(g5, BubbleSpec{5, 0.01, 0.2}, 0.125));
}

TEST_CASE("synthetic rate fits") {
  BubbleSweep sweep;
  sweep.dim = 4;
  sweep.delta = 0.25;
  sweep.grad_limit = 100.0;
  sweep.crit_limit = 100.0;
  for (double eps : geometric_ladder(1e-1, 1e-3, 8)) {
    BubbleIntegrals r;
    r.eps = eps;
    r.grad = 100.0 + 7.0 * eps * eps;       // residual slope 2
    r.crit = 100.0 - 3.0 * eps * eps * eps * eps;  // residual slope 4
    r.mass1 = 3.0 * eps;                     // power slope 1, coefficient 3
    r.mass2 = 5.0 * eps * eps * std::abs(std::log(eps));
    r.mass_crit_m1 = 2.0 * eps;
    r.p_delta = 1.5 * std::pow(eps, 1.5);
    sweep.records.push_back(r);
  }
  const RateReport rep = rate_regression(sweep);
  CHECK(rep.all_pass);
  for (const auto& f : rep.fits) {
    if (f.quantity == "mass1") {
      CHECK(f.fitted == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(f.coefficient == doctest::Approx(3.0).epsilon(1e-9));
    }
    if (f.quantity == "grad") CHECK(f.fitted == doctest::Approx(2.0).epsilon(1e-9));
    if (f.quantity == "crit") CHECK(f.fitted == doctest::Approx(4.0).epsilon(1e-6));
    if (f.quantity == "mass2") CHECK(f.coefficient == doctest::Approx(5.0).epsilon(1e-2));
  }
}

TEST_CASE("non-monotone sweep data is rejected with the failing eps named") {
  BubbleSweep sweep;
  sweep.dim = 4;
  sweep.delta = 0.25;
  sweep.grad_limit = 100.0;
  sweep.crit_limit = 100.0;
  int k = 0;
  for (double eps : geometric_ladder(1e-1, 1e-3, 8)) {
    BubbleIntegrals r;
    r.eps = eps;
    r.grad = 100.0 + 7.0 * eps * eps;
    r.crit = 100.0 - 3.0 * std::pow(eps, 4.0);
    r.mass1 = (k == 5) ? 1.0 : 3.0 * eps;  // break monotonicity at one point
    r.mass2 = 5.0 * eps * eps * std::abs(std::log(eps));
    r.mass_crit_m1 = 2.0 * eps;
    r.p_delta = 1.5 * std::pow(eps, 1.5);
    sweep.records.push_back(r);
    ++k;
  }
  CHECK_THROWS_WITH_AS(rate_regression(sweep), doctest::Contains("mass1"), std::runtime_error);
}

TEST_CASE("sweep validation") {
  const RadialGrid g = build_grid(4, 1.0, 512);
  const std::vector<double> two = {1e-2, 1e-3};
  CHECK_THROWS_AS(run_bubble_sweep(g, 0.2, two, 0.25), std::invalid_argument);
  const std::vector<double> narrow = geometric_ladder(1e-2, 5e-3, 8);
  CHECK_THROWS_AS(run_bubble_sweep(g, 0.2, narrow, 0.25), std::invalid_argument);
  std::vector<double> increasing = geometric_ladder(1e-2, 1e-4, 8);
  std::swap(increasing[2], increasing[3]);
  CHECK_THROWS_AS(run_bubble_sweep(g, 0.2, increasing, 0.25), std::invalid_argument);
  const std::vector<double> too_big = geometric_ladder(0.1, 1e-4, 8);  // eps > rho/10
  CHECK_THROWS_AS(run_bubble_sweep(g, 0.2, too_big, 0.25), std::invalid_argument);
}

TEST_CASE("fitted rates match the expected asymptotic orders") {
  // full check at n = 4096 lives in the acceptance suite; this is the n = 2048 smoke
  for (int dim : {3, 4, 5}) {
    const RadialGrid g = build_grid(dim, 1.0, 2048);
    const auto ladder = geometric_ladder(0.2 / 16.0, 0.2 / 4096.0, 8);
    const BubbleSweep sweep = run_bubble_sweep(g, 0.2, ladder, default_delta(dim));
    const RateReport rep = rate_regression(sweep);
    for (const auto& f : rep.fits) {
      INFO(dim, " ", f.quantity, " fitted ", f.fitted, " expected ", f.expected);
      CHECK(f.pass);
    }
  }
}

TEST_CASE("log decomposition margins are nonnegative") {
  for (int dim : {3, 4, 5}) {
    const RadialGrid g = build_grid(dim, 1.0, 1024);
    const double delta = dim == 3 ? 0.4 : default_delta(dim);  // N=3 uses the documented sample point
    const RadialField w_one = RadialField::sample(g, [](double) { return 1.0; });
    const RadialField w_para = RadialField::sample(g, [](double r) { return 1.0 - 0.9 * r * r; });
    for (const auto* w : {&w_one, &w_para}) {
      for (double beta : {1e-3, 1.0, 2.0}) {
        for (double eps : {0.1, 0.01}) {
          const LogDecomposition d =
              check_log_decomposition(g, w->values, BubbleSpec{dim, eps, 0.2}, beta, delta);
          INFO(dim, " beta ", beta, " eps ", eps, " margin ", d.margin);
          CHECK(d.margin >= -1e-12 * (1.0 + std::abs(d.rhs)));
        }
      }
    }
  }
}

TEST_CASE("log decomposition margin vanishes as beta -> 0") {
  const RadialGrid g = build_grid(4, 1.0, 1024);
  const RadialField w = RadialField::sample(g, [](double) { return 1.0; });
  const LogDecomposition tiny = check_log_decomposition(g, w.values, BubbleSpec{4, 0.1, 0.2}, 1e-6, 0.25);
  const LogDecomposition small = check_log_decomposition(g, w.values, BubbleSpec{4, 0.1, 0.2}, 1e-2, 0.25);
  CHECK(tiny.margin >= -1e-15);
  CHECK(tiny.margin <= small.margin);
  CHECK(std::abs(tiny.lhs) <= 1e-4);
}

TEST_CASE("log decomposition rejects w with interior zeros") {
  const RadialGrid g = build_grid(4, 1.0, 512);
  RadialField w = RadialField::sample(g, [](double r) { return 1.0 - r * r; });
  w.values[10] = 0.0;
  CHECK_THROWS_AS(check_log_decomposition(g, w.values, BubbleSpec{4, 0.05, 0.2}, 1.0, 0.25),
                  std::invalid_argument);
}

TEST_CASE("mass lower bound") {
  const RadialGrid g = build_grid(4, 1.0, 2048);
  const RadialField w_one = RadialField::sample(g, [](double) { return 1.0; });
  const RadialField w_para = RadialField::sample(g, [](double r) { return 1.0 - r * r; });

  // constant w: the ratio integral/leading approaches 2 as eps -> 0
  const MassBound mb = check_mass_lower_bound(g, w_one.values, BubbleSpec{4, 1e-3, 0.2});
  CHECK(mb.ratio == doctest::Approx(2.0).epsilon(2e-2));
  CHECK(mb.margin >= 0.0);

  for (double eps : {0.004, 0.001, 2e-4}) {
    CHECK(check_mass_lower_bound(g, w_one.values, BubbleSpec{4, eps, 0.2}).margin >= 0.0);
    CHECK(check_mass_lower_bound(g, w_para.values, BubbleSpec{4, eps, 0.2}).margin >= 0.0);
  }

  // half-value condition: a sharply decaying weight is rejected
  const RadialField w_sharp = RadialField::sample(g, [](double r) { return 1.0 / (1.0 + 100.0 * r * r); });
  CHECK_THROWS_AS(check_mass_lower_bound(g, w_sharp.values, BubbleSpec{4, 1e-3, 0.2}),
                  std::invalid_argument);
}

TEST_CASE("kernel constant pi^2/2 via the mass bound leading term") {
  // int_{R^4} (1+|y|^2)^{-3} dy = pi^2/2 enters the N=4 leading constant
  CHECK(whole_space_kernel_integral(4, 3.0) == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-6));
  CHECK(whole_space_kernel_integral(3, 2.5) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-6));
  CHECK(whole_space_kernel_integral(5, 3.5) == doctest::Approx(8.0 * kPi * kPi / 15.0).epsilon(1e-6));
}

TEST_CASE("superadditivity of the critical power") {
  for (int dim : {3, 5}) {
    const ViolationReport rep = check_superadditivity(1000000, dim, 77);
    CHECK(rep.violations == 0);
  }
  // a = b = 1, N = 3: 64 >= 14 with margin 50
  const double p = 6.0;
  CHECK(std::pow(2.0, p) - (2.0 + 2.0 * p) == doctest::Approx(50.0));
  CHECK_THROWS_AS(check_superadditivity(10, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(check_superadditivity(0, 3, 1), std::invalid_argument);
}
