#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnlog/manifest.hpp"
#include "bnlog/solver.hpp"
#include "bnlog/svg.hpp"

namespace bnlog {

/// Atomic file emission: write to a temp sibling, then rename over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string profile_csv(const RadialGrid& g, const RadialField& u, const std::string& hash = {}) {
  std::string out = hash.empty() ? std::string() : "# manifest=" + hash + "\n";
  out += "r,u\n";
  char buf[64];
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.nodes[i], u[i]);
    out += buf;
  }
  return out;
}

inline std::string sweep_csv(const BubbleSweep& sweep, const std::string& hash = {}) {
  std::string out = hash.empty() ? std::string() : "# manifest=" + hash + "\n";
  out += "eps,quantity,value\n";
  char buf[96];
  auto row = [&](double eps, const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g\n", eps, name, v);
    out += buf;
  };
  for (const auto& r : sweep.records) {
    row(r.eps, "grad", r.grad);
    row(r.eps, "crit", r.crit);
    row(r.eps, "mass1", r.mass1);
    row(r.eps, "mass2", r.mass2);
    row(r.eps, "mass_crit_m1", r.mass_crit_m1);
    row(r.eps, "p_delta", r.p_delta);
  }
  return out;
}

inline nlohmann::json rates_json(const RateReport& report, const RunManifest& m) {
  nlohmann::json out;
  out["manifest"] = to_json(m);
  out["manifest_hash"] = manifest_hash(m);
  out["all_pass"] = report.all_pass;
  nlohmann::json fits = nlohmann::json::object();
  for (const auto& f : report.fits) {
    fits[f.quantity] = {{"kind", f.kind},         {"expected", f.expected}, {"fitted", f.fitted},
                        {"coefficient", f.coefficient}, {"drift", f.drift},  {"points_used", f.points_used},
                        {"pass", f.pass}};
  }
  out["fits"] = fits;
  return out;
}

inline const char* kind_name(SolutionKind k) {
  return k == SolutionKind::local_min ? "local_min" : "mountain_pass";
}

inline nlohmann::json outcome_json(const SolveOutcome& o, const RunManifest& m) {
  const PositivityReport pos = positivity_report(o);
  nlohmann::json j;
  j["manifest"] = to_json(m);
  j["manifest_hash"] = manifest_hash(m);
  j["kind"] = kind_name(o.kind);
  j["energy"] = o.energy;
  j["residual"] = o.residual;
  j["iterations"] = o.iterations;
  j["norm"] = o.norm;
  j["report"] = {{"total", o.report.total},
                 {"dirichlet", o.report.dirichlet},
                 {"lambda_term", o.report.lambda_term},
                 {"critical_term", o.report.critical_term},
                 {"log_term", o.report.log_term}};
  j["checks"] = {{"constraint_inactive", o.constraint_inactive},
                 {"descent_monotone", o.descent_monotone},
                 {"nonnegative", pos.nonnegative},
                 {"strictly_positive_interior", pos.strictly_positive_interior},
                 {"energy_sign_ok", o.kind == SolutionKind::local_min ? o.energy < 0.0 : o.energy > 0.0}};
  return j;
}

// ---------------------------------------------------------------------------
// Aggregate verification table, keyed by the estimates it exercises.
// ---------------------------------------------------------------------------

struct CheckRow {
  std::string key;
  bool pass = false;
  std::string detail;
};

struct VerifyResult {
  std::vector<CheckRow> rows;
  bool all_pass = true;

  void add(const std::string& key, bool pass, const std::string& detail) {
    rows.push_back({key, pass, detail});
    all_pass = all_pass && pass;
  }
};

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// Run the whole property suite for one manifest.  `quick` shrinks the random
/// sample counts (the CLI uses full counts).
inline VerifyResult run_verify(const RunManifest& manifest, long sample_count = 1000000) {
  const RunManifest m = finalize(manifest);
  const ProblemParams params = params_of(m);
  const int N = m.dim;
  VerifyResult result;

  // pointwise inequalities
  {
    const ViolationReport rep = check_log_inequalities(sample_count, m.seed);
    const bool extremal_ok = std::abs(rep.max_abs_tlogt - std::exp(-1.0)) <= 1e-9;
    result.add("lemma_2_1", rep.violations == 0 && extremal_ok,
               "violations=" + std::to_string(rep.violations) +
                   " max|t log t|=" + detail::num(rep.max_abs_tlogt));
    const ViolationReport pw = check_power_inequalities(sample_count, m.seed + 1);
    result.add("eq_3_4_3_5", pw.violations == 0, "violations=" + std::to_string(pw.violations));
  }
  if (N != 4) {
    const ViolationReport sup = check_superadditivity(sample_count, N, m.seed + 2);
    result.add("lemma_5_7_super", sup.violations == 0, "violations=" + std::to_string(sup.violations));
  }

  // fibering maximum
  {
    Rng rng(m.seed + 3);
    bool ok = true;
    for (int i = 0; i < 100; ++i) {
      const double mu = rng.log_uniform(1e-2, 1e2);
      const GMax gm = g_max(mu);
      ok = ok && std::abs(gm.arg - 1.0 / std::sqrt(mu)) <= 1e-12 * gm.arg &&
           std::abs(gm.value - 0.25 / mu) <= 1e-12 * gm.value &&
           g_profile(mu, gm.arg - 1e-6) < gm.value && g_profile(mu, gm.arg + 1e-6) < gm.value;
    }
    result.add("eq_66", ok, "argmax mu^-1/2, max mu^-1/4");
  }

  // whole-space identity and Sobolev constant
  const double S = sobolev_constant(N);
  {
    const BubbleIdentity id = whole_space_bubble_identity(N);
    const double sn2 = std::pow(S, 0.5 * N);
    const bool ok = std::abs(id.grad - sn2) <= 1e-3 * sn2 && std::abs(id.crit - sn2) <= 1e-3 * sn2;
    result.add("bubble_identity", ok, "grad=" + detail::num(id.grad) + " crit=" + detail::num(id.crit) +
                                          " S^{N/2}=" + detail::num(sn2));
  }

  const RadialGrid grid = build_grid(N, m.radius, m.node_count);
  const double lambda1 = smallest_eigenvalue(grid);
  const double volume = ball_volume(N, m.radius);
  const RegionVerdict verdict = classify(params, S, lambda1, volume);
  if (!verdict.in_any_a()) {
    result.add("region", false, "parameters outside the admissible regions");
    return result;
  }
  const double rho_ball = m.rho_override > 0.0 ? m.rho_override : rho(params, S, lambda1, verdict);

  // bubble sweep rates
  const std::vector<double> ladder = geometric_ladder(m.eps_from, m.eps_to, m.eps_count);
  const BubbleSweep sweep = run_bubble_sweep(grid, m.cutoff_radius, ladder, m.delta);
  const RateReport rates = rate_regression(sweep);
  {
    std::string detail_str;
    for (const auto& f : rates.fits) {
      detail_str += f.quantity + (f.kind == "dcoef" ? "(d)" : "") + "=" +
                    detail::num(f.kind == "dcoef" ? f.coefficient : f.fitted) + " ";
    }
    result.add(N == 4 ? "lemma_3_1" : "lemma_5_5", rates.all_pass, detail_str);
  }

  // mass lower bound + kernel constant
  {
    const double kernel = whole_space_kernel_integral(N, 0.5 * (N + 2));
    const double expected = sphere_measure(N) / N;
    bool ok = std::abs(kernel - expected) <= 1e-3 * expected;
    double min_margin = std::numeric_limits<double>::infinity();
    const RadialField w_one = RadialField::sample(grid, [](double) { return 1.0; });
    const RadialField w_para = RadialField::sample(grid, [&](double r) { return 1.0 - (r / m.radius) * (r / m.radius); });
    for (const auto* w : {&w_one, &w_para}) {
      for (const auto& rec : sweep.records) {
        if (rec.eps > m.cutoff_radius / 50.0) continue;
        const MassBound mb =
            check_mass_lower_bound(grid, w->values, BubbleSpec{N, rec.eps, m.cutoff_radius});
        min_margin = std::min(min_margin, mb.margin);
        ok = ok && mb.margin >= 0.0;
      }
    }
    result.add(N == 4 ? "lemma_3_3" : "lemma_5_6", ok,
               "kernel=" + detail::num(kernel) + " min_margin=" + detail::num(min_margin));
  }

  // logarithmic decomposition margins
  {
    bool ok = true;
    double min_margin = std::numeric_limits<double>::infinity();
    const double delta_check = N == 4 ? 0.25 : (N == 3 ? 0.4 : 0.125);
    const RadialField w_one = RadialField::sample(grid, [](double) { return 1.0; });
    const RadialField w_para = RadialField::sample(grid, [&](double r) { return 1.0 - 0.9 * (r / m.radius) * (r / m.radius); });
    for (const auto* w : {&w_one, &w_para}) {
      for (double beta : {1e-3, 1.0, 2.5}) {
        for (double eps : {m.cutoff_radius / 2.0, m.cutoff_radius / 20.0}) {
          const LogDecomposition d =
              check_log_decomposition(grid, w->values, BubbleSpec{N, eps, m.cutoff_radius}, beta, delta_check);
          min_margin = std::min(min_margin, d.margin);
          ok = ok && d.margin >= -1e-12 * (1.0 + std::abs(d.rhs));
        }
      }
    }
    result.add(N == 4 ? "lemma_3_2" : "lemma_5_7_log", ok, "min_margin=" + detail::num(min_margin));
  }

  // local minimum, least energy level, reproducibility
  SolveOptions opts;
  opts.tol_min = m.tol_min;
  opts.tol_mp = m.tol_mp;
  opts.path_points = m.path_points;
  opts.seed = m.seed;
  SolveOutcome u0;
  try {
    u0 = find_local_min(grid, params, rho_ball, std::nullopt, opts);
  } catch (const std::exception& e) {
    result.add("eq_2_3", false, e.what());
    return result;
  }
  {
    const PositivityReport pos = positivity_report(u0);
    const bool ok = u0.energy < 0.0 && u0.norm <= rho_ball && u0.residual <= m.tol_min &&
                    pos.strictly_positive_interior && u0.constraint_inactive;
    result.add("eq_2_3", ok, "c_K=" + detail::num(u0.energy) + " norm=" + detail::num(u0.norm) +
                                 " rho=" + detail::num(rho_ball) + " res=" + detail::num(u0.residual));
  }
  {
    RadialField init2 = u0.field;
    for (auto& v : init2.values) v *= 0.75;
    const SolveOutcome again = find_local_min(grid, params, rho_ball, init2, opts);
    const double rel = std::abs(again.energy - u0.energy) / std::max(1e-300, std::abs(u0.energy));
    result.add("lemma_2_2", rel <= 1e-6, "c_K agreement rel=" + detail::num(rel));
  }

  // sup_beta sweep against the compactness threshold
  const double gap = energy_gap_threshold(params, S);
  const EpsWindow win = beta_scan_window(N);
  const BetaSweepResult beta_sweep =
      run_beta_sweep(grid, params, u0.field, m.cutoff_radius, geometric_ladder(win.from, win.to, 8), gap);
  {
    const double unit = 1.0 / std::sqrt(params.mu);
    const bool ok = beta_sweep.worst_margin > 0.0 && beta_sweep.beta_min >= 0.05 * unit &&
                    beta_sweep.beta_max <= 20.0 * unit;
    result.add(N == 4 ? "lemma_3_4" : "lemma_5_8", ok,
               "worst_margin=" + detail::num(beta_sweep.worst_margin) + " beta in [" +
                   detail::num(beta_sweep.beta_min) + "," + detail::num(beta_sweep.beta_max) + "]");
  }

  // mountain-pass geometry: a below-level endpoint beyond the sphere exists
  double beta_end = 0.0;
  RadialField endpoint;
  const BubbleSpec spec_end{N, beta_sweep.best_eps, m.cutoff_radius};
  try {
    endpoint = make_mountain_pass_endpoint(grid, params, u0, spec_end, rho_ball, &beta_end);
    result.add("lemma_2_3", true,
               "beta*=" + detail::num(beta_end) + " at eps=" + detail::num(beta_sweep.best_eps));
  } catch (const std::exception& e) {
    result.add("lemma_2_3", false, e.what());
    return result;
  }

  // mountain pass, sphere floor and the energy ordering
  {
    PathTrace trace;
    SolveOutcome mp;
    try {
      mp = mountain_pass(grid, params, u0, endpoint, opts, &trace);
    } catch (const std::exception& e) {
      result.add(N == 4 ? "lemma_2_4" : "lemma_5_4", false, e.what());
      return result;
    }
    // sphere floor: eigenfunction mixtures plus the directions through u_0,
    // the truncated bubble and the pass candidate itself
    double alpha_hat = 0.0;
    {
      std::vector<RadialField> dirs{u0.field, bubble_field(grid, spec_end), mp.field};
      const SphereFloor floor = estimate_sphere_floor(grid, params, rho_ball, 300, m.seed + 4, dirs);
      alpha_hat = floor.alpha_hat;
      result.add("eq_2_5", floor.alpha_hat > 0.0, "alpha_hat=" + detail::num(floor.alpha_hat));
    }
    const PositivityReport pos = positivity_report(mp);
    const GapVerdict gv = verify_energy_gap(mp.energy, u0.energy, params, S);
    const bool ordering = u0.energy < 0.0 && 0.0 < alpha_hat && alpha_hat <= mp.energy && gv.ok;
    const bool ok = ordering && mp.residual <= m.tol_mp && pos.strictly_positive_interior;
    result.add(N == 4 ? "lemma_2_4" : "lemma_5_4", ok,
               "c_M=" + detail::num(mp.energy) + " threshold=" + detail::num(gv.threshold) +
                   " margin=" + detail::num(gv.margin) + " res=" + detail::num(mp.residual) +
                   " alpha_hat=" + detail::num(alpha_hat));
  }

  return result;
}

inline nlohmann::json verify_json(const VerifyResult& r, const RunManifest& m) {
  nlohmann::json rows = nlohmann::json::object();
  for (const auto& row : r.rows) rows[row.key] = {{"pass", row.pass}, {"detail", row.detail}};
  return nlohmann::json{{"manifest", to_json(m)},
                        {"manifest_hash", manifest_hash(m)},
                        {"all_pass", r.all_pass},
                        {"checks", rows}};
}

}  // namespace bnlog
