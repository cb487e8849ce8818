// Command-line driver: region classification, bubble sweeps, the two solver
// runs and the aggregate verification table.  Exit codes: 0 = all checks
// pass, 1 = a verified estimate failed (or a solver run failed), 2 = usage or
// configuration error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnlog/report.hpp"

namespace {

using namespace bnlog;

void add_manifest_options(CLI::App* cmd, RunManifest& m) {
  cmd->add_option("--dim", m.dim, "space dimension (3, 4 or 5)")->check(CLI::IsMember({3, 4, 5}));
  cmd->add_option("--radius", m.radius, "ball radius");
  cmd->add_option("--nodes", m.node_count, "mesh intervals");
  cmd->add_option("--lambda", m.lambda, "linear coefficient lambda");
  cmd->add_option("--mu", m.mu, "critical coefficient mu (> 0)");
  cmd->add_option("--theta", m.theta, "logarithmic coefficient theta (< 0)");
  cmd->add_option("--rho", m.rho_override, "override the minimization ball radius");
  cmd->add_option("--cutoff-rho", m.cutoff_radius, "bubble cutoff plateau radius");
  cmd->add_option("--eps-from", m.eps_from, "largest sweep epsilon");
  cmd->add_option("--eps-to", m.eps_to, "smallest sweep epsilon");
  cmd->add_option("--eps-count", m.eps_count, "number of sweep epsilons");
  cmd->add_option("--delta", m.delta, "delta exponent for N = 3, 5 estimates");
  cmd->add_option("--tol-min", m.tol_min, "residual tolerance of the local minimum");
  cmd->add_option("--tol-mp", m.tol_mp, "residual tolerance of the mountain pass");
  cmd->add_option("--path-points", m.path_points, "mountain-pass path resolution");
  cmd->add_option("--seed", m.seed, "RNG seed for randomized checks");
  cmd->add_option("--out", m.out_dir, "output directory for JSON/CSV/SVG files");
  cmd->add_flag("--svg", m.svg, "also emit SVG plots");
}

void emit(const RunManifest& m, const std::string& name, std::string content) {
  if (m.out_dir.empty()) return;
  if (name.size() > 4 && name.rfind(".svg") == name.size() - 4) {
    content += "<!-- manifest=" + manifest_hash(m) + " -->\n";
  }
  std::filesystem::create_directories(m.out_dir);
  write_atomic(std::filesystem::path(m.out_dir) / name, content);
}

int cmd_classify(const RunManifest& raw) {
  const RunManifest m = finalize(raw);
  const ProblemParams params = params_of(m);
  const double S = sobolev_constant(m.dim);
  const RadialGrid grid = build_grid(m.dim, m.radius, std::min(m.node_count, 2048));
  const double lambda1 = smallest_eigenvalue(grid);
  const double volume = ball_volume(m.dim, m.radius);
  const RegionVerdict v = classify(params, S, lambda1, volume);

  nlohmann::json j{{"manifest", to_json(m)},
                   {"manifest_hash", manifest_hash(m)},
                   {"S", S},
                   {"lambda1", lambda1},
                   {"volume", volume},
                   {"in_A1", v.in_a1},
                   {"in_A2", v.in_a2},
                   {"in_A3", v.in_a3},
                   {"in_A4", v.in_a4},
                   {"in_Sigma1", v.in_sigma1},
                   {"in_Sigma2", v.in_sigma2},
                   {"margin_A1", v.margin_a1},
                   {"margin_A2", v.margin_a2},
                   {"margin_A3", v.margin_a3},
                   {"margin_A4", v.margin_a4},
                   {"margin_Sigma1", v.margin_sigma1},
                   {"margin_Sigma2", v.margin_sigma2}};
  std::cout << j.dump(2) << "\n";
  emit(m, "classify.json", j.dump(2) + "\n");
  return v.in_any_a() ? 0 : 1;
}

int cmd_bubbles(const RunManifest& raw) {
  const RunManifest m = finalize(raw);
  const RadialGrid grid = build_grid(m.dim, m.radius, m.node_count);
  const auto ladder = geometric_ladder(m.eps_from, m.eps_to, m.eps_count);
  const BubbleSweep sweep = run_bubble_sweep(grid, m.cutoff_radius, ladder, m.delta);
  const RateReport rates = rate_regression(sweep);

  const nlohmann::json j = rates_json(rates, m);
  std::cout << j.dump(2) << "\n";
  emit(m, "sweep.csv", sweep_csv(sweep, manifest_hash(m)));
  emit(m, "rates.json", j.dump(2) + "\n");
  return rates.all_pass ? 0 : 1;
}

int cmd_solve(const RunManifest& raw, const std::string& which) {
  const RunManifest m = finalize(raw);
  const ProblemParams params = params_of(m);
  const double S = sobolev_constant(m.dim);
  const RadialGrid grid = build_grid(m.dim, m.radius, m.node_count);
  const double lambda1 = smallest_eigenvalue(grid);
  const RegionVerdict v = classify(params, S, lambda1, ball_volume(m.dim, m.radius));
  if (!v.in_any_a()) {
    std::cerr << "refusing to solve: parameters lie outside the admissible regions\n"
              << "  margin_A1=" << v.margin_a1 << " margin_A2=" << v.margin_a2 << " margin_A3=" << v.margin_a3
              << " margin_A4=" << v.margin_a4 << "\n";
    return 2;
  }
  const double rho_ball = m.rho_override > 0.0 ? m.rho_override : rho(params, S, lambda1, v);

  SolveOptions opts;
  opts.tol_min = m.tol_min;
  opts.tol_mp = m.tol_mp;
  opts.path_points = m.path_points;
  opts.seed = m.seed;

  const SolveOutcome u0 = find_local_min(grid, params, rho_ball, std::nullopt, opts);
  nlohmann::json j = outcome_json(u0, m);
  j["rho"] = rho_ball;
  j["S"] = S;
  j["lambda1"] = lambda1;
  emit(m, "min.json", j.dump(2) + "\n");
  emit(m, "min_profile.csv", profile_csv(grid, u0.field, manifest_hash(m)));

  if (which == "mp") {
    // endpoint at the concentration scale minimizing the sup over beta
    const EpsWindow win = beta_scan_window(m.dim);
    const BetaSweepResult sweep = run_beta_sweep(grid, params, u0.field, m.cutoff_radius,
                                                 geometric_ladder(win.from, win.to, 8),
                                                 energy_gap_threshold(params, S));
    const BubbleSpec spec{m.dim, sweep.best_eps, m.cutoff_radius};
    double beta_end = 0.0;
    const RadialField endpoint = make_mountain_pass_endpoint(grid, params, u0, spec, rho_ball, &beta_end);
    PathTrace trace;
    const SolveOutcome mp = mountain_pass(grid, params, u0, endpoint, opts, &trace);
    const GapVerdict gap = verify_energy_gap(mp.energy, u0.energy, params, S);

    nlohmann::json jm = outcome_json(mp, m);
    jm["rho"] = rho_ball;
    jm["beta_end"] = beta_end;
    jm["c_K"] = u0.energy;
    jm["threshold"] = gap.threshold;
    jm["gap_margin"] = gap.margin;
    jm["gap_ok"] = gap.ok;
    jm["restarts"] = trace.restarts;
    std::cout << jm.dump(2) << "\n";
    emit(m, "mp.json", jm.dump(2) + "\n");
    emit(m, "mp_profile.csv", profile_csv(grid, mp.field, manifest_hash(m)));
    if (m.svg) {
      const std::vector<RadialField> fields{u0.field, mp.field};
      const std::vector<std::string> labels{"local min", "mountain pass"};
      emit(m, "profiles.svg", svg_profiles(grid, fields, labels));
      emit(m, "path_energies.svg", svg_path_energies(trace.final_energies));
    }
    return gap.ok ? 0 : 1;
  }

  std::cout << j.dump(2) << "\n";
  if (m.svg) {
    const std::vector<RadialField> fields{u0.field};
    const std::vector<std::string> labels{"local min"};
    emit(m, "profiles.svg", svg_profiles(grid, fields, labels));
  }
  return 0;
}

int cmd_verify(const RunManifest& raw) {
  const RunManifest m = finalize(raw);
  const VerifyResult result = run_verify(m);
  for (const auto& row : result.rows) {
    std::printf("[%s] %-16s %s\n", row.pass ? "PASS" : "FAIL", row.key.c_str(), row.detail.c_str());
  }
  std::printf("%s\n", result.all_pass ? "all checks passed" : "FAILURES present");
  emit(m, "verify.json", verify_json(result, m).dump(2) + "\n");
  if (!result.all_pass) {
    for (const auto& row : result.rows) {
      if (!row.pass) std::fprintf(stderr, "failing check: %s\n", row.key.c_str());
    }
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational toolkit for the log-perturbed critical problem on the ball"};
  app.require_subcommand(1);

  RunManifest m;
  std::string which = "min";

  CLI::App* c_classify = app.add_subcommand("classify", "evaluate the admissible parameter regions");
  add_manifest_options(c_classify, m);
  CLI::App* c_bubbles = app.add_subcommand("bubbles", "epsilon sweep of the truncated-bubble integrals");
  add_manifest_options(c_bubbles, m);
  CLI::App* c_solve = app.add_subcommand("solve", "compute the local minimum (min) or mountain pass (mp)");
  add_manifest_options(c_solve, m);
  c_solve->add_option("which", which, "min | mp")->check(CLI::IsMember({"min", "mp"}));
  CLI::App* c_verify = app.add_subcommand("verify", "run the aggregate verification table");
  add_manifest_options(c_verify, m);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_classify->parsed()) return cmd_classify(m);
    if (c_bubbles->parsed()) return cmd_bubbles(m);
    if (c_solve->parsed()) return cmd_solve(m, which);
    if (c_verify->parsed()) return cmd_verify(m);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
