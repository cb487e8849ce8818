#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bnlog/report.hpp"
#include "oracles.hpp"

using namespace bnlog;

namespace {

RunManifest small_manifest(int dim) {
  RunManifest m;
  m.dim = dim;
  m.node_count = 512;
  return finalize(m);
}

}  // namespace

TEST_CASE("manifest defaults and validation") {
  const RunManifest m4 = small_manifest(4);
  CHECK(m4.theta == -5.0);
  CHECK(m4.lambda == 0.0);
  CHECK(m4.delta == 0.25);
  CHECK(m4.eps_from == doctest::Approx(0.2 / 16.0));
  CHECK(m4.eps_to == doctest::Approx(0.2 / 4096.0));
  const RunManifest m5 = small_manifest(5);
  CHECK(m5.lambda == 15.0);
  CHECK(m5.theta == -0.5);

  RunManifest bad;
  bad.dim = 6;
  CHECK_THROWS_AS(finalize(bad), std::invalid_argument);
  RunManifest bad_theta;
  bad_theta.theta = 0.3;
  CHECK_THROWS_AS(finalize(bad_theta), std::invalid_argument);
  RunManifest zero_theta;
  zero_theta.theta = 0.0;  // an explicit zero is rejected, not defaulted
  CHECK_THROWS_AS(finalize(zero_theta), std::invalid_argument);
  RunManifest bad_mu;
  bad_mu.mu = -1.0;
  CHECK_THROWS_AS(finalize(bad_mu), std::invalid_argument);
}

TEST_CASE("manifest hash is stable and sensitive") {
  const RunManifest a = small_manifest(4);
  RunManifest b = a;
  CHECK(manifest_hash(a) == manifest_hash(b));
  b.mu = 2.0;
  CHECK(manifest_hash(a) != manifest_hash(b));
  // round-trip through JSON preserves the hash
  const RunManifest c = manifest_from_json(to_json(a));
  CHECK(manifest_hash(a) == manifest_hash(c));
}

TEST_CASE("outcome JSON round-trips scalars bit-exactly") {
  const RunManifest m = small_manifest(4);
  const RadialGrid g = build_grid(m.dim, m.radius, m.node_count);
  const ProblemParams p = params_of(m);
  const double S = sobolev_constant(4);
  const double l1 = smallest_eigenvalue(g);
  const double rb = rho(p, S, l1, ball_volume(4, 1.0));
  const SolveOutcome u0 = find_local_min(g, p, rb);

  const nlohmann::json j = outcome_json(u0, m);
  const nlohmann::json back = nlohmann::json::parse(j.dump());
  CHECK(back["energy"].get<double>() == u0.energy);
  CHECK(back["residual"].get<double>() == u0.residual);
  CHECK(back["norm"].get<double>() == u0.norm);
  CHECK(back["report"]["dirichlet"].get<double>() == u0.report.dirichlet);
  CHECK(back["report"]["log_term"].get<double>() == u0.report.log_term);
  CHECK(back["manifest_hash"].get<std::string>() == manifest_hash(m));
  CHECK(back["checks"]["energy_sign_ok"].get<bool>());
}

TEST_CASE("csv formats") {
  const RadialGrid g = build_grid(4, 1.0, 64);
  const RadialField u = RadialField::sample(g, [](double r) { return 1.0 - r * r; });
  const std::string csv = profile_csv(g, u);
  CHECK(csv.rfind("r,u\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 66);  // header + 65 nodes
  const std::string csv_h = profile_csv(g, u, "abc123");
  CHECK(csv_h.rfind("# manifest=abc123\nr,u\n", 0) == 0);

  BubbleSweep sweep;
  sweep.dim = 4;
  BubbleIntegrals rec;
  rec.eps = 0.01;
  rec.grad = 1.5;
  sweep.records.push_back(rec);
  const std::string scsv = sweep_csv(sweep);
  CHECK(scsv.rfind("eps,quantity,value\n", 0) == 0);
  CHECK(scsv.find("0.01") != std::string::npos);
  CHECK(scsv.find("grad") != std::string::npos);
}

TEST_CASE("svg output is deterministic and labeled") {
  const RadialGrid g = build_grid(4, 1.0, 64);
  const std::vector<RadialField> fields{RadialField::sample(g, [](double r) { return 1.0 - r * r; }),
                                        RadialField::sample(g, [](double r) { return r * (1.0 - r); })};
  const std::vector<std::string> labels{"local min", "mountain pass"};
  const std::string one = svg_profiles(g, fields, labels);
  const std::string two = svg_profiles(g, fields, labels);
  CHECK(one == two);
  CHECK(one.find("<svg") != std::string::npos);
  CHECK(one.find("polyline") != std::string::npos);
  CHECK(one.find(">r<") != std::string::npos);
  CHECK(one.find(">u<") != std::string::npos);
  CHECK(one.find("local min") != std::string::npos);
  CHECK(one.find("mountain pass") != std::string::npos);

  // single-hump path energies
  std::vector<double> energies;
  for (int i = 0; i <= 32; ++i) energies.push_back(-(i - 20) * (i - 20));
  const std::string path_svg = svg_path_energies(energies);
  CHECK(path_svg.find("J(gamma_j)") != std::string::npos);
  CHECK(svg_path_energies(energies) == path_svg);
}

TEST_CASE("atomic write replaces the target completely") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "bnlog_test_out";
  std::filesystem::create_directories(dir);
  const std::filesystem::path target = dir / "x.json";
  write_atomic(target, "first version\n");
  write_atomic(target, "second\n");
  std::ifstream in(target);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  CHECK_FALSE(std::filesystem::exists(dir / "x.json.tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify table passes end to end on a reduced manifest") {
  RunManifest m;
  m.dim = 4;
  m.node_count = 1024;
  m.path_points = 24;
  const VerifyResult r = run_verify(finalize(m), 20000);
  for (const auto& row : r.rows) {
    INFO(row.key, ": ", row.detail);
    CHECK(row.pass);
  }
  CHECK(r.all_pass);
  // keys present exactly once, keyed by the estimates they exercise
  const nlohmann::json j = verify_json(r, finalize(m));
  CHECK(j["checks"].contains("lemma_2_1"));
  CHECK(j["checks"].contains("lemma_3_4"));
  CHECK(j["checks"].contains("lemma_2_4"));
  CHECK(j["all_pass"].get<bool>());
}

TEST_CASE("verify table names the failing row for inadmissible parameters") {
  RunManifest m;
  m.dim = 4;
  m.node_count = 512;
  m.theta = -1e6;  // far outside A1 and A2
  const VerifyResult r = run_verify(finalize(m), 1000);
  CHECK_FALSE(r.all_pass);
  bool found = false;
  for (const auto& row : r.rows) {
    if (row.key == "region") {
      found = true;
      CHECK_FALSE(row.pass);
    }
  }
  CHECK(found);
}
