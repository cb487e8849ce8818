#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <json.hpp>

#include "bnlog/bubble.hpp"
#include "bnlog/functional.hpp"

namespace bnlog {

/// Everything a run needs, embedded in every output for reproducibility.
struct RunManifest {
  int dim = 4;
  double radius = 1.0;
  int node_count = 4096;
  double lambda = std::numeric_limits<double>::quiet_NaN();  // NaN = per-dimension default
  double mu = 1.0;
  double theta = std::numeric_limits<double>::quiet_NaN();  // NaN = per-dimension default
  double rho_override = 0.0;  // 0 = derive rho from the admissible region
  double cutoff_radius = 0.2;
  double eps_from = 0.0;  // 0 = cutoff_radius / 16
  double eps_to = 0.0;    // 0 = cutoff_radius / 4096
  int eps_count = 8;
  double delta = 0.0;  // 0 = per-dimension default
  double tol_min = 1e-8;
  double tol_mp = 1e-6;
  int path_points = 64;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool svg = false;
};

/// Default theta per dimension: chosen so the local minimum has enough
/// amplitude for the cross terms driving the energy-gap margins to be
/// numerically visible, while staying inside A2 (N = 4) resp. A4 (N = 3, 5).
/// The gap margins scale like u_0(0) ~ e^{-lambda_1/(2|theta|)}, so weakly
/// negative theta pushes the asymptotic regime below desk scale.
inline double default_theta(int dim) {
  switch (dim) {
    case 3: return -1.8;
    case 4: return -5.0;
    case 5: return -0.5;
    default: require_dim(dim); return 0.0;
  }
}

/// Default lambda per dimension.  For N = 5 the linear term carries the
/// compactness margin (the 2-norm of the bubble scales like eps^2 there), so
/// the default sits well inside (0, lambda_1); for N = 3, 4 the logarithmic
/// term alone suffices and lambda stays 0.
inline double default_lambda(int dim) {
  switch (dim) {
    case 3: return 0.0;
    case 4: return 0.0;
    case 5: return 15.0;
    default: require_dim(dim); return 0.0;
  }
}

inline RunManifest finalize(RunManifest m) {
  require_dim(m.dim);
  if (std::isnan(m.lambda)) m.lambda = default_lambda(m.dim);
  if (std::isnan(m.theta)) m.theta = default_theta(m.dim);
  if (m.delta == 0.0) m.delta = default_delta(m.dim);
  if (m.eps_from == 0.0) m.eps_from = m.cutoff_radius / 16.0;
  if (m.eps_to == 0.0) m.eps_to = m.cutoff_radius / 4096.0;
  make_params(m.lambda, m.mu, m.theta, m.dim);  // validates mu > 0, theta < 0
  if (!(m.radius > 0.0)) throw std::invalid_argument("manifest: radius must be positive");
  if (m.node_count < 16) throw std::invalid_argument("manifest: node_count too small");
  if (m.eps_count < 2) throw std::invalid_argument("manifest: eps_count too small");
  return m;
}

inline ProblemParams params_of(const RunManifest& m) {
  return make_params(m.lambda, m.mu, m.theta, m.dim);
}

inline nlohmann::json to_json(const RunManifest& m) {
  return nlohmann::json{{"dim", m.dim},
                        {"radius", m.radius},
                        {"node_count", m.node_count},
                        {"lambda", m.lambda},
                        {"mu", m.mu},
                        {"theta", m.theta},
                        {"rho_override", m.rho_override},
                        {"cutoff_radius", m.cutoff_radius},
                        {"eps_from", m.eps_from},
                        {"eps_to", m.eps_to},
                        {"eps_count", m.eps_count},
                        {"delta", m.delta},
                        {"tol_min", m.tol_min},
                        {"tol_mp", m.tol_mp},
                        {"path_points", m.path_points},
                        {"seed", m.seed}};
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.dim = j.at("dim").get<int>();
  m.radius = j.at("radius").get<double>();
  m.node_count = j.at("node_count").get<int>();
  m.lambda = j.at("lambda").get<double>();
  m.mu = j.at("mu").get<double>();
  m.theta = j.at("theta").get<double>();
  m.rho_override = j.at("rho_override").get<double>();
  m.cutoff_radius = j.at("cutoff_radius").get<double>();
  m.eps_from = j.at("eps_from").get<double>();
  m.eps_to = j.at("eps_to").get<double>();
  m.eps_count = j.at("eps_count").get<int>();
  m.delta = j.at("delta").get<double>();
  m.tol_min = j.at("tol_min").get<double>();
  m.tol_mp = j.at("tol_mp").get<double>();
  m.path_points = j.at("path_points").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  return m;
}

/// FNV-1a over the canonical JSON dump.
inline std::string manifest_hash(const RunManifest& m) {
  const std::string dump = to_json(m).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace bnlog
