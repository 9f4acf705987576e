#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "warplab/curvature.hpp"
#include "warplab/ode.hpp"

namespace warplab {

inline constexpr int kConfigSchemaVersion = 1;

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"model", "green",   "hardy",  "hardy2", "embed",      "cz2",
                                              "cutoffs", "density", "ppp", "liyau",  "stochastic", "all"};
  return names;
}

// Keys of the on-disk form are the long flag names.
struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::string command = "all";

  int n = 3;
  std::string profile = "power";  ///< power | flat | iterated-log | tabulated
  double A = 1.0;
  double alpha = 1.0;
  double a = 1.0;                 ///< iterated-log scale
  int k = 1;                      ///< iterated-log depth
  double t_onset = 0.0;           ///< 0: twice the natural onset
  std::vector<std::pair<double, double>> table;  ///< (t, kappa) for tabulated
  double tmax = 40.0;
  double tol = 1e-10;
  std::string method = "radau5";

  std::vector<double> p{1.5, 2.0, 3.0};
  std::vector<double> beta;       ///< empty: {0, alpha/(alpha+2)}
  std::vector<double> eps{0.5, 1.0};
  std::uint64_t seed = 42;
  std::size_t count = 50;
  std::vector<double> R{8.0, 16.0, 32.0, 64.0};
  double tail_m = 6.0;
  double quad_tol = 1e-10;

  std::string out = "warplab-out";
  bool plot = false;
};

nlohmann::json to_json(const RunConfig& c);
/// Overwrites the fields present in j. Unknown keys, wrong types and a
/// foreign schema_version raise ConfigurationError.
void merge_config(RunConfig& c, const nlohmann::json& j);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Checks ranges and the command name; ConfigurationError otherwise.
void validate(const RunConfig& c);

CurvatureProfile make_profile(const RunConfig& c);
ode::Method parse_method(const std::string& s);
std::vector<double> beta_list(const RunConfig& c);

/// FNV-1a over the canonical dump without the output keys (out, plot).
std::uint64_t config_hash(const RunConfig& c);
std::string hex64(std::uint64_t h);
std::uint64_t fnv1a(const std::string& s);

}  // namespace warplab
