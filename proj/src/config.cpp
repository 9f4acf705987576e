#include "warplab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "warplab/errors.hpp"

namespace warplab {

using nlohmann::json;

json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["command"] = c.command;
  j["n"] = c.n;
  j["profile"] = c.profile;
  j["A"] = c.A;
  j["alpha"] = c.alpha;
  j["a"] = c.a;
  j["k"] = c.k;
  j["t_onset"] = c.t_onset;
  j["table"] = json::array();
  for (const auto& [t, kappa] : c.table) j["table"].push_back({t, kappa});
  j["tmax"] = c.tmax;
  j["tol"] = c.tol;
  j["method"] = c.method;
  j["p"] = c.p;
  j["beta"] = c.beta;
  j["eps"] = c.eps;
  j["seed"] = c.seed;
  j["count"] = c.count;
  j["R"] = c.R;
  j["tail_m"] = c.tail_m;
  j["quad_tol"] = c.quad_tol;
  j["out"] = c.out;
  j["plot"] = c.plot;
  return j;
}

namespace {

template <class T>
void take(const json& j, const char* key, T& dst) {
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

// scalars are accepted where a list is expected
void take_list(const json& j, const char* key, std::vector<double>& dst) {
  const json& v = j.at(key);
  if (v.is_number()) {
    dst = {v.get<double>()};
    return;
  }
  take(j, key, dst);
}

}  // namespace

void merge_config(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigurationError("config: top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "schema_version") {
      int v = 0;
      take(j, "schema_version", v);
      if (v != kConfigSchemaVersion)
        throw ConfigurationError("config: unsupported schema_version " + std::to_string(v));
      c.schema_version = v;
    } else if (key == "command") take(j, "command", c.command);
    else if (key == "n") take(j, "n", c.n);
    else if (key == "profile") take(j, "profile", c.profile);
    else if (key == "A") take(j, "A", c.A);
    else if (key == "alpha") take(j, "alpha", c.alpha);
    else if (key == "a") take(j, "a", c.a);
    else if (key == "k") take(j, "k", c.k);
    else if (key == "t_onset") take(j, "t_onset", c.t_onset);
    else if (key == "table") {
      std::vector<std::vector<double>> rows;
      take(j, "table", rows);
      c.table.clear();
      for (const auto& r : rows) {
        if (r.size() != 2) throw ConfigurationError("config: table rows are [t, kappa] pairs");
        c.table.emplace_back(r[0], r[1]);
      }
    } else if (key == "tmax") take(j, "tmax", c.tmax);
    else if (key == "tol") take(j, "tol", c.tol);
    else if (key == "method") take(j, "method", c.method);
    else if (key == "p") take_list(j, "p", c.p);
    else if (key == "beta") take_list(j, "beta", c.beta);
    else if (key == "eps") take_list(j, "eps", c.eps);
    else if (key == "seed") take(j, "seed", c.seed);
    else if (key == "count") take(j, "count", c.count);
    else if (key == "R") take_list(j, "R", c.R);
    else if (key == "tail_m") take(j, "tail_m", c.tail_m);
    else if (key == "quad_tol") take(j, "quad_tol", c.quad_tol);
    else if (key == "out") take(j, "out", c.out);
    else if (key == "plot") take(j, "plot", c.plot);
    else throw ConfigurationError("config: unknown key '" + key + "'");
  }
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  merge_config(c, j);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config: " + path + ": " + e.what());
  }
  return config_from_json(j);
}

void validate(const RunConfig& c) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), c.command) == names.end())
    throw ConfigurationError("config: unknown command '" + c.command + "'");
  if (c.n < 2) throw ConfigurationError("config: n must be >= 2");
  if (!(c.tmax > 1.0)) throw ConfigurationError("config: tmax must exceed 1");
  if (!(c.tol > 1e-14 && c.tol < 1e-4)) throw ConfigurationError("config: tol must lie in (1e-14, 1e-4)");
  parse_method(c.method);
  make_profile(c);
  if (c.p.empty()) throw ConfigurationError("config: p list is empty");
  for (double p : c.p)
    if (!(p > 1.0)) throw ConfigurationError("config: every p must exceed 1");
  for (double b : c.beta)
    if (!(b >= 0.0)) throw ConfigurationError("config: beta must be non-negative");
  for (double e : c.eps)
    if (!(e > 0.0)) throw ConfigurationError("config: eps must be positive");
  if (c.R.empty()) throw ConfigurationError("config: R sweep is empty");
  for (std::size_t i = 0; i < c.R.size(); ++i)
    if (!(c.R[i] > 0.0) || (i > 0 && !(c.R[i] > c.R[i - 1])))
      throw ConfigurationError("config: R sweep must be positive and increasing");
  if (!(c.quad_tol > 0.0 && c.quad_tol < 1e-2)) throw ConfigurationError("config: quad_tol out of range");
  if (!(c.tail_m > 0.0)) throw ConfigurationError("config: tail_m must be positive");
}

CurvatureProfile make_profile(const RunConfig& c) {
  if (c.profile == "power") return CurvatureProfile::power_law(c.A, c.alpha);
  if (c.profile == "flat") return CurvatureProfile::flat();
  if (c.profile == "iterated-log") {
    const double onset = c.t_onset > 0.0 ? c.t_onset : 2.0 * std::max(1.0, iterated_log_onset(c.k));
    return CurvatureProfile::iterated_log(c.a, c.k, onset);
  }
  if (c.profile == "tabulated") {
    std::vector<double> t, kappa;
    for (const auto& [x, y] : c.table) {
      t.push_back(x);
      kappa.push_back(y);
    }
    return CurvatureProfile::tabulated(std::move(t), std::move(kappa));
  }
  throw ConfigurationError("config: unknown profile '" + c.profile + "'");
}

ode::Method parse_method(const std::string& s) {
  if (s == "radau5") return ode::Method::radau5;
  if (s == "dopri5") return ode::Method::dopri5;
  throw ConfigurationError("config: unknown method '" + s + "'");
}

std::vector<double> beta_list(const RunConfig& c) {
  if (!c.beta.empty()) return c.beta;
  if (c.profile == "power" && c.alpha > 0.0) return {0.0, c.alpha / (c.alpha + 2.0)};
  return {0.0};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t config_hash(const RunConfig& c) {
  json j = to_json(c);
  j.erase("out");
  j.erase("plot");
  return fnv1a(j.dump());
}

}  // namespace warplab
