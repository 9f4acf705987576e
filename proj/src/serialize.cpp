#include "warplab/serialize.hpp"

#include <cmath>

#include "warplab/errors.hpp"

namespace warplab {

using nlohmann::json;

json profile_to_json(const CurvatureProfile& profile) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PowerLaw>) return {{"kind", "power"}, {"A", k.A}, {"alpha", k.alpha}};
        else if constexpr (std::is_same_v<K, IteratedLog>)
          return {{"kind", "iterated-log"}, {"a", k.a}, {"k", k.k}, {"t_onset", k.t_onset}};
        else if constexpr (std::is_same_v<K, Flat>) return {{"kind", "flat"}};
        else return {{"kind", "tabulated"}, {"t", k.t}, {"kappa", k.kappa}};
      },
      profile.kind());
}

CurvatureProfile profile_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "power") return CurvatureProfile::power_law(j.at("A").get<double>(), j.at("alpha").get<double>());
    if (kind == "flat") return CurvatureProfile::flat();
    if (kind == "iterated-log")
      return CurvatureProfile::iterated_log(j.at("a").get<double>(), j.at("k").get<int>(),
                                            j.at("t_onset").get<double>());
    if (kind == "tabulated")
      return CurvatureProfile::tabulated(j.at("t").get<std::vector<double>>(),
                                         j.at("kappa").get<std::vector<double>>());
    throw ConfigurationError("profile: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("profile: ") + e.what());
  }
}

json model_to_json(const ModelManifold& M) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["n"] = M.n();
  j["profile"] = profile_to_json(M.profile());
  j["tol"] = M.tol();
  j["method"] = ode::method_name(M.method());
  j["t"] = M.nodes();
  j["w"] = M.w_nodes();
  j["logj"] = M.logj_nodes();
  j["y"] = M.y_nodes();
  return j;
}

ModelManifold model_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion)
      throw ConfigurationError("model json: unsupported schema_version");
    const auto method = j.at("method").get<std::string>();
    ode::Method m;
    if (method == ode::method_name(ode::Method::radau5)) m = ode::Method::radau5;
    else if (method == ode::method_name(ode::Method::dopri5)) m = ode::Method::dopri5;
    else throw ConfigurationError("model json: unknown method '" + method + "'");
    return ModelManifold(j.at("n").get<int>(), profile_from_json(j.at("profile")), j.at("tol").get<double>(), m,
                         j.at("t").get<std::vector<double>>(), j.at("w").get<std::vector<double>>(),
                         j.at("logj").get<std::vector<double>>(), j.at("y").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("model json: ") + e.what());
  }
}

json green_to_json(const GreenFunction& G) {
  json j;
  j["p"] = G.p();
  j["seed_t"] = G.seed_t();
  if (std::isfinite(G.r_K())) j["r_K"] = G.r_K();
  else j["r_K"] = nullptr;
  j["t"] = G.nodes();
  j["z"] = G.z_nodes();
  return j;
}

GreenFunction green_from_json(std::shared_ptr<const ModelManifold> M, const json& j) {
  try {
    return GreenFunction(std::move(M), j.at("p").get<double>(), j.at("seed_t").get<double>(),
                         j.at("t").get<std::vector<double>>(), j.at("z").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("green json: ") + e.what());
  }
}

}  // namespace warplab
