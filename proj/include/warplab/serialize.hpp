#pragma once

#include <memory>

#include <json.hpp>

#include "warplab/curvature.hpp"
#include "warplab/geometry.hpp"
#include "warplab/green.hpp"

namespace warplab {

inline constexpr int kModelSchemaVersion = 1;

nlohmann::json profile_to_json(const CurvatureProfile& profile);
CurvatureProfile profile_from_json(const nlohmann::json& j);

/// {"schema_version", "n", "profile", "tol", "method", "t", "w", "logj", "y"}
nlohmann::json model_to_json(const ModelManifold& M);
ModelManifold model_from_json(const nlohmann::json& j);

/// {"p", "seed_t", "r_K", "t", "z"}; the model is stored separately.
nlohmann::json green_to_json(const GreenFunction& G);
GreenFunction green_from_json(std::shared_ptr<const ModelManifold> M, const nlohmann::json& j);

}  // namespace warplab
