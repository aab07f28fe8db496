#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace adiaband {

enum class ModelKind { kTimeFamily, kBOPotential, kPhaseSpace, kField };

const char* to_string(ModelKind kind);

struct ModelInfo {
  std::string name;
  ModelKind kind;
  std::string description;
  nlohmann::json defaults;  // parameter object
};

const std::vector<ModelInfo>& model_zoo();
// Throws ValidationError for unknown names.
const ModelInfo& find_model(const std::string& name);

}  // namespace adiaband
