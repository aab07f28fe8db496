#include "harness/zoo.hpp"

#include <numbers>

#include "numerics/errors.hpp"

namespace adiaband {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTimeFamily:
      return "time-family";
    case ModelKind::kBOPotential:
      return "bo-potential";
    case ModelKind::kPhaseSpace:
      return "phase-space";
    case ModelKind::kField:
      return "field";
  }
  return "unknown";
}

const std::vector<ModelInfo>& model_zoo() {
  using nlohmann::json;
  static const std::vector<ModelInfo> zoo{
      {"landau-zener", ModelKind::kTimeFamily, "(tanh(t) sz + delta sx)/2, lower band",
       json{{"delta", 0.5}}},
      {"rotating-field", ModelKind::kTimeFamily,
       "(delta/2) n(t).sigma, n at polar angle theta rotating at omega, upper band",
       json{{"delta", 1.0}, {"theta", std::numbers::pi / 3}, {"omega", 1.0}}},
      {"quadrupole-spin", ModelKind::kTimeFamily,
       "spin-3/2 (n(t).S)^2 with n rotating at omega, degenerate lower doublet",
       json{{"theta", 0.7}, {"omega", 1.0}}},
      {"two-channel-bo", ModelKind::kBOPotential, "V(q) = a tanh(q) sz + b sx + c, lower band",
       json{{"a", 1.0}, {"b", 0.5}, {"c", 0.0}}},
      {"winding-bo", ModelKind::kBOPotential,
       "V(q) = r(cos kq sx + sin kq sy) + h sz, upper band, complex eigenvectors",
       json{{"r", 1.0}, {"h", 0.6}, {"k", 1.0}}},
      {"torus", ModelKind::kPhaseSpace, "cos q sz + sin p sx + 0.5 sy + 0.3 sin(q+p), lower band",
       json::object()},
      {"quadratic-band", ModelKind::kField, "E0 = p^2/(2m) in a uniform field, spin moment e hbar/(2mc)",
       json{{"mass", 1.0}, {"field", 1.0}, {"charge", 1.0}, {"c", 1.0}, {"hbar", 1.0}}},
      {"relativistic-band", ModelKind::kField,
       "E0 = sqrt(m^2c^4 + c^2p^2) in a uniform field, spin moment e hbar/(2mc)",
       json{{"mass", 1.0}, {"field", 1.0}, {"charge", 1.0}, {"c", 1.0}, {"hbar", 1.0}}},
  };
  return zoo;
}

const ModelInfo& find_model(const std::string& name) {
  for (const auto& m : model_zoo())
    if (m.name == name) return m;
  throw ValidationError("unknown model '" + name + "'");
}

}  // namespace adiaband
