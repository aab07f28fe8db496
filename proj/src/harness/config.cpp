#include "harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "harness/zoo.hpp"
#include "numerics/errors.hpp"

namespace adiaband {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, const char*>> kKinds{
    {ExperimentKind::kTimeAdiabatic, "time-adiabatic"},
    {ExperimentKind::kSpaceAdiabatic, "space-adiabatic"},
    {ExperimentKind::kBO, "bo"},
    {ExperimentKind::kWeylCheck, "weyl-check"},
    {ExperimentKind::kSemiclassical, "semiclassical"},
};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key)) throw ValidationError("unknown key '" + key + "' in " + where);
}

double get_number(const json& obj, const std::string& key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(where + "." + key + " must be finite");
  return x;
}

int get_int(const json& obj, const std::string& key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(where + "." + key + " must be an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ValidationError(where + "." + key + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& fallback,
                       const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ValidationError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

void apply_kind_defaults(ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::kTimeAdiabatic:
      c.model = "landau-zener";
      c.projector_orders = {0, 1, 2};
      c.order_pairs = {{1, 0}, {2, 1}};
      break;
    case ExperimentKind::kBO:
      c.model = "two-channel-bo";
      c.order_pairs = {{2, 1}, {1, 0}};
      break;
    case ExperimentKind::kSpaceAdiabatic:
      c.model = "torus";
      c.grid.length = 4 * std::numbers::pi;
      c.grid.points = 256;
      c.packet = {0.0, 0.5, 1.0};
      break;
    case ExperimentKind::kWeylCheck:
      c.model = "none";
      c.grid.length = 40.0;
      c.grid.points = 256;
      break;
    case ExperimentKind::kSemiclassical:
      c.model = "quadratic-band";
      c.packet = {0.0, 1.0, 1.0};
      break;
  }
}

bool model_fits(ExperimentKind kind, ModelKind model) {
  switch (kind) {
    case ExperimentKind::kTimeAdiabatic:
      return model == ModelKind::kTimeFamily;
    case ExperimentKind::kBO:
      return model == ModelKind::kBOPotential;
    case ExperimentKind::kSpaceAdiabatic:
      return model == ModelKind::kPhaseSpace || model == ModelKind::kBOPotential;
    case ExperimentKind::kSemiclassical:
      return model == ModelKind::kField;
    case ExperimentKind::kWeylCheck:
      return false;
  }
  return false;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKinds)
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& [k, n] : kKinds)
    if (name == n) return k;
  throw ValidationError("unknown experiment kind '" + name + "'");
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

json ExperimentConfig::resolved() const {
  json pairs = json::array();
  for (const auto& [e, u] : order_pairs) pairs.push_back({e, u});
  return json{
      {"experiment", to_string(kind)},
      {"model", {{"name", model}, {"parameters", parameters}}},
      {"epsilons", epsilons},
      {"orders", {{"projector", projector_orders}, {"pairs", pairs}}},
      {"gauge", {{"policy", gauge.policy}, {"twist", gauge.twist}}},
      {"grid",
       {{"length", grid.length},
        {"points", grid.points},
        {"dt", grid.dt},
        {"t_final", grid.t_final},
        {"t0", grid.t0},
        {"t1", grid.t1},
        {"samples", grid.samples},
        {"time_points", grid.time_points},
        {"verify_by_halving", grid.verify_by_halving},
        {"periods", grid.periods},
        {"steps_per_period", grid.steps_per_period}}},
      {"initial_state", {{"center", packet.center}, {"momentum", packet.momentum}, {"width", packet.width}}},
      {"tolerances",
       {{"relative", tolerances.relative},
        {"absolute", tolerances.absolute},
        {"halving", tolerances.halving},
        {"boundary", tolerances.boundary}}},
      {"output_dir", output_dir},
      {"seed", seed},
  };
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(resolved().dump())));
  return buf;
}

double ExperimentConfig::parameter(const std::string& key) const {
  if (!parameters.contains(key)) throw ValidationError("model parameter '" + key + "' is missing");
  return parameters.at(key).get<double>();
}

ExperimentConfig parse_config(const json& doc) {
  reject_unknown(doc, {"experiment", "model", "epsilons", "orders", "gauge", "grid", "initial_state",
                       "tolerances", "output_dir", "seed"},
                 "config");
  if (!doc.contains("experiment")) throw ValidationError("config.experiment is required");
  ExperimentConfig c;
  c.kind = parse_experiment_kind(get_string(doc, "experiment", "", "config"));
  apply_kind_defaults(c);

  json params = json::object();
  if (doc.contains("model")) {
    const auto& m = doc.at("model");
    if (m.is_string()) {
      c.model = m.get<std::string>();
    } else {
      reject_unknown(m, {"name", "parameters"}, "model");
      c.model = get_string(m, "name", c.model, "model");
      if (m.contains("parameters")) params = m.at("parameters");
    }
  }
  if (c.kind == ExperimentKind::kWeylCheck) {
    if (c.model != "none") throw ValidationError("weyl-check takes no model");
    if (!params.empty()) throw ValidationError("weyl-check takes no model parameters");
    c.parameters = json::object();
  } else {
    const auto& info = find_model(c.model);
    if (!model_fits(c.kind, info.kind))
      throw ValidationError("model '" + c.model + "' (" + to_string(info.kind) + ") does not fit experiment '" +
                            to_string(c.kind) + "'");
    c.parameters = info.defaults;
    std::set<std::string> allowed;
    for (const auto& [k, v] : info.defaults.items()) allowed.insert(k);
    reject_unknown(params, allowed, "model.parameters");
    for (const auto& [k, v] : params.items()) c.parameters[k] = get_number(params, k, 0.0, "model.parameters");
  }

  c.epsilons = {0.1, 0.05, 0.025, 0.0125};
  if (doc.contains("epsilons")) {
    const auto& e = doc.at("epsilons");
    if (!e.is_array()) throw ValidationError("config.epsilons must be an array");
    c.epsilons.clear();
    for (const auto& v : e) {
      if (!v.is_number()) throw ValidationError("config.epsilons must hold numbers");
      c.epsilons.push_back(v.get<double>());
    }
  }
  if (c.epsilons.size() < 4) throw ValidationError("config.epsilons needs at least four values");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    if (!(c.epsilons[i] > 0.0) || !std::isfinite(c.epsilons[i]))
      throw ValidationError("config.epsilons must be positive and finite");
    if (i > 0 && !(c.epsilons[i] < c.epsilons[i - 1]))
      throw ValidationError("config.epsilons must be strictly decreasing");
  }

  if (doc.contains("orders")) {
    const auto& o = doc.at("orders");
    reject_unknown(o, {"projector", "pairs"}, "orders");
    if (o.contains("projector")) {
      c.projector_orders.clear();
      if (!o.at("projector").is_array()) throw ValidationError("orders.projector must be an array");
      for (const auto& v : o.at("projector")) {
        if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 2)
          throw ValidationError("orders.projector entries must be 0, 1 or 2");
        c.projector_orders.push_back(v.get<int>());
      }
    }
    if (o.contains("pairs")) {
      c.order_pairs.clear();
      if (!o.at("pairs").is_array()) throw ValidationError("orders.pairs must be an array");
      for (const auto& v : o.at("pairs")) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
          throw ValidationError("orders.pairs entries must be [effective, intertwiner]");
        const int e = v[0].get<int>(), u = v[1].get<int>();
        if (e < 0 || e > 2 || u < 0 || u > 1)
          throw ValidationError("orders.pairs: effective order in 0..2, intertwiner order in 0..1");
        c.order_pairs.emplace_back(e, u);
      }
    }
  }

  if (doc.contains("gauge")) {
    const auto& g = doc.at("gauge");
    reject_unknown(g, {"policy", "twist"}, "gauge");
    c.gauge.policy = get_string(g, "policy", c.gauge.policy, "gauge");
    c.gauge.twist = get_number(g, "twist", c.gauge.twist, "gauge");
  }
  if (c.gauge.policy != "parallel-transport" && c.gauge.policy != "reference")
    throw ValidationError("gauge.policy must be 'parallel-transport' or 'reference'");

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    reject_unknown(g, {"length", "points", "dt", "t_final", "t0", "t1", "samples", "time_points", "verify_by_halving", "periods",
                       "steps_per_period"},
                   "grid");
    c.grid.length = get_number(g, "length", c.grid.length, "grid");
    c.grid.points = get_int(g, "points", c.grid.points, "grid");
    c.grid.dt = get_number(g, "dt", c.grid.dt, "grid");
    c.grid.t_final = get_number(g, "t_final", c.grid.t_final, "grid");
    c.grid.t0 = get_number(g, "t0", c.grid.t0, "grid");
    c.grid.t1 = get_number(g, "t1", c.grid.t1, "grid");
    c.grid.samples = get_int(g, "samples", c.grid.samples, "grid");
    c.grid.time_points = get_int(g, "time_points", c.grid.time_points, "grid");
    c.grid.verify_by_halving = get_bool(g, "verify_by_halving", c.grid.verify_by_halving, "grid");
    c.grid.periods = get_int(g, "periods", c.grid.periods, "grid");
    c.grid.steps_per_period = get_int(g, "steps_per_period", c.grid.steps_per_period, "grid");
  }
  if (!(c.grid.length > 0.0)) throw ValidationError("grid.length must be positive");
  if (c.grid.points < 4 || (c.grid.points & (c.grid.points - 1)) != 0)
    throw ValidationError("grid.points must be a power of two, at least 4");
  if (!(c.grid.dt > 0.0) || !(c.grid.t_final > 0.0)) throw ValidationError("grid.dt and grid.t_final must be positive");
  if (!(c.grid.t1 > c.grid.t0)) throw ValidationError("grid.t1 must exceed grid.t0");
  if (c.grid.samples < 11) throw ValidationError("grid.samples must be at least 11");
  if (c.grid.time_points < 2) throw ValidationError("grid.time_points must be at least 2");
  if (c.grid.periods < 3) throw ValidationError("grid.periods must be at least 3");
  if (c.grid.steps_per_period < 16) throw ValidationError("grid.steps_per_period must be at least 16");

  if (doc.contains("initial_state")) {
    const auto& s = doc.at("initial_state");
    reject_unknown(s, {"center", "momentum", "width"}, "initial_state");
    c.packet.center = get_number(s, "center", c.packet.center, "initial_state");
    c.packet.momentum = get_number(s, "momentum", c.packet.momentum, "initial_state");
    c.packet.width = get_number(s, "width", c.packet.width, "initial_state");
  }
  if (!(c.packet.width > 0.0)) throw ValidationError("initial_state.width must be positive");

  if (doc.contains("tolerances")) {
    const auto& t = doc.at("tolerances");
    reject_unknown(t, {"relative", "absolute", "halving", "boundary"}, "tolerances");
    c.tolerances.relative = get_number(t, "relative", c.tolerances.relative, "tolerances");
    c.tolerances.absolute = get_number(t, "absolute", c.tolerances.absolute, "tolerances");
    c.tolerances.halving = get_number(t, "halving", c.tolerances.halving, "tolerances");
    c.tolerances.boundary = get_number(t, "boundary", c.tolerances.boundary, "tolerances");
  }
  if (!(c.tolerances.relative > 0.0) || !(c.tolerances.absolute > 0.0) || !(c.tolerances.halving > 0.0) ||
      !(c.tolerances.boundary > 0.0))
    throw ValidationError("tolerances must be positive");

  c.output_dir = get_string(doc, "output_dir", c.output_dir, "config");
  if (c.output_dir.empty()) throw ValidationError("config.output_dir must not be empty");
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ValidationError("config.seed must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace adiaband
