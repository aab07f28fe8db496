#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "harness/experiments.hpp"
#include "harness/zoo.hpp"
#include "numerics/errors.hpp"

using namespace adiaband;
using nlohmann::json;

namespace {

const std::vector<double> kEpsilons{0.1, 0.05, 0.025, 0.0125};

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("adiaband_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json semiclassical_doc(const std::string& out) {
  return json{{"experiment", "semiclassical"},
              {"model", {{"name", "quadratic-band"}, {"parameters", {{"mass", 1.3}, {"charge", 0.9}}}}},
              {"grid", {{"periods", 4}, {"steps_per_period", 1000}}},
              {"output_dir", out},
              {"seed", 7}};
}

}  // namespace

TEST_CASE("fit_order: exact power law, constant errors, seeded noise") {
  std::vector<double> sq;
  for (double e : kEpsilons) sq.push_back(3.0 * e * e);
  const auto f = fit_order(kEpsilons, sq);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> flat(4, 0.3);
  CHECK(std::abs(fit_order(kEpsilons, flat).slope) <= 1e-12);

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::vector<double> noisy;
  for (double e : kEpsilons) noisy.push_back(std::pow(e, 1.5) * (1.0 + 0.01 * noise(rng)));
  const double slope = fit_order(kEpsilons, noisy).slope;
  CHECK(slope >= 1.4);
  CHECK(slope <= 1.6);

  CHECK_THROWS_AS(fit_order(std::vector<double>{0.1, 0.05, 0.025}, std::vector<double>{1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(fit_order(kEpsilons, std::vector<double>{1, 0, 1, 1}), NumericalError);
}

TEST_CASE("config: defaults are materialized and echoed") {
  const auto c = parse_config(json{{"experiment", "bo"}});
  CHECK(c.model == "two-channel-bo");
  CHECK(c.epsilons == kEpsilons);
  CHECK(c.parameter("a") == 1.0);
  CHECK(c.parameter("b") == 0.5);
  const json r = c.resolved();
  CHECK(r.at("grid").at("points") == 512);
  CHECK(r.at("orders").at("pairs").size() == 2);
  CHECK(parse_config(r).resolved() == r);
  CHECK(c.hash() == parse_config(r).hash());
  CHECK(c.hash().size() == 16);
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("config: schema violations are validation errors") {
  CHECK_THROWS_AS(parse_config(json{{"model", "landau-zener"}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"experiment", "nope"}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"experiment", "bo"}, {"colour", 1}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"experiment", "bo"}, {"model", "landau-zener"}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"experiment", "bo"}, {"model", "missing"}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"experiment", "bo"}, {"epsilons", {0.1, 0.05, 0.025}}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"experiment", "bo"}, {"epsilons", {0.1, 0.05, 0.05, 0.01}}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"experiment", "bo"}, {"grid", {{"points", 500}}}}), ValidationError);
  CHECK_THROWS_AS(
      parse_config(json{{"experiment", "bo"}, {"model", {{"name", "two-channel-bo"}, {"parameters", {{"z", 1}}}}}}),
      ValidationError);
  CHECK_THROWS_AS(parse_config_text("{not json"), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("model zoo: unique names with defaults") {
  std::set<std::string> names;
  for (const auto& m : model_zoo()) {
    CHECK(names.insert(m.name).second);
    CHECK(&find_model(m.name) == &m);
    CHECK(m.defaults.is_object());
  }
  CHECK(names.size() == 8);
  CHECK_THROWS_AS(find_model("unknown"), ValidationError);
}

TEST_CASE("outputs: empty metrics, row counts, exact CSV round trip") {
  SweepResult empty;
  empty.config = parse_config(json{{"experiment", "weyl-check"}});
  empty.config_hash = empty.config.hash();
  CHECK(results_csv(empty) == "epsilon,metric,value\n");
  const auto dir = scratch_dir("empty");
  emit_outputs(empty, dir.string());
  CHECK(read_file(dir / "results.csv") == "epsilon,metric,value\n");
  const json summary = json::parse(read_file(dir / "summary.json"));
  CHECK(summary.at("metrics").empty());
  CHECK(summary.at("config") == empty.config.resolved());

  SweepResult one = empty;
  MetricSeries m;
  m.name = "error";
  m.values = {0.1 / 3.0, 1e-300, 2.5e-7, std::nextafter(1.0, 2.0)};
  one.metrics.push_back(m);
  const std::string csv = results_csv(one);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  std::vector<double> eps;
  const auto back = parse_results_csv(csv, eps);
  REQUIRE(back.size() == 1);
  CHECK(back[0].name == "error");
  CHECK(eps == one.config.epsilons);
  for (std::size_t i = 0; i < 4; ++i) CHECK(back[0].values[i] == m.values[i]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run_experiment: deterministic CSV bytes, independent of job count, confined to its directory") {
  const auto a = scratch_dir("det_a");
  const auto b = scratch_dir("det_b");
  const auto ra = run_experiment(parse_config(semiclassical_doc(a.string())), 1);
  const auto rb = run_experiment(parse_config(semiclassical_doc(b.string())), 3);
  CHECK(read_file(a / "results.csv") == read_file(b / "results.csv"));
  std::set<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(a)) files.insert(e.path().filename().string());
  CHECK(files == std::set<std::string>{"plot.gp", "results.csv", "summary.json"});
  const auto& g = ra.metric("g_factor");
  for (double v : g.values) CHECK(std::abs(v - 2.0) <= 1e-5);
  CHECK(ra.metric("omega_cyclotron").fit.slope == doctest::Approx(1.0).epsilon(1e-6));
  for (double v : ra.metric("trajectory_identity").values) CHECK(v == 1.0);
  for (double v : ra.metric("energy_drift").values) CHECK(v <= 1e-8);
  CHECK(read_file(a / "plot.gp").find("results.csv") != std::string::npos);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST_CASE("run_sweep: Landau-Zener bare leakage is first order") {
  const auto r = run_sweep(parse_config(json{{"experiment", "time-adiabatic"},
                                             {"orders", {{"projector", {0}}, {"pairs", json::array()}}}}));
  REQUIRE(r.metrics.size() == 1);
  CHECK(r.metrics[0].name == "leakage_order0");
  CHECK(r.metrics[0].fit.slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("run_sweep: weyl-check reports the Moyal defect table") {
  const auto r = run_sweep(parse_config(json{{"experiment", "weyl-check"}, {"grid", {{"points", 64}}}}));
  for (const char* name : {"moyal_q2_p2", "moyal_sinq_p", "moyal_sinq_cosp"}) CHECK(r.metric(name).fitted);
  CHECK(!r.metric("position_error").fitted);
  for (double v : r.metric("position_error").values) CHECK(v <= 1e-10);
}

TEST_CASE("run_sweep: model errors carry the sweep point") {
  auto c = parse_config(json{{"experiment", "bo"}, {"initial_state", {{"center", 7.0}}}, {"grid", {{"points", 128}}}});
  try {
    run_sweep(c);
    FAIL("expected a boundary failure");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("epsilon 0.1") != std::string::npos);
  }
}
