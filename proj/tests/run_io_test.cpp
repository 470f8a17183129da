#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "nevo/run_io.hpp"

using namespace nevo;

TEST_CASE("evaluator spec parsing") {
  CHECK(EvaluatorSpec::parse("synthetic").kind == EvaluatorSpec::Kind::Synthetic);

  const EvaluatorSpec lookup = EvaluatorSpec::parse("lookup:/tmp/table.json");
  CHECK(lookup.kind == EvaluatorSpec::Kind::Lookup);
  CHECK(lookup.lookup_path == "/tmp/table.json");

  const EvaluatorSpec bridge = EvaluatorSpec::parse("bridge:python3 train.py --fast");
  CHECK(bridge.kind == EvaluatorSpec::Kind::Bridge);
  CHECK(bridge.bridge_command ==
        std::vector<std::string>{"python3", "train.py", "--fast"});
  CHECK(bridge.to_string() == "bridge:python3 train.py --fast");

  CHECK_THROWS_AS(EvaluatorSpec::parse("grid"), std::invalid_argument);
  CHECK_THROWS_AS(EvaluatorSpec::parse("lookup:"), std::invalid_argument);
  CHECK_THROWS_AS(EvaluatorSpec::parse("bridge: "), std::invalid_argument);
}

TEST_CASE("config parsing applies values and keeps defaults elsewhere") {
  const auto j = nlohmann::json::parse(R"({
    "population_size": 6,
    "seed": 99,
    "evaluator": "synthetic",
    "synthetic": {"target": {"included_layers": 40, "frozen_layers": 3,
                             "learning_rate": 0.01, "dropout": 0.2}},
    "output_dir": "out"
  })");
  const RunConfig config = parse_run_config(j);
  CHECK(config.ga.population_size == 6);
  CHECK(config.ga.max_generations == 10);
  CHECK(config.ga.seed == 99);
  CHECK(config.synthetic.target ==
        chromosome_from_values(config.ga.domains, 40, 3, 0.01, 0.2));
  CHECK(config.output_dir == "out");
}

TEST_CASE("unknown config keys are rejected by name") {
  const auto j = nlohmann::json::parse(R"({"population_size": 6, "poplation": 4})");
  CHECK_THROWS_WITH_AS(parse_run_config(j), "unknown key \"poplation\" in config",
                       std::invalid_argument);

  const auto nested = nlohmann::json::parse(
      R"({"synthetic": {"targett": {}}})");
  CHECK_THROWS_WITH_AS(parse_run_config(nested),
                       "unknown key \"targett\" in synthetic", std::invalid_argument);
}

TEST_CASE("invalid settings are rejected before any evaluation") {
  const auto j = nlohmann::json::parse(R"({"population_size": 1})");
  CHECK_THROWS_WITH_AS(parse_run_config(j), "population_size must be >= 2",
                       std::invalid_argument);
}

TEST_CASE("custom domains parse and re-serialize") {
  const auto j = nlohmann::json::parse(R"({
    "domains": {
      "included_layers_range": [1, 30],
      "frozen_layers_range": [0, 10],
      "learning_rate_menu": [0.01, 0.001],
      "dropout_menu": [0.2, 0.4, 0.6]
    },
    "synthetic": {"target": {"included_layers": 20, "frozen_layers": 1,
                             "learning_rate": 0.01, "dropout": 0.2}}
  })");
  const RunConfig config = parse_run_config(j);
  CHECK(config.ga.domains.included_layers_range() == IntRange{1, 30});
  CHECK(config.ga.domains.learning_rate_menu() == std::vector<double>{0.01, 0.001});
  const nlohmann::ordered_json echo = config_to_json(config);
  CHECK(echo["domains"]["dropout_menu"] == nlohmann::json::parse("[0.2,0.4,0.6]"));
}

TEST_CASE("generations csv has the pinned schema and 6 significant digits") {
  GaConfig config;
  config.seed = 3;
  SyntheticEvaluator evaluator(
      config.domains, {chromosome_from_values(config.domains, 57, 2, 0.1, 0.1)});
  const RunResult result = run(config, evaluator);
  const std::string csv = generations_csv(config.domains, result.generations);

  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header ==
        "generation,best_fitness,avg_fitness,evaluator_calls,cache_hits,"
        "best_included,best_frozen,best_lr,best_dropout");

  // one row per generation plus the header
  std::size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == result.generations.size() + 1);

  // 6-significant-digit rendering turns 1/3-ish values into short strings
  CHECK(csv.find("0.333333333") == std::string::npos);
}

TEST_CASE("manifest embeds config echo, best plan and the evaluation log") {
  RunConfig config;
  config.ga.seed = 3;
  SyntheticEvaluator evaluator(config.ga.domains, config.synthetic);
  const RunResult result = run(config.ga, evaluator);
  const nlohmann::ordered_json manifest = manifest_json(config, result);

  CHECK(manifest["config"]["population_size"] == 10);
  CHECK(manifest["config"]["seed"] == 3);
  CHECK(manifest["stop_reason"].is_string());
  CHECK(manifest["generation_count"] == result.generations.size());
  REQUIRE(manifest.contains("best"));
  const auto& best = manifest["best"];
  CHECK(best["chromosome"]["included_layers"] ==
        result.best->chromosome.included_layers);
  CHECK(best["plan"]["block_layer_counts"].is_array());
  CHECK(manifest["evaluations"].size() == result.cache.log().size());

  SUBCASE("the evaluation log warms a cache for resume") {
    const std::string path = "manifest_roundtrip_test.json";
    write_text_file(path, manifest.dump(2));
    const FitnessCache cache = cache_from_manifest(config.ga.domains, path);
    CHECK(cache.size() == result.cache.log().size());
    for (const auto& [key, loss] : result.cache.log()) {
      REQUIRE(cache.find(key).has_value());
      CHECK(*cache.find(key) == loss);
    }
    std::remove(path.c_str());
  }
}

TEST_CASE("manifest best plan matches a fresh mapping of the best chromosome") {
  RunConfig config;
  config.ga.seed = 14;
  SyntheticEvaluator evaluator(config.ga.domains, config.synthetic);
  const RunResult result = run(config.ga, evaluator);
  const nlohmann::ordered_json manifest = manifest_json(config, result);
  const Chromosome best = chromosome_from_json(config.ga.domains,
                                               manifest["best"]["chromosome"]);
  const ArchitecturePlan replayed = map_to_architecture(config.ga.domains, best);
  CHECK(plan_to_json(replayed) == manifest["best"]["plan"]);
}

TEST_CASE("make_evaluator builds the configured kind") {
  RunConfig config;
  CHECK(make_evaluator(config) != nullptr);

  config.evaluator = EvaluatorSpec::parse("lookup:missing_table.json");
  CHECK_THROWS_AS(make_evaluator(config), std::runtime_error);
}
