#include "nevo/run_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nevo {

namespace {

std::string g6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

void require_keys(const nlohmann::json& obj, const char* context,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) { known = true; break; }
    if (!known)
      throw std::invalid_argument("unknown key \"" + item.key() + "\" in " + context);
  }
}

FailurePolicy failure_policy_from_string(const std::string& s) {
  if (s == "abort") return FailurePolicy::Abort;
  if (s == "penalize") return FailurePolicy::Penalize;
  throw std::invalid_argument("failure_policy must be \"abort\" or \"penalize\", got \"" +
                              s + "\"");
}

const char* failure_policy_to_string(FailurePolicy p) {
  return p == FailurePolicy::Abort ? "abort" : "penalize";
}

std::vector<std::string> split_command(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> argv;
  std::string token;
  while (in >> token) argv.push_back(token);
  return argv;
}

}  // namespace

EvaluatorSpec EvaluatorSpec::parse(const std::string& text) {
  EvaluatorSpec spec;
  if (text == "synthetic") {
    spec.kind = Kind::Synthetic;
    return spec;
  }
  if (text.rfind("lookup:", 0) == 0) {
    spec.kind = Kind::Lookup;
    spec.lookup_path = text.substr(7);
    if (spec.lookup_path.empty())
      throw std::invalid_argument("evaluator \"lookup:\" needs a file path");
    return spec;
  }
  if (text.rfind("bridge:", 0) == 0) {
    spec.kind = Kind::Bridge;
    spec.bridge_command = split_command(text.substr(7));
    if (spec.bridge_command.empty())
      throw std::invalid_argument("evaluator \"bridge:\" needs a command");
    return spec;
  }
  throw std::invalid_argument(
      "evaluator must be \"synthetic\", \"lookup:<path>\" or \"bridge:<command>\", got \"" +
      text + "\"");
}

std::string EvaluatorSpec::to_string() const {
  switch (kind) {
    case Kind::Synthetic: return "synthetic";
    case Kind::Lookup: return "lookup:" + lookup_path;
    case Kind::Bridge: {
      std::string joined;
      for (const std::string& arg : bridge_command) {
        if (!joined.empty()) joined += ' ';
        joined += arg;
      }
      return "bridge:" + joined;
    }
  }
  return {};
}

RunConfig::RunConfig() : synthetic(default_synthetic_landscape(ga.domains)) {}

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  require_keys(j, "config",
               {"population_size", "max_generations", "plateau_epsilon", "mutation_rate",
                "tournament_draws", "seed", "epochs", "failure_policy", "domains",
                "evaluator", "synthetic", "bridge", "output_dir", "note"});

  RunConfig config;
  if (j.contains("domains")) {
    require_keys(j["domains"], "domains",
                 {"included_layers_range", "frozen_layers_range", "learning_rate_menu",
                  "dropout_menu"});
    config.ga.domains = domains_from_json(j["domains"]);
  }
  if (j.contains("population_size"))
    config.ga.population_size = j["population_size"].get<int>();
  if (j.contains("max_generations"))
    config.ga.max_generations = j["max_generations"].get<int>();
  if (j.contains("plateau_epsilon"))
    config.ga.plateau_epsilon = j["plateau_epsilon"].get<double>();
  if (j.contains("mutation_rate"))
    config.ga.mutation_rate = j["mutation_rate"].get<double>();
  if (j.contains("tournament_draws"))
    config.ga.tournament_draws = j["tournament_draws"].get<int>();
  if (j.contains("seed")) config.ga.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("epochs")) config.ga.epochs = j["epochs"].get<int>();
  if (j.contains("failure_policy"))
    config.ga.failure_policy =
        failure_policy_from_string(j["failure_policy"].get<std::string>());
  if (j.contains("evaluator"))
    config.evaluator = EvaluatorSpec::parse(j["evaluator"].get<std::string>());

  bool explicit_target = false;
  if (j.contains("synthetic")) {
    const auto& s = j["synthetic"];
    require_keys(s, "synthetic", {"target", "weights", "noise_amplitude", "noise_seed"});
    if (s.contains("target")) {
      config.synthetic.target = chromosome_from_json(config.ga.domains, s["target"]);
      explicit_target = true;
    }
    if (s.contains("weights")) {
      const auto weights = s["weights"].get<std::vector<double>>();
      if (weights.size() != 4)
        throw std::invalid_argument("synthetic weights must have 4 entries");
      std::copy(weights.begin(), weights.end(), config.synthetic.weights.begin());
    }
    if (s.contains("noise_amplitude"))
      config.synthetic.noise_amplitude = s["noise_amplitude"].get<double>();
    if (s.contains("noise_seed"))
      config.synthetic.noise_seed = s["noise_seed"].get<std::uint64_t>();
  }
  if (!explicit_target)
    config.synthetic.target = default_synthetic_landscape(config.ga.domains).target;
  if (j.contains("bridge")) {
    const auto& b = j["bridge"];
    require_keys(b, "bridge", {"request_timeout_ms", "max_retries", "pool_size"});
    if (b.contains("request_timeout_ms"))
      config.bridge.request_timeout =
          std::chrono::milliseconds(b["request_timeout_ms"].get<std::int64_t>());
    if (b.contains("max_retries")) config.bridge.max_retries = b["max_retries"].get<int>();
    if (b.contains("pool_size")) config.bridge.pool_size = b["pool_size"].get<int>();
  }
  if (j.contains("output_dir")) config.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("note")) config.note = j["note"].get<std::string>();

  config.ga.validate();
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::ordered_json config_to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["population_size"] = config.ga.population_size;
  j["max_generations"] = config.ga.max_generations;
  j["plateau_epsilon"] = config.ga.plateau_epsilon;
  j["mutation_rate"] = config.ga.mutation_rate;
  j["tournament_draws"] = config.ga.tournament_draws;
  j["seed"] = config.ga.seed;
  j["epochs"] = config.ga.epochs;
  j["failure_policy"] = failure_policy_to_string(config.ga.failure_policy);
  j["domains"] = domains_to_json(config.ga.domains);
  j["evaluator"] = config.evaluator.to_string();
  if (config.evaluator.kind == EvaluatorSpec::Kind::Synthetic) {
    nlohmann::ordered_json s;
    s["target"] = chromosome_to_json(config.ga.domains, config.synthetic.target);
    s["weights"] = config.synthetic.weights;
    s["noise_amplitude"] = config.synthetic.noise_amplitude;
    s["noise_seed"] = config.synthetic.noise_seed;
    j["synthetic"] = s;
  }
  if (config.evaluator.kind == EvaluatorSpec::Kind::Bridge) {
    nlohmann::ordered_json b;
    b["request_timeout_ms"] = config.bridge.request_timeout.count();
    b["max_retries"] = config.bridge.max_retries;
    b["pool_size"] = config.bridge.pool_size;
    j["bridge"] = b;
  }
  // No output_dir here: the manifest already lives in it, and identical runs
  // into different directories must produce identical bytes.
  if (!config.note.empty()) j["note"] = config.note;
  return j;
}

std::string generations_csv(const GeneDomains& domains,
                            const std::vector<GenerationRecord>& generations) {
  std::ostringstream out;
  out << "generation,best_fitness,avg_fitness,evaluator_calls,cache_hits,"
         "best_included,best_frozen,best_lr,best_dropout\n";
  for (const GenerationRecord& record : generations) {
    const Chromosome& best = record.best().chromosome;
    out << record.index << ',' << g6(record.best_fitness) << ','
        << g6(record.avg_fitness) << ',' << record.evaluator_calls << ','
        << record.cache_hits << ',' << best.included_layers << ','
        << best.frozen_layers << ',' << g6(best.learning_rate(domains)) << ','
        << g6(best.dropout(domains)) << '\n';
  }
  return out.str();
}

nlohmann::ordered_json manifest_json(const RunConfig& config, const RunResult& result) {
  const GeneDomains& domains = config.ga.domains;
  nlohmann::ordered_json j;
  j["config"] = config_to_json(config);
  j["stop_reason"] = to_string(result.stop_reason);
  j["generation_count"] = result.generations.size();
  if (result.best) {
    nlohmann::ordered_json best;
    best["chromosome"] = chromosome_to_json(domains, result.best->chromosome);
    best["fitness"] = result.best->fitness;
    best["plan"] = plan_to_json(map_to_architecture(domains, result.best->chromosome));
    j["best"] = best;
  } else {
    j["best"] = nullptr;
  }
  if (result.failure_message) j["failure"] = *result.failure_message;
  nlohmann::ordered_json evaluations = nlohmann::ordered_json::array();
  for (const auto& [key, loss] : result.cache.log()) {
    Chromosome c;
    c.included_layers = key[0];
    c.frozen_layers = key[1];
    c.learning_rate_index = key[2];
    c.dropout_index = key[3];
    nlohmann::ordered_json entry = chromosome_to_json(domains, c);
    entry["loss"] = loss;
    evaluations.push_back(entry);
  }
  j["evaluations"] = evaluations;
  return j;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

FitnessCache cache_from_manifest(const GeneDomains& domains, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("manifest " + path + ": " + e.what());
  }
  FitnessCache cache;
  for (const auto& entry : j.at("evaluations")) {
    const Chromosome c = chromosome_from_json(domains, entry);
    const double loss = entry.at("loss").get<double>();
    if (!std::isfinite(loss) || loss < 0.0)
      throw std::runtime_error("manifest " + path + ": loss must be finite and >= 0");
    cache.store(canonical_key(c), loss);
  }
  return cache;
}

std::unique_ptr<FitnessEvaluator> make_evaluator(const RunConfig& config) {
  switch (config.evaluator.kind) {
    case EvaluatorSpec::Kind::Synthetic:
      return std::make_unique<SyntheticEvaluator>(config.ga.domains, config.synthetic);
    case EvaluatorSpec::Kind::Lookup:
      return std::make_unique<LookupEvaluator>(
          LookupEvaluator::from_file(config.ga.domains, config.evaluator.lookup_path));
    case EvaluatorSpec::Kind::Bridge: {
      TrainerBridgeConfig bridge = config.bridge;
      bridge.command = config.evaluator.bridge_command;
      return std::make_unique<TrainerBridge>(std::move(bridge));
    }
  }
  throw std::logic_error("unreachable evaluator kind");
}

}  // namespace nevo
