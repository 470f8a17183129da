#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "nevo/fitness.hpp"
#include "nevo/ga.hpp"
#include "nevo/trainer_bridge.hpp"

namespace nevo {

struct EvaluatorSpec {
  enum class Kind { Synthetic, Lookup, Bridge };

  Kind kind = Kind::Synthetic;
  std::string lookup_path;                   // Kind::Lookup
  std::vector<std::string> bridge_command;   // Kind::Bridge

  // Parses "synthetic", "lookup:<path>" or "bridge:<command line>"
  // (whitespace-split command).
  static EvaluatorSpec parse(const std::string& text);
  std::string to_string() const;
};

// Parsed run configuration file: GA settings plus evaluator selection and
// output destination.
struct RunConfig {
  GaConfig ga;
  EvaluatorSpec evaluator;
  SyntheticLandscape synthetic;  // used when evaluator is synthetic
  TrainerBridgeConfig bridge;    // used when evaluator is a bridge
  std::string output_dir = ".";
  std::string note;              // opaque, echoed into the manifest

  RunConfig();
};

// Rejects unknown keys; errors name the offending key.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

nlohmann::ordered_json config_to_json(const RunConfig& config);

// One CSV row per generation; floating values with 6 significant digits.
// best_* columns describe the generation's fitness-maximal chromosome.
std::string generations_csv(const GeneDomains& domains,
                            const std::vector<GenerationRecord>& generations);

// Run manifest: config echo, stop reason, best chromosome with its plan,
// and the insertion-ordered evaluation log (reusable as a cache warm start
// or as a lookup-evaluator table). No timestamps, so identical runs produce
// identical bytes.
nlohmann::ordered_json manifest_json(const RunConfig& config, const RunResult& result);

void write_text_file(const std::string& path, const std::string& contents);

// Warm-start cache from a previous manifest's "evaluations" log.
FitnessCache cache_from_manifest(const GeneDomains& domains, const std::string& path);

std::unique_ptr<FitnessEvaluator> make_evaluator(const RunConfig& config);

}  // namespace nevo
