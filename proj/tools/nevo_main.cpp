#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nevo/ga.hpp"
#include "nevo/metrics.hpp"
#include "nevo/run_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitEvaluatorFailure = 2;

struct SearchOptions {
  std::string config_path;
  std::string resume_manifest;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> population_size;
  std::optional<int> max_generations;
  std::optional<double> plateau_epsilon;
  std::optional<double> mutation_rate;
  std::optional<int> tournament_draws;
  std::optional<int> epochs;
  std::optional<std::string> evaluator;
};

// One column of numbers, one value per line. A leading non-numeric line is
// treated as a header and skipped.
std::vector<double> load_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> values;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    const std::string token = line.substr(start);
    try {
      std::size_t consumed = 0;
      const double value = std::stod(token, &consumed);
      if (consumed != token.size()) throw std::invalid_argument(token);
      values.push_back(value);
    } catch (const std::exception&) {
      if (line_number == 1) continue;  // header row
      throw std::runtime_error(path + ":" + std::to_string(line_number) +
                               ": not a number: \"" + token + "\"");
    }
  }
  if (values.empty()) throw std::runtime_error(path + ": no numeric values");
  return values;
}

int cmd_search(const SearchOptions& opts) {
  nevo::RunConfig config = nevo::load_run_config(opts.config_path);
  if (opts.out_dir) config.output_dir = *opts.out_dir;
  if (opts.seed) config.ga.seed = *opts.seed;
  if (opts.population_size) config.ga.population_size = *opts.population_size;
  if (opts.max_generations) config.ga.max_generations = *opts.max_generations;
  if (opts.plateau_epsilon) config.ga.plateau_epsilon = *opts.plateau_epsilon;
  if (opts.mutation_rate) config.ga.mutation_rate = *opts.mutation_rate;
  if (opts.tournament_draws) config.ga.tournament_draws = *opts.tournament_draws;
  if (opts.epochs) config.ga.epochs = *opts.epochs;
  if (opts.evaluator) config.evaluator = nevo::EvaluatorSpec::parse(*opts.evaluator);
  config.ga.validate();

  std::unique_ptr<nevo::FitnessEvaluator> evaluator = nevo::make_evaluator(config);
  nevo::FitnessCache warm_cache;
  if (!opts.resume_manifest.empty())
    warm_cache = nevo::cache_from_manifest(config.ga.domains, opts.resume_manifest);

  const nevo::RunResult result = nevo::run(config.ga, *evaluator, std::move(warm_cache));

  for (const nevo::GenerationRecord& record : result.generations) {
    std::printf("generation %d  best %.6g  avg %.6g  calls %d  hits %d\n", record.index,
                record.best_fitness, record.avg_fitness, record.evaluator_calls,
                record.cache_hits);
  }
  std::printf("stop: %s\n", nevo::to_string(result.stop_reason));
  if (result.failure_message) std::printf("failure: %s\n", result.failure_message->c_str());
  if (result.best) {
    const nevo::Chromosome& best = result.best->chromosome;
    std::printf("best: included=%d frozen=%d lr=%.6g dropout=%.6g fitness=%.6g\n",
                best.included_layers, best.frozen_layers,
                best.learning_rate(config.ga.domains), best.dropout(config.ga.domains),
                result.best->fitness);
  }

  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path dir(config.output_dir);
  nevo::write_text_file((dir / "generations.csv").string(),
                        nevo::generations_csv(config.ga.domains, result.generations));
  nevo::write_text_file((dir / "manifest.json").string(),
                        nevo::manifest_json(config, result).dump(2) + "\n");
  std::printf("wrote %s and %s\n", (dir / "generations.csv").c_str(),
              (dir / "manifest.json").c_str());

  return result.stop_reason == nevo::StopReason::EvaluatorFailure ? kExitEvaluatorFailure
                                                                  : kExitOk;
}

int cmd_metrics(const std::string& truth_path, const std::string& pred1_path,
                const std::string& pred2_path) {
  const std::vector<double> truth_values = load_column(truth_path);
  std::vector<int> truth(truth_values.size());
  for (std::size_t i = 0; i < truth_values.size(); ++i) {
    if (truth_values[i] != 0.0 && truth_values[i] != 1.0)
      throw std::runtime_error(truth_path + ": non-binary truth value " +
                               std::to_string(truth_values[i]));
    truth[i] = static_cast<int>(truth_values[i]);
  }

  const std::vector<double> pred1 = load_column(pred1_path);
  if (pred1.size() != truth.size())
    throw std::runtime_error("length mismatch: " + truth_path + " has " +
                             std::to_string(truth.size()) + " rows, " + pred1_path +
                             " has " + std::to_string(pred1.size()));

  nlohmann::ordered_json report;
  report["samples"] = truth.size();
  nlohmann::ordered_json auc_report;
  auc_report["pred1"] = nevo::auc({truth, pred1});

  if (!pred2_path.empty()) {
    const std::vector<double> pred2 = load_column(pred2_path);
    if (pred2.size() != truth.size())
      throw std::runtime_error("length mismatch: " + truth_path + " has " +
                               std::to_string(truth.size()) + " rows, " + pred2_path +
                               " has " + std::to_string(pred2.size()));
    auc_report["pred2"] = nevo::auc({truth, pred2});
    report["auc"] = auc_report;

    std::vector<char> correct1(truth.size()), correct2(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      correct1[i] = pred1[i] == static_cast<double>(truth[i]);
      correct2[i] = pred2[i] == static_cast<double>(truth[i]);
    }
    const nevo::ContingencyTable table =
        nevo::build_contingency_from_correctness(correct1, correct2);
    const nevo::McNemarResult mc = nevo::mcnemar(table);
    nlohmann::ordered_json mcnemar_report;
    mcnemar_report["contingency"] = {{"a", table.a}, {"b", table.b},
                                     {"c", table.c}, {"d", table.d}};
    mcnemar_report["computable"] = mc.computable;
    if (mc.computable) {
      mcnemar_report["statistic"] = *mc.statistic;
      mcnemar_report["p_value"] = *mc.p_value;
    }
    report["mcnemar"] = mcnemar_report;
  } else {
    report["auc"] = auc_report;
  }

  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_plan(int included, int frozen, double learning_rate, double dropout) {
  const nevo::GeneDomains domains;
  const nevo::Chromosome c =
      nevo::chromosome_from_values(domains, included, frozen, learning_rate, dropout);
  std::cout << nevo::plan_to_json(nevo::map_to_architecture(domains, c)).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary search for transfer-learning configurations"};
  app.require_subcommand(1);

  SearchOptions search_opts;
  CLI::App* search = app.add_subcommand(
      "search", "Run the genetic search and write generations.csv + manifest.json");
  search->add_option("--config", search_opts.config_path, "Run config JSON file")
      ->required();
  search->add_option("--out", search_opts.out_dir, "Output directory (overrides config)");
  search->add_option("--seed", search_opts.seed, "Seed override");
  search->add_option("--population-size", search_opts.population_size);
  search->add_option("--max-generations", search_opts.max_generations);
  search->add_option("--plateau-epsilon", search_opts.plateau_epsilon);
  search->add_option("--mutation-rate", search_opts.mutation_rate);
  search->add_option("--tournament-draws", search_opts.tournament_draws);
  search->add_option("--epochs", search_opts.epochs);
  search->add_option("--evaluator", search_opts.evaluator,
                     "synthetic | lookup:<path> | bridge:<command>");
  search->add_option("--resume", search_opts.resume_manifest,
                     "Warm-start the fitness cache from a previous manifest");

  std::string truth_path, pred1_path, pred2_path;
  CLI::App* metrics = app.add_subcommand(
      "metrics", "AUC and McNemar report from single-column CSV files");
  metrics->add_option("truth", truth_path, "CSV of 0/1 truth labels")->required();
  metrics->add_option("pred1", pred1_path, "CSV of model-1 scores/predictions")
      ->required();
  metrics->add_option("pred2", pred2_path, "CSV of model-2 scores/predictions");

  int included = 0, frozen = 0;
  double learning_rate = 0.0, dropout = 0.0;
  CLI::App* plan = app.add_subcommand("plan", "Print the architecture plan for genes");
  plan->add_option("included", included, "Included dense-block layers")->required();
  plan->add_option("frozen", frozen, "Frozen dense-block layers")->required();
  plan->add_option("learning_rate", learning_rate)->required();
  plan->add_option("dropout", dropout)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*search) return cmd_search(search_opts);
    if (*metrics) return cmd_metrics(truth_path, pred1_path, pred2_path);
    if (*plan) return cmd_plan(included, frozen, learning_rate, dropout);
  } catch (const nevo::EvaluatorError& e) {
    std::fprintf(stderr, "evaluator failure: %s\n", e.what());
    return kExitEvaluatorFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
