#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nevo/chromosome.hpp"
#include "nevo/fitness.hpp"
#include "nevo/rng.hpp"

namespace nevo {

enum class FailurePolicy { Abort, Penalize };

struct GaConfig {
  int population_size = 10;
  int max_generations = 10;
  double plateau_epsilon = 0.001;
  double mutation_rate = 0.10;  // per gene
  int tournament_draws = 2;
  std::uint64_t seed = 0;
  int epochs = 5;
  FailurePolicy failure_policy = FailurePolicy::Abort;
  GeneDomains domains;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct EvaluatedChromosome {
  Chromosome chromosome;
  double fitness = 0.0;  // -(average loss); higher is better
  bool from_cache = false;
};

struct GenerationRecord {
  int index = 0;
  std::vector<EvaluatedChromosome> population;
  double best_fitness = 0.0;
  double avg_fitness = 0.0;
  int evaluator_calls = 0;
  int cache_hits = 0;

  // Fitness-maximal member; earliest index wins ties.
  const EvaluatedChromosome& best() const;
};

enum class StopReason { GenerationCap, Plateau, EvaluatorFailure };

const char* to_string(StopReason reason);

// Memoized losses keyed by canonical gene key, with an insertion-ordered log
// so a run's evaluations can be replayed into the next run's cache.
class FitnessCache {
 public:
  std::optional<double> find(const CacheKey& key) const;
  void store(const CacheKey& key, double loss);
  std::size_t size() const { return table_.size(); }
  double largest_loss() const { return largest_loss_; }
  const std::vector<std::pair<CacheKey, double>>& log() const { return log_; }

 private:
  std::unordered_map<CacheKey, double, CacheKeyHash> table_;
  std::vector<std::pair<CacheKey, double>> log_;
  double largest_loss_ = 0.0;
};

struct RunResult {
  std::vector<GenerationRecord> generations;
  std::optional<EvaluatedChromosome> best;  // all-time fitness maximum
  StopReason stop_reason = StopReason::GenerationCap;
  std::optional<std::string> failure_message;
  FitnessCache cache;  // final memo, insertion-ordered log included
};

// --- Evolution phases -------------------------------------------------------
//
// All phases consume draws from a single Rng in a fixed order; the order is
// the replay contract (see README "Determinism"):
//   init:       per chromosome, genes in order included/frozen/lr/dropout
//   generation: elite tournaments (parent 1 then parent 2), then per
//               offspring: two tournaments, four crossover coin flips
//               (included, frozen, lr, dropout), then per-gene mutation
//               (gate draw; direction draw only when the gate passes).
// Fitness evaluation consumes no draws.

std::vector<Chromosome> initialize_population(const GaConfig& config, Rng& rng);

// Evaluates a population against the cache, producing the full generation
// record. Cache is consulted before every evaluator call and updated after;
// evaluator_calls + cache_hits always equals the population size. Under
// FailurePolicy::Abort an evaluator failure propagates as EvaluatorError
// with the offending chromosome attached; under Penalize the chromosome
// receives fitness -10 * max(largest loss seen so far, 1) and the run
// continues (the penalty is not cached).
GenerationRecord evaluate_population(int generation_index,
                                     const std::vector<Chromosome>& population,
                                     const GaConfig& config, FitnessEvaluator& evaluator,
                                     FitnessCache& cache);

// `draws` uniform picks with replacement; the fitness-maximal pick wins and
// the first drawn wins ties.
Chromosome tournament_select(const std::vector<EvaluatedChromosome>& population,
                             int draws, Rng& rng);

// Per-gene mask: true takes the gene from `a`, false from `b`. The child is
// repaired so frozen <= included.
Chromosome crossover_with_mask(const Chromosome& a, const Chromosome& b,
                               const std::array<bool, 4>& take_from_a,
                               const GeneDomains& domains);

Chromosome uniform_crossover(const Chromosome& a, const Chromosome& b,
                             const GeneDomains& domains, Rng& rng);

// Each gene independently mutates with probability mutation_rate: layers
// move +-5 (clamped to their range), learning rate one menu step (x10 or
// /10, clamped at the menu ends), dropout one 0.1 menu step (clamped).
// Frozen is re-clamped below included afterwards.
Chromosome mutate(const Chromosome& c, const GaConfig& config, Rng& rng);

// Two-elite generational replacement: the first tournament-selected parent
// pair survives unchanged; the remaining population_size - 2 slots are fresh
// tournament pair -> uniform crossover -> mutation offspring.
std::vector<Chromosome> next_generation(const std::vector<EvaluatedChromosome>& current,
                                        const GaConfig& config, Rng& rng);

// Full evolutionary loop. Stops at max_generations, or as soon as two
// consecutive generations' average fitness differs by less than
// plateau_epsilon (checked from generation 1), or on evaluator failure
// (partial result). `warm_cache` pre-seeds the fitness memo.
RunResult run(const GaConfig& config, FitnessEvaluator& evaluator,
              FitnessCache warm_cache = {});

}  // namespace nevo
