#include "nevo/ga.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nevo {

namespace {

int clamp_to(int value, const IntRange& range) {
  return std::clamp(value, range.lo, range.hi);
}

// Steps a menu gene one entry toward the larger (or smaller) menu value,
// regardless of the order the menu was written in. Clamps at the ends.
int menu_step(const std::vector<double>& menu, int index, bool toward_larger) {
  if (menu.size() < 2) return index;
  const bool ascending = menu.front() < menu.back();
  const int delta = (toward_larger == ascending) ? 1 : -1;
  return std::clamp(index + delta, 0, static_cast<int>(menu.size()) - 1);
}

Chromosome repair_frozen(const GeneDomains& domains, Chromosome c) {
  c.frozen_layers = std::min({c.frozen_layers, c.included_layers,
                              domains.frozen_layers_range().hi});
  return c;
}

}  // namespace

void GaConfig::validate() const {
  if (population_size < 2)
    throw std::invalid_argument("population_size must be >= 2");
  if (max_generations < 1)
    throw std::invalid_argument("max_generations must be >= 1");
  if (!(plateau_epsilon > 0.0))
    throw std::invalid_argument("plateau_epsilon must be > 0");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
    throw std::invalid_argument("mutation_rate must be in [0, 1]");
  if (tournament_draws < 2)
    throw std::invalid_argument("tournament_draws must be >= 2");
  if (epochs < 1)
    throw std::invalid_argument("epochs must be >= 1");
}

const EvaluatedChromosome& GenerationRecord::best() const {
  if (population.empty())
    throw std::logic_error("GenerationRecord::best on empty population");
  const EvaluatedChromosome* best = &population.front();
  for (const EvaluatedChromosome& e : population)
    if (e.fitness > best->fitness) best = &e;
  return *best;
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::GenerationCap: return "generation_cap";
    case StopReason::Plateau: return "plateau";
    case StopReason::EvaluatorFailure: return "evaluator_failure";
  }
  return "unknown";
}

std::optional<double> FitnessCache::find(const CacheKey& key) const {
  const auto it = table_.find(key);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

void FitnessCache::store(const CacheKey& key, double loss) {
  if (table_.emplace(key, loss).second) {
    log_.emplace_back(key, loss);
    largest_loss_ = std::max(largest_loss_, loss);
  }
}

std::vector<Chromosome> initialize_population(const GaConfig& config, Rng& rng) {
  std::vector<Chromosome> population;
  population.reserve(static_cast<std::size_t>(config.population_size));
  for (int i = 0; i < config.population_size; ++i)
    population.push_back(sample_chromosome(config.domains, rng));
  return population;
}

GenerationRecord evaluate_population(int generation_index,
                                     const std::vector<Chromosome>& population,
                                     const GaConfig& config, FitnessEvaluator& evaluator,
                                     FitnessCache& cache) {
  GenerationRecord record;
  record.index = generation_index;
  record.population.reserve(population.size());

  double fitness_sum = 0.0;
  for (const Chromosome& c : population) {
    const CacheKey key = canonical_key(c);
    EvaluatedChromosome evaluated;
    evaluated.chromosome = c;
    if (const auto cached = cache.find(key)) {
      evaluated.fitness = *cached > 0.0 ? -*cached : 0.0;
      evaluated.from_cache = true;
      ++record.cache_hits;
    } else {
      ++record.evaluator_calls;
      const ArchitecturePlan plan = map_to_architecture(config.domains, c);
      try {
        const double loss = evaluator.evaluate(plan, config.epochs);
        if (!std::isfinite(loss) || loss < 0.0)
          throw EvaluatorError("evaluator returned an invalid loss: " +
                               std::to_string(loss));
        cache.store(key, loss);
        evaluated.fitness = loss > 0.0 ? -loss : 0.0;
      } catch (EvaluatorError& e) {
        if (config.failure_policy == FailurePolicy::Abort) {
          e.attach_chromosome(c);
          throw;
        }
        // Penalty keeps the run alive but can never outrank a real result.
        evaluated.fitness = -10.0 * std::max(cache.largest_loss(), 1.0);
      }
    }
    fitness_sum += evaluated.fitness;
    record.population.push_back(evaluated);
  }

  record.best_fitness = record.best().fitness;
  record.avg_fitness = fitness_sum / static_cast<double>(record.population.size());
  return record;
}

Chromosome tournament_select(const std::vector<EvaluatedChromosome>& population,
                             int draws, Rng& rng) {
  if (population.empty())
    throw std::invalid_argument("tournament_select on empty population");
  const EvaluatedChromosome* winner = nullptr;
  for (int i = 0; i < draws; ++i) {
    const EvaluatedChromosome& pick = population[rng.uniform_index(population.size())];
    if (winner == nullptr || pick.fitness > winner->fitness) winner = &pick;
  }
  return winner->chromosome;
}

Chromosome crossover_with_mask(const Chromosome& a, const Chromosome& b,
                               const std::array<bool, 4>& take_from_a,
                               const GeneDomains& domains) {
  Chromosome child;
  child.included_layers = take_from_a[0] ? a.included_layers : b.included_layers;
  child.frozen_layers = take_from_a[1] ? a.frozen_layers : b.frozen_layers;
  child.learning_rate_index =
      take_from_a[2] ? a.learning_rate_index : b.learning_rate_index;
  child.dropout_index = take_from_a[3] ? a.dropout_index : b.dropout_index;
  return repair_frozen(domains, child);
}

Chromosome uniform_crossover(const Chromosome& a, const Chromosome& b,
                             const GeneDomains& domains, Rng& rng) {
  const std::array<bool, 4> mask{rng.coin(), rng.coin(), rng.coin(), rng.coin()};
  return crossover_with_mask(a, b, mask, domains);
}

Chromosome mutate(const Chromosome& c, const GaConfig& config, Rng& rng) {
  const GeneDomains& domains = config.domains;
  Chromosome m = c;
  if (rng.uniform01() < config.mutation_rate) {
    const int step = rng.coin() ? 5 : -5;
    m.included_layers =
        clamp_to(m.included_layers + step, domains.included_layers_range());
  }
  if (rng.uniform01() < config.mutation_rate) {
    const int step = rng.coin() ? 5 : -5;
    m.frozen_layers = clamp_to(m.frozen_layers + step, domains.frozen_layers_range());
  }
  if (rng.uniform01() < config.mutation_rate) {
    m.learning_rate_index =
        menu_step(domains.learning_rate_menu(), m.learning_rate_index, rng.coin());
  }
  if (rng.uniform01() < config.mutation_rate) {
    m.dropout_index = menu_step(domains.dropout_menu(), m.dropout_index, rng.coin());
  }
  return repair_frozen(domains, m);
}

std::vector<Chromosome> next_generation(const std::vector<EvaluatedChromosome>& current,
                                        const GaConfig& config, Rng& rng) {
  std::vector<Chromosome> next;
  next.reserve(static_cast<std::size_t>(config.population_size));
  next.push_back(tournament_select(current, config.tournament_draws, rng));
  next.push_back(tournament_select(current, config.tournament_draws, rng));
  while (static_cast<int>(next.size()) < config.population_size) {
    const Chromosome parent_a = tournament_select(current, config.tournament_draws, rng);
    const Chromosome parent_b = tournament_select(current, config.tournament_draws, rng);
    const Chromosome child = uniform_crossover(parent_a, parent_b, config.domains, rng);
    next.push_back(mutate(child, config, rng));
  }
  return next;
}

RunResult run(const GaConfig& config, FitnessEvaluator& evaluator,
              FitnessCache warm_cache) {
  config.validate();
  Rng rng(config.seed);
  FitnessCache cache = std::move(warm_cache);

  RunResult result;
  std::vector<Chromosome> population = initialize_population(config, rng);

  for (int generation = 0; generation < config.max_generations; ++generation) {
    GenerationRecord record;
    try {
      record = evaluate_population(generation, population, config, evaluator, cache);
    } catch (const EvaluatorError& e) {
      result.stop_reason = StopReason::EvaluatorFailure;
      std::string message = e.what();
      if (e.chromosome()) {
        const Chromosome& c = *e.chromosome();
        message += " [chromosome included=" + std::to_string(c.included_layers) +
                   " frozen=" + std::to_string(c.frozen_layers) +
                   " lr=" + std::to_string(c.learning_rate(config.domains)) +
                   " dropout=" + std::to_string(c.dropout(config.domains)) + "]";
      }
      result.failure_message = message;
      result.cache = std::move(cache);
      return result;
    }

    if (!result.best || record.best().fitness > result.best->fitness)
      result.best = record.best();
    result.generations.push_back(std::move(record));

    if (generation >= 1) {
      const double delta = std::abs(result.generations[generation].avg_fitness -
                                    result.generations[generation - 1].avg_fitness);
      if (delta < config.plateau_epsilon) {
        result.stop_reason = StopReason::Plateau;
        result.cache = std::move(cache);
        return result;
      }
    }
    if (generation == config.max_generations - 1) {
      result.stop_reason = StopReason::GenerationCap;
      result.cache = std::move(cache);
      return result;
    }

    population = next_generation(result.generations.back().population, config, rng);
  }
  return result;
}

}  // namespace nevo
