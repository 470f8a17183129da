#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "nevo/chromosome.hpp"

namespace nevo {

enum class Concurrency { Serial, Concurrent };

// Raised when an evaluator cannot produce a loss. The engine attaches the
// chromosome it was evaluating before letting the error surface.
class EvaluatorError : public std::runtime_error {
 public:
  explicit EvaluatorError(const std::string& message)
      : std::runtime_error(message) {}

  const std::optional<Chromosome>& chromosome() const { return chromosome_; }
  void attach_chromosome(const Chromosome& c) { chromosome_ = c; }

 private:
  std::optional<Chromosome> chromosome_;
};

// Scores one candidate architecture: returns the average training loss over
// `epochs` probe epochs. The loss must be finite and >= 0; failures are
// reported by throwing EvaluatorError.
class FitnessEvaluator {
 public:
  virtual ~FitnessEvaluator() = default;

  virtual double evaluate(const ArchitecturePlan& plan, int epochs) = 0;

  // Whether evaluate() tolerates concurrent callers.
  virtual Concurrency concurrency_capability() const = 0;
};

// Closed-form stand-in for real training: loss is a weighted sum of
// per-gene normalized distances from a known target chromosome, zero at the
// target. Optional deterministic noise is a pure function of the genes, so
// repeated evaluation of the same plan always returns the same loss.
struct SyntheticLandscape {
  Chromosome target;
  std::array<double, 4> weights{1.0, 1.0, 1.0, 1.0};
  double noise_amplitude = 0.0;
  std::uint64_t noise_seed = 0;
};

// Default landscape: optimum at the identity transfer setup (every layer
// kept, nothing frozen, the leading menu entries), which exists in any
// valid domains. Equal weights, no noise.
SyntheticLandscape default_synthetic_landscape(const GeneDomains& domains);

class SyntheticEvaluator final : public FitnessEvaluator {
 public:
  SyntheticEvaluator(GeneDomains domains, SyntheticLandscape landscape);

  double evaluate(const ArchitecturePlan& plan, int epochs) override;
  Concurrency concurrency_capability() const override {
    return Concurrency::Concurrent;
  }

  // Loss as a function of the genes directly; used by enumeration oracles.
  double loss_of(const Chromosome& c) const;

  const SyntheticLandscape& landscape() const { return landscape_; }

 private:
  GeneDomains domains_;
  SyntheticLandscape landscape_;
};

// Exact table of losses keyed by canonical gene key. A query outside the
// table is an error, never a default.
class LookupEvaluator final : public FitnessEvaluator {
 public:
  using Table = std::unordered_map<CacheKey, double, CacheKeyHash>;

  LookupEvaluator(GeneDomains domains, Table table);

  // Loads a JSON array of {"included_layers","frozen_layers",
  // "learning_rate","dropout","loss"} entries.
  static LookupEvaluator from_file(const GeneDomains& domains, const std::string& path);

  double evaluate(const ArchitecturePlan& plan, int epochs) override;
  Concurrency concurrency_capability() const override {
    return Concurrency::Concurrent;
  }

  std::size_t size() const { return table_.size(); }

 private:
  GeneDomains domains_;
  Table table_;
};

}  // namespace nevo
