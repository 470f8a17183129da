#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "nevo/rng.hpp"

namespace nevo {

// DenseNet-121 dense-block structure: 4 blocks of 6, 12, 24, 16 layers.
// A transition layer (with an SE insertion) sits between consecutive blocks.
inline constexpr std::array<int, 4> kDenseBlockLayers{6, 12, 24, 16};
inline constexpr int kTotalDenseLayers = 6 + 12 + 24 + 16;  // 58

struct IntRange {
  int lo = 0;
  int hi = 0;

  bool contains(int v) const { return v >= lo && v <= hi; }
  int span() const { return hi - lo; }

  friend bool operator==(const IntRange&, const IntRange&) = default;
};

// One search point: which prefix of the network to keep, how much of it to
// freeze, and which learning rate / dropout to fine-tune with. Menu genes
// are stored as indices into the domain menus so equality and cache keys
// are exact; use learning_rate()/dropout() to read the real values.
class GeneDomains;

struct Chromosome {
  int included_layers = 0;
  int frozen_layers = 0;
  int learning_rate_index = 0;
  int dropout_index = 0;

  double learning_rate(const GeneDomains& domains) const;
  double dropout(const GeneDomains& domains) const;

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

// Legal gene ranges and menus. Immutable after construction; the
// constructor rejects inconsistent domains so sampling is always total.
class GeneDomains {
 public:
  // Defaults: included [1,58], frozen [0,18] (end of block 2),
  // learning rates {0.1 .. 1e-6}, dropout {0.1 .. 0.9}.
  GeneDomains();
  GeneDomains(IntRange included_layers_range, IntRange frozen_layers_range,
              std::vector<double> learning_rate_menu,
              std::vector<double> dropout_menu);

  const IntRange& included_layers_range() const { return included_range_; }
  const IntRange& frozen_layers_range() const { return frozen_range_; }
  const std::vector<double>& learning_rate_menu() const { return lr_menu_; }
  const std::vector<double>& dropout_menu() const { return dropout_menu_; }

  // Exact-value menu lookup; -1 if the value is not a menu member.
  int learning_rate_index(double value) const;
  int dropout_index(double value) const;

  // Number of points in the rectangular gene space.
  std::uint64_t point_count() const;

  // Throws std::invalid_argument naming the violated bound.
  void validate(const Chromosome& c) const;
  bool is_valid(const Chromosome& c) const;

  friend bool operator==(const GeneDomains&, const GeneDomains&) = default;

 private:
  IntRange included_range_;
  IntRange frozen_range_;
  std::vector<double> lr_menu_;
  std::vector<double> dropout_menu_;
};

// Concrete transfer-learning setup derived from a chromosome: per-block
// retained layer counts (prefix-greedy over 6/12/24/16), the frozen prefix,
// and how many transition+SE insertions survive.
struct ArchitecturePlan {
  std::vector<int> block_layer_counts;
  int frozen_prefix = 0;
  int se_layer_count = 0;
  double learning_rate = 0.0;
  double dropout = 0.0;

  int total_layers() const;

  friend bool operator==(const ArchitecturePlan&, const ArchitecturePlan&) = default;
};

// Cache key for fitness memoization: the four genes, menu genes by index.
// Injective over any finite gene space by construction.
using CacheKey = std::array<int, 4>;

CacheKey canonical_key(const Chromosome& c);

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const;
};

// Draw order: included, then frozen (uniform on [frozen_lo, min(frozen_hi,
// included)] so the frozen<=included constraint never needs a repair), then
// learning-rate index, then dropout index.
Chromosome sample_chromosome(const GeneDomains& domains, Rng& rng);

// Builds a Chromosome from gene values, resolving menu values to indices.
// Throws std::invalid_argument naming the violated bound or menu.
Chromosome chromosome_from_values(const GeneDomains& domains, int included_layers,
                                  int frozen_layers, double learning_rate,
                                  double dropout);

ArchitecturePlan map_to_architecture(const GeneDomains& domains, const Chromosome& c);

// Inverse of map_to_architecture; throws std::invalid_argument if the plan's
// values do not correspond to a chromosome under these domains.
Chromosome chromosome_from_plan(const GeneDomains& domains, const ArchitecturePlan& plan);

nlohmann::ordered_json plan_to_json(const ArchitecturePlan& plan);
ArchitecturePlan plan_from_json(const nlohmann::json& j);

nlohmann::ordered_json chromosome_to_json(const GeneDomains& domains, const Chromosome& c);
Chromosome chromosome_from_json(const GeneDomains& domains, const nlohmann::json& j);

nlohmann::ordered_json domains_to_json(const GeneDomains& domains);
GeneDomains domains_from_json(const nlohmann::json& j);

}  // namespace nevo
