#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <unordered_set>

#include "nevo/chromosome.hpp"
#include "nevo/rng.hpp"

using namespace nevo;

TEST_CASE("default domains match the search setup") {
  const GeneDomains d;
  CHECK(d.included_layers_range() == IntRange{1, 58});
  CHECK(d.frozen_layers_range() == IntRange{0, 18});
  CHECK(d.learning_rate_menu() ==
        std::vector<double>{0.1, 0.01, 0.001, 0.0001, 0.00001, 0.000001});
  CHECK(d.dropout_menu() ==
        std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  CHECK(d.point_count() == 58u * 19u * 6u * 9u);
  CHECK(d.point_count() == 59508u);
}

TEST_CASE("domain construction rejects inconsistent inputs") {
  CHECK_THROWS_AS(GeneDomains(IntRange{0, 58}, IntRange{0, 18}, {0.1}, {0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GeneDomains(IntRange{1, 59}, IntRange{0, 18}, {0.1}, {0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GeneDomains(IntRange{1, 58}, IntRange{-1, 18}, {0.1}, {0.5}),
                  std::invalid_argument);
  // frozen upper bound above included upper bound
  CHECK_THROWS_AS(GeneDomains(IntRange{1, 10}, IntRange{0, 18}, {0.1}, {0.5}),
                  std::invalid_argument);
  // frozen lower bound above included lower bound leaves no feasible sample
  CHECK_THROWS_AS(GeneDomains(IntRange{1, 58}, IntRange{2, 18}, {0.1}, {0.5}),
                  std::invalid_argument);
  // menus: empty, duplicate, unordered
  CHECK_THROWS_AS(GeneDomains(IntRange{1, 58}, IntRange{0, 18}, {}, {0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GeneDomains(IntRange{1, 58}, IntRange{0, 18}, {0.1, 0.1}, {0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      GeneDomains(IntRange{1, 58}, IntRange{0, 18}, {0.1}, {0.5, 0.2, 0.3}),
      std::invalid_argument);
  // dropout values must be inside (0, 1)
  CHECK_THROWS_AS(GeneDomains(IntRange{1, 58}, IntRange{0, 18}, {0.1}, {0.5, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("chromosome validation names the violated bound") {
  const GeneDomains d;
  Chromosome c{57, 2, 0, 0};
  CHECK_NOTHROW(d.validate(c));

  c.included_layers = 0;
  CHECK_THROWS_WITH_AS(d.validate(c), "included_layers 0 outside [1, 58]",
                       std::invalid_argument);
  c.included_layers = 5;
  c.frozen_layers = 7;
  CHECK_THROWS_WITH_AS(d.validate(c), "frozen_layers 7 exceeds included_layers 5",
                       std::invalid_argument);
}

TEST_CASE("sampling stays inside the domains") {
  const GeneDomains d;
  Rng rng(7);
  for (int i = 0; i < 5000; ++i) {
    const Chromosome c = sample_chromosome(d, rng);
    CHECK_NOTHROW(d.validate(c));
    CHECK(c.frozen_layers <= c.included_layers);
  }
}

TEST_CASE("degenerate single-point domain samples exactly that point") {
  const GeneDomains d(IntRange{58, 58}, IntRange{0, 0}, {0.1}, {0.1});
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const Chromosome c = sample_chromosome(d, rng);
    CHECK(c == Chromosome{58, 0, 0, 0});
  }
}

TEST_CASE("sampling is deterministic under the seed") {
  const GeneDomains d;
  Rng rng_a(42), rng_b(42);
  for (int i = 0; i < 100; ++i)
    CHECK(sample_chromosome(d, rng_a) == sample_chromosome(d, rng_b));
}

// Goodness of fit for the learning-rate draw: 10,000 samples at seed 42,
// each menu item within 3 sigma of 1/6 and the chi-square statistic under
// the df=5 99.9% critical value (20.515).
TEST_CASE("learning-rate menu is sampled uniformly") {
  const GeneDomains d;
  Rng rng(42);
  const int n = 10000;
  std::array<int, 6> counts{};
  for (int i = 0; i < n; ++i) ++counts[sample_chromosome(d, rng).learning_rate_index];

  const double expected = n / 6.0;
  const double three_sigma = 3.0 * 0.0037267799624996494;  // sqrt(p(1-p)/n), p=1/6
  double chi_square = 0.0;
  for (int count : counts) {
    const double freq = count / static_cast<double>(n);
    CHECK(std::abs(freq - 1.0 / 6.0) <= three_sigma);
    chi_square += (count - expected) * (count - expected) / expected;
  }
  CHECK(chi_square < 20.515);
}

TEST_CASE("canonical keys are equal iff genes are equal") {
  const Chromosome a{57, 2, 0, 0};
  const Chromosome b{57, 2, 0, 0};
  const Chromosome c{57, 2, 0, 1};  // differs only in dropout
  CHECK(canonical_key(a) == canonical_key(b));
  CHECK(canonical_key(a) != canonical_key(c));
}

TEST_CASE("canonical keys are injective over the full default gene space") {
  std::unordered_set<CacheKey, CacheKeyHash> keys;
  keys.reserve(59508);
  for (int inc = 1; inc <= 58; ++inc)
    for (int fr = 0; fr <= 18; ++fr)
      for (int lr = 0; lr < 6; ++lr)
        for (int dr = 0; dr < 9; ++dr)
          keys.insert(canonical_key(Chromosome{inc, fr, lr, dr}));
  CHECK(keys.size() == 59508u);
}

TEST_CASE("architecture mapping: full network") {
  const GeneDomains d;
  const Chromosome c = chromosome_from_values(d, 58, 0, 0.001, 0.5);
  const ArchitecturePlan plan = map_to_architecture(d, c);
  CHECK(plan.block_layer_counts == std::vector<int>{6, 12, 24, 16});
  CHECK(plan.frozen_prefix == 0);
  CHECK(plan.se_layer_count == 3);
  CHECK(plan.learning_rate == 0.001);
  CHECK(plan.dropout == 0.5);
}

TEST_CASE("architecture mapping: one layer trimmed from the tail") {
  const GeneDomains d;
  const ArchitecturePlan plan =
      map_to_architecture(d, chromosome_from_values(d, 57, 2, 0.1, 0.1));
  CHECK(plan.block_layer_counts == std::vector<int>{6, 12, 24, 15});
  CHECK(plan.frozen_prefix == 2);
  CHECK(plan.se_layer_count == 3);
}

TEST_CASE("architecture mapping: first two blocks only") {
  const GeneDomains d;
  const ArchitecturePlan plan =
      map_to_architecture(d, chromosome_from_values(d, 18, 18, 0.1, 0.1));
  CHECK(plan.block_layer_counts == std::vector<int>{6, 12});
  CHECK(plan.frozen_prefix == 18);
  CHECK(plan.se_layer_count == 1);
}

TEST_CASE("block fill is prefix-greedy for every included count") {
  const GeneDomains d;
  int previous_se = 0;
  for (int included = 1; included <= 58; ++included) {
    const Chromosome c{included, 0, 0, 0};
    const ArchitecturePlan plan = map_to_architecture(d, c);
    CHECK(plan.total_layers() == included);

    // every block before the last retained one is filled to capacity
    for (std::size_t i = 0; i + 1 < plan.block_layer_counts.size(); ++i)
      CHECK(plan.block_layer_counts[i] == kDenseBlockLayers[i]);
    for (std::size_t i = 0; i < plan.block_layer_counts.size(); ++i) {
      CHECK(plan.block_layer_counts[i] >= 1);
      CHECK(plan.block_layer_counts[i] <= kDenseBlockLayers[i]);
    }

    const int expected_se = included <= 6 ? 0 : included <= 18 ? 1 : included <= 42 ? 2 : 3;
    CHECK(plan.se_layer_count == expected_se);
    CHECK(plan.se_layer_count >= previous_se);  // monotone in included
    previous_se = plan.se_layer_count;
  }
}

TEST_CASE("chromosome_from_values rejects non-menu reals") {
  const GeneDomains d;
  CHECK_THROWS_AS(chromosome_from_values(d, 57, 2, 0.05, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(chromosome_from_values(d, 57, 2, 0.1, 0.15), std::invalid_argument);
  CHECK_THROWS_AS(chromosome_from_values(d, 0, 0, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("plan JSON carries the protocol keys and round-trips") {
  const GeneDomains d;
  const ArchitecturePlan plan =
      map_to_architecture(d, chromosome_from_values(d, 57, 2, 0.1, 0.1));
  const nlohmann::ordered_json j = plan_to_json(plan);
  CHECK(j.dump() ==
        R"({"block_layer_counts":[6,12,24,15],"frozen_prefix":2,"se_layer_count":3,)"
        R"("learning_rate":0.1,"dropout":0.1})");
  CHECK(plan_from_json(nlohmann::json::parse(j.dump())) == plan);
}

TEST_CASE("plans invert back to their chromosome") {
  const GeneDomains d;
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Chromosome c = sample_chromosome(d, rng);
    CHECK(chromosome_from_plan(d, map_to_architecture(d, c)) == c);
  }
}
