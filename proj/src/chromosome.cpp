#include "nevo/chromosome.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nevo {

namespace {

std::string describe_range(const char* name, int value, const IntRange& r) {
  std::ostringstream os;
  os << name << " " << value << " outside [" << r.lo << ", " << r.hi << "]";
  return os.str();
}

void check_menu(const char* name, const std::vector<double>& menu, double lo,
                double hi, bool open_interval) {
  if (menu.empty())
    throw std::invalid_argument(std::string(name) + " must not be empty");
  for (double v : menu) {
    const bool in_bounds = open_interval ? (v > lo && v < hi) : (v > lo);
    if (!in_bounds)
      throw std::invalid_argument(std::string(name) + " value " +
                                  std::to_string(v) + " out of bounds");
  }
  if (menu.size() < 2) return;
  const bool ascending = menu[1] > menu[0];
  for (std::size_t i = 1; i < menu.size(); ++i) {
    const bool ok = ascending ? menu[i] > menu[i - 1] : menu[i] < menu[i - 1];
    if (!ok)
      throw std::invalid_argument(std::string(name) +
                                  " must be strictly ordered with no duplicates");
  }
}

int menu_lookup(const std::vector<double>& menu, double value) {
  for (std::size_t i = 0; i < menu.size(); ++i)
    if (menu[i] == value) return static_cast<int>(i);
  return -1;
}

}  // namespace

double Chromosome::learning_rate(const GeneDomains& domains) const {
  return domains.learning_rate_menu().at(static_cast<std::size_t>(learning_rate_index));
}

double Chromosome::dropout(const GeneDomains& domains) const {
  return domains.dropout_menu().at(static_cast<std::size_t>(dropout_index));
}

GeneDomains::GeneDomains()
    : GeneDomains(IntRange{1, kTotalDenseLayers}, IntRange{0, 6 + 12},
                  {0.1, 0.01, 0.001, 0.0001, 0.00001, 0.000001},
                  {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {}

GeneDomains::GeneDomains(IntRange included_layers_range, IntRange frozen_layers_range,
                         std::vector<double> learning_rate_menu,
                         std::vector<double> dropout_menu)
    : included_range_(included_layers_range),
      frozen_range_(frozen_layers_range),
      lr_menu_(std::move(learning_rate_menu)),
      dropout_menu_(std::move(dropout_menu)) {
  if (included_range_.lo < 1)
    throw std::invalid_argument("included_layers_range lower bound must be >= 1");
  if (included_range_.hi < included_range_.lo)
    throw std::invalid_argument("included_layers_range upper bound below lower bound");
  if (included_range_.hi > kTotalDenseLayers)
    throw std::invalid_argument("included_layers_range upper bound exceeds total dense-block layers (58)");
  if (frozen_range_.lo < 0)
    throw std::invalid_argument("frozen_layers_range lower bound must be >= 0");
  if (frozen_range_.hi < frozen_range_.lo)
    throw std::invalid_argument("frozen_layers_range upper bound below lower bound");
  if (frozen_range_.hi > included_range_.hi)
    throw std::invalid_argument("frozen_layers_range upper bound exceeds included_layers_range upper bound");
  if (frozen_range_.lo > included_range_.lo)
    throw std::invalid_argument("frozen_layers_range lower bound exceeds included_layers_range lower bound");
  check_menu("learning_rate_menu", lr_menu_, 0.0, 0.0, /*open_interval=*/false);
  check_menu("dropout_menu", dropout_menu_, 0.0, 1.0, /*open_interval=*/true);
}

int GeneDomains::learning_rate_index(double value) const {
  return menu_lookup(lr_menu_, value);
}

int GeneDomains::dropout_index(double value) const {
  return menu_lookup(dropout_menu_, value);
}

std::uint64_t GeneDomains::point_count() const {
  return static_cast<std::uint64_t>(included_range_.span() + 1) *
         static_cast<std::uint64_t>(frozen_range_.span() + 1) * lr_menu_.size() *
         dropout_menu_.size();
}

void GeneDomains::validate(const Chromosome& c) const {
  if (!included_range_.contains(c.included_layers))
    throw std::invalid_argument(
        describe_range("included_layers", c.included_layers, included_range_));
  if (!frozen_range_.contains(c.frozen_layers))
    throw std::invalid_argument(
        describe_range("frozen_layers", c.frozen_layers, frozen_range_));
  if (c.frozen_layers > c.included_layers)
    throw std::invalid_argument("frozen_layers " + std::to_string(c.frozen_layers) +
                                " exceeds included_layers " +
                                std::to_string(c.included_layers));
  if (c.learning_rate_index < 0 ||
      c.learning_rate_index >= static_cast<int>(lr_menu_.size()))
    throw std::invalid_argument("learning_rate_index " +
                                std::to_string(c.learning_rate_index) +
                                " outside menu of size " + std::to_string(lr_menu_.size()));
  if (c.dropout_index < 0 || c.dropout_index >= static_cast<int>(dropout_menu_.size()))
    throw std::invalid_argument("dropout_index " + std::to_string(c.dropout_index) +
                                " outside menu of size " +
                                std::to_string(dropout_menu_.size()));
}

bool GeneDomains::is_valid(const Chromosome& c) const {
  try {
    validate(c);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

int ArchitecturePlan::total_layers() const {
  return std::accumulate(block_layer_counts.begin(), block_layer_counts.end(), 0);
}

CacheKey canonical_key(const Chromosome& c) {
  return {c.included_layers, c.frozen_layers, c.learning_rate_index, c.dropout_index};
}

std::size_t CacheKeyHash::operator()(const CacheKey& k) const {
  // FNV-1a over the four genes.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (int gene : k) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(gene));
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h);
}

Chromosome sample_chromosome(const GeneDomains& domains, Rng& rng) {
  Chromosome c;
  const IntRange& inc = domains.included_layers_range();
  const IntRange& fr = domains.frozen_layers_range();
  c.included_layers = rng.uniform_int(inc.lo, inc.hi);
  // Uniform over the feasible frozen values rather than clamping, so no
  // probability mass piles up at the boundary.
  c.frozen_layers = rng.uniform_int(fr.lo, std::min(fr.hi, c.included_layers));
  c.learning_rate_index =
      static_cast<int>(rng.uniform_index(domains.learning_rate_menu().size()));
  c.dropout_index = static_cast<int>(rng.uniform_index(domains.dropout_menu().size()));
  return c;
}

Chromosome chromosome_from_values(const GeneDomains& domains, int included_layers,
                                  int frozen_layers, double learning_rate,
                                  double dropout) {
  Chromosome c;
  c.included_layers = included_layers;
  c.frozen_layers = frozen_layers;
  c.learning_rate_index = domains.learning_rate_index(learning_rate);
  if (c.learning_rate_index < 0)
    throw std::invalid_argument("learning_rate " + std::to_string(learning_rate) +
                                " is not one of the menu values");
  c.dropout_index = domains.dropout_index(dropout);
  if (c.dropout_index < 0)
    throw std::invalid_argument("dropout " + std::to_string(dropout) +
                                " is not one of the menu values");
  domains.validate(c);
  return c;
}

ArchitecturePlan map_to_architecture(const GeneDomains& domains, const Chromosome& c) {
  ArchitecturePlan plan;
  int remaining = c.included_layers;
  for (int block : kDenseBlockLayers) {
    if (remaining <= 0) break;
    const int take = std::min(remaining, block);
    plan.block_layer_counts.push_back(take);
    remaining -= take;
  }
  // A transition+SE survives only if the block after it retains a layer.
  plan.se_layer_count = static_cast<int>(plan.block_layer_counts.size()) - 1;
  plan.frozen_prefix = c.frozen_layers;
  plan.learning_rate = c.learning_rate(domains);
  plan.dropout = c.dropout(domains);
  return plan;
}

Chromosome chromosome_from_plan(const GeneDomains& domains, const ArchitecturePlan& plan) {
  return chromosome_from_values(domains, plan.total_layers(), plan.frozen_prefix,
                                plan.learning_rate, plan.dropout);
}

nlohmann::ordered_json plan_to_json(const ArchitecturePlan& plan) {
  nlohmann::ordered_json j;
  j["block_layer_counts"] = plan.block_layer_counts;
  j["frozen_prefix"] = plan.frozen_prefix;
  j["se_layer_count"] = plan.se_layer_count;
  j["learning_rate"] = plan.learning_rate;
  j["dropout"] = plan.dropout;
  return j;
}

ArchitecturePlan plan_from_json(const nlohmann::json& j) {
  ArchitecturePlan plan;
  plan.block_layer_counts = j.at("block_layer_counts").get<std::vector<int>>();
  plan.frozen_prefix = j.at("frozen_prefix").get<int>();
  plan.se_layer_count = j.at("se_layer_count").get<int>();
  plan.learning_rate = j.at("learning_rate").get<double>();
  plan.dropout = j.at("dropout").get<double>();
  return plan;
}

nlohmann::ordered_json chromosome_to_json(const GeneDomains& domains, const Chromosome& c) {
  nlohmann::ordered_json j;
  j["included_layers"] = c.included_layers;
  j["frozen_layers"] = c.frozen_layers;
  j["learning_rate"] = c.learning_rate(domains);
  j["dropout"] = c.dropout(domains);
  return j;
}

Chromosome chromosome_from_json(const GeneDomains& domains, const nlohmann::json& j) {
  return chromosome_from_values(domains, j.at("included_layers").get<int>(),
                                j.at("frozen_layers").get<int>(),
                                j.at("learning_rate").get<double>(),
                                j.at("dropout").get<double>());
}

nlohmann::ordered_json domains_to_json(const GeneDomains& domains) {
  nlohmann::ordered_json j;
  j["included_layers_range"] = {domains.included_layers_range().lo,
                                domains.included_layers_range().hi};
  j["frozen_layers_range"] = {domains.frozen_layers_range().lo,
                              domains.frozen_layers_range().hi};
  j["learning_rate_menu"] = domains.learning_rate_menu();
  j["dropout_menu"] = domains.dropout_menu();
  return j;
}

GeneDomains domains_from_json(const nlohmann::json& j) {
  auto range_of = [&](const char* key) {
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.size() != 2)
      throw std::invalid_argument(std::string(key) + " must be a [lo, hi] pair");
    return IntRange{arr[0].get<int>(), arr[1].get<int>()};
  };
  return GeneDomains(range_of("included_layers_range"), range_of("frozen_layers_range"),
                     j.at("learning_rate_menu").get<std::vector<double>>(),
                     j.at("dropout_menu").get<std::vector<double>>());
}

}  // namespace nevo
