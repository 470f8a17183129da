#include "nevo/fitness.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nevo {

namespace {

double normalized_int_distance(int value, int target, int span) {
  if (span == 0) return 0.0;
  return std::abs(value - target) / static_cast<double>(span);
}

double normalized_menu_distance(int index, int target, std::size_t menu_size) {
  if (menu_size < 2) return 0.0;
  return std::abs(index - target) / static_cast<double>(menu_size - 1);
}

// Deterministic unit noise in [0, 1) from the genes and a seed.
double unit_noise(const CacheKey& key, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
  for (int gene : key) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(gene));
    h *= 0x100000001b3ull;
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::string gene_string(const ArchitecturePlan& plan) {
  std::ostringstream os;
  os << "(included=" << plan.total_layers() << ", frozen=" << plan.frozen_prefix
     << ", lr=" << plan.learning_rate << ", dropout=" << plan.dropout << ")";
  return os.str();
}

}  // namespace

SyntheticLandscape default_synthetic_landscape(const GeneDomains& domains) {
  SyntheticLandscape landscape;
  landscape.target.included_layers = domains.included_layers_range().hi;
  landscape.target.frozen_layers = domains.frozen_layers_range().lo;
  landscape.target.learning_rate_index = 0;
  landscape.target.dropout_index = 0;
  return landscape;
}

SyntheticEvaluator::SyntheticEvaluator(GeneDomains domains, SyntheticLandscape landscape)
    : domains_(std::move(domains)), landscape_(landscape) {
  domains_.validate(landscape_.target);
  for (double w : landscape_.weights)
    if (!(w >= 0.0))
      throw std::invalid_argument("synthetic landscape weights must be >= 0");
  if (!(landscape_.noise_amplitude >= 0.0))
    throw std::invalid_argument("noise_amplitude must be >= 0");
}

double SyntheticEvaluator::loss_of(const Chromosome& c) const {
  const auto& t = landscape_.target;
  const auto& w = landscape_.weights;
  double loss =
      w[0] * normalized_int_distance(c.included_layers, t.included_layers,
                                     domains_.included_layers_range().span()) +
      w[1] * normalized_int_distance(c.frozen_layers, t.frozen_layers,
                                     domains_.frozen_layers_range().span()) +
      w[2] * normalized_menu_distance(c.learning_rate_index, t.learning_rate_index,
                                      domains_.learning_rate_menu().size()) +
      w[3] * normalized_menu_distance(c.dropout_index, t.dropout_index,
                                      domains_.dropout_menu().size());
  if (landscape_.noise_amplitude > 0.0)
    loss += landscape_.noise_amplitude *
            unit_noise(canonical_key(c), landscape_.noise_seed);
  return loss;
}

double SyntheticEvaluator::evaluate(const ArchitecturePlan& plan, int /*epochs*/) {
  Chromosome c;
  try {
    c = chromosome_from_plan(domains_, plan);
  } catch (const std::invalid_argument& e) {
    throw EvaluatorError(std::string("plan is not expressible in the search domains: ") +
                         e.what());
  }
  return loss_of(c);
}

LookupEvaluator::LookupEvaluator(GeneDomains domains, Table table)
    : domains_(std::move(domains)), table_(std::move(table)) {}

LookupEvaluator LookupEvaluator::from_file(const GeneDomains& domains,
                                           const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lookup table file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("lookup table " + path + ": " + e.what());
  }
  if (!j.is_array())
    throw std::runtime_error("lookup table " + path + ": expected a JSON array");
  Table table;
  for (const auto& entry : j) {
    const Chromosome c = chromosome_from_json(domains, entry);
    const double loss = entry.at("loss").get<double>();
    if (!std::isfinite(loss) || loss < 0.0)
      throw std::runtime_error("lookup table " + path +
                               ": loss must be finite and >= 0");
    table[canonical_key(c)] = loss;
  }
  return LookupEvaluator(domains, std::move(table));
}

double LookupEvaluator::evaluate(const ArchitecturePlan& plan, int /*epochs*/) {
  Chromosome c;
  try {
    c = chromosome_from_plan(domains_, plan);
  } catch (const std::invalid_argument& e) {
    throw EvaluatorError(std::string("plan is not expressible in the search domains: ") +
                         e.what());
  }
  const auto it = table_.find(canonical_key(c));
  if (it == table_.end())
    throw EvaluatorError("no lookup-table entry for chromosome " + gene_string(plan));
  return it->second;
}

}  // namespace nevo
