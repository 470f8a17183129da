#include "nevo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nevo {

double auc(const ScoredLabels& data) {
  const std::size_t n = data.labels.size();
  if (data.scores.size() != n)
    throw std::invalid_argument("labels and scores must have equal length");
  long long positives = 0;
  for (int label : data.labels) {
    if (label != 0 && label != 1)
      throw std::invalid_argument("labels must be 0 or 1");
    positives += label;
  }
  const long long negatives = static_cast<long long>(n) - positives;
  if (positives == 0 || negatives == 0)
    throw std::invalid_argument("AUC needs at least one positive and one negative label");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
    return data.scores[lhs] < data.scores[rhs];
  });

  // Average ranks over tie groups, then the Mann-Whitney U statistic.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && data.scores[order[j + 1]] == data.scores[order[i]]) ++j;
    const double average_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (data.labels[order[k]] == 1) positive_rank_sum += average_rank;
    i = j + 1;
  }
  const double u = positive_rank_sum -
                   0.5 * static_cast<double>(positives) *
                       static_cast<double>(positives + 1);
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

ContingencyTable build_contingency(const std::vector<int>& truth,
                                   const std::vector<int>& pred1,
                                   const std::vector<int>& pred2) {
  const std::size_t n = truth.size();
  if (pred1.size() != n || pred2.size() != n)
    throw std::invalid_argument("truth and prediction lists must have equal length");
  if (n == 0) throw std::invalid_argument("contingency needs at least one sample");
  std::vector<char> correct1(n), correct2(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (truth[i] != 0 && truth[i] != 1)
      throw std::invalid_argument("truth labels must be 0 or 1");
    correct1[i] = pred1[i] == truth[i];
    correct2[i] = pred2[i] == truth[i];
  }
  return build_contingency_from_correctness(correct1, correct2);
}

ContingencyTable build_contingency_from_correctness(const std::vector<char>& correct1,
                                                    const std::vector<char>& correct2) {
  if (correct1.size() != correct2.size())
    throw std::invalid_argument("correctness lists must have equal length");
  if (correct1.empty())
    throw std::invalid_argument("contingency needs at least one sample");
  ContingencyTable t;
  for (std::size_t i = 0; i < correct1.size(); ++i) {
    if (correct1[i] && correct2[i]) ++t.a;
    else if (correct1[i]) ++t.b;
    else if (correct2[i]) ++t.c;
    else ++t.d;
  }
  return t;
}

McNemarResult mcnemar(const ContingencyTable& table) {
  if (table.a < 0 || table.b < 0 || table.c < 0 || table.d < 0)
    throw std::invalid_argument("contingency counts must be non-negative");
  McNemarResult result;
  const long long discordant = table.b + table.c;
  if (discordant == 0) return result;  // no change in prediction between models
  result.computable = true;
  const double diff = std::abs(static_cast<double>(table.b - table.c));
  const double statistic = (diff - 1.0) * (diff - 1.0) / static_cast<double>(discordant);
  result.statistic = statistic;
  result.p_value = chi_squared_upper_tail_1df(statistic);
  return result;
}

double chi_squared_upper_tail_1df(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

}  // namespace nevo
