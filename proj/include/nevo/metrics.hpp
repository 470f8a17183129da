#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace nevo {

struct ScoredLabels {
  std::vector<int> labels;     // 0 or 1
  std::vector<double> scores;  // same length
};

// Area under the ROC curve via the rank (Mann-Whitney) formulation with
// average ranks for ties: the probability that a uniformly random positive
// outscores a uniformly random negative, ties counted 1/2. Requires at
// least one positive and one negative label; throws std::invalid_argument
// otherwise.
double auc(const ScoredLabels& data);

// Paired-prediction agreement counts between two models on the same samples:
// a = both correct, b = only model 1 correct, c = only model 2 correct,
// d = both wrong.
struct ContingencyTable {
  long long a = 0;
  long long b = 0;
  long long c = 0;
  long long d = 0;

  long long total() const { return a + b + c + d; }
};

ContingencyTable build_contingency(const std::vector<int>& truth,
                                   const std::vector<int>& pred1,
                                   const std::vector<int>& pred2);

// Same counts from precomputed per-sample correctness flags.
ContingencyTable build_contingency_from_correctness(const std::vector<char>& correct1,
                                                    const std::vector<char>& correct2);

struct McNemarResult {
  bool computable = false;  // false iff b + c == 0
  std::optional<double> statistic;
  std::optional<double> p_value;
};

// Continuity-corrected McNemar chi-square, matching R's mcnemar.test:
// statistic = (|b - c| - 1)^2 / (b + c), p = chi-square(1) upper tail.
// Note R's correction overcorrects when b == c: the statistic is 1/(b+c)
// rather than 0, so p < 1 there while |b - c| = 1 gives p = 1 exactly.
// b + c == 0 has no sampling distribution and reports computable = false.
McNemarResult mcnemar(const ContingencyTable& table);

// Upper tail of the chi-square distribution with one degree of freedom,
// via erfc(sqrt(x / 2)).
double chi_squared_upper_tail_1df(double x);

}  // namespace nevo
