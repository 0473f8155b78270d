#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "notimind/ingest.hpp"

namespace notimind {

// pa, na in [5,25]; balance = pa - na in [-20,20].
struct AffectScore {
  int pa = 0;
  int na = 0;
  int balance = 0;

  bool operator==(const AffectScore&) const = default;
};

AffectScore score(const PanasEntry& entry);

// Shannon entropy in bits of the distribution given by the counts.
// Throws kEmptyDistribution when every count is zero.
double entropy(std::span<const long long> counts);

// Three affect classes: balance <= cut1 -> -1, cut1 < balance <= cut2 -> 0,
// balance > cut2 -> +1.
struct DiscretizationModel {
  double cut1 = 0.0;
  double cut2 = 0.0;

  int classify(int balance) const;

  // Two lines: "cut1 <value>" and "cut2 <value>".
  std::string serialize() const;
  static DiscretizationModel parse(std::string_view text);

  bool operator==(const DiscretizationModel&) const = default;
};

// Entropy-minimising split of the score range into three bins. Every
// distinct score acts as its own label and candidate cuts sit midway
// between adjacent distinct values. The full range is split once, the
// better of the two halves is split again, and the resulting pair of
// cuts is the one with the lowest size-weighted entropy over all first
// cuts. Ties go to the lexicographically smallest (cut1, cut2).
//
// Throws kTooFewDistinctValues below three distinct scores and
// kInvalidArgument for num_classes != 3.
DiscretizationModel discretize(std::span<const int> scores, int num_classes = 3);

// Size-weighted entropy of the three bins a model induces on `scores`.
double partition_entropy(std::span<const int> scores, const DiscretizationModel& model);

inline int classify(int balance, const DiscretizationModel& model) { return model.classify(balance); }

struct DistributionSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) standard deviation, 0 for n = 1
  double fraction_positive = 0.0;
  double fraction_negative = 0.0;
  int min = 0;
  int max = 0;
};

// Throws kEmptyInput on an empty span.
DistributionSummary distribution_report(std::span<const int> scores);

}  // namespace notimind
