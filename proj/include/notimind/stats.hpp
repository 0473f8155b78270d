#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace notimind {

// Sample Pearson correlation. Throws kLengthMismatch, kTooFewSamples
// (n < 3) or kConstantInput.
double pearson(std::span<const double> x, std::span<const double> y);

// Two-sided p-value of r via t = r sqrt((n-2)/(1-r^2)) with n-2 dof.
double correlation_p_value(double r, std::size_t n);

// Two-sided permutation p-value for |r| (shuffles y). Validation route.
double correlation_permutation_p_value(std::span<const double> x, std::span<const double> y, std::size_t shuffles,
                                       std::uint64_t seed);

struct CorrelationRow {
  std::string feature;
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
  bool constant = false;  // column had no variance; r reported as 0
};

struct CorrelationReport {
  std::vector<CorrelationRow> rows;  // sorted by r, descending

  const CorrelationRow* find(std::string_view feature) const;
};

// columns[i] holds feature names[i] over all rows.
CorrelationReport correlation_table(std::span<const std::string> names, std::span<const std::vector<double>> columns,
                                    std::span<const double> scores);

// `feature,r,p,n`
std::string write_correlation_csv(const CorrelationReport& report);
CorrelationReport read_correlation_csv(std::string_view text);

// Keyboard-Out, Emoji-Count, Remove, Work, Post, Group, Multi, Screen-On, Unlock.
const std::vector<std::string>& default_feature_selection();

struct FeatureSelection {
  std::vector<std::string> features;
  std::vector<std::string> warnings;
};

// Without a threshold: the fixed nine-column list. With one: every
// candidate whose |r| >= threshold, in report order. Candidates default to
// every row of the report; a name missing from the report throws
// kUnknownFeatureName.
FeatureSelection select_features(const CorrelationReport& report, std::optional<double> threshold = std::nullopt,
                                 std::span<const std::string> candidates = {});

struct PairedTTest {
  double mean_difference = 0.0;  // mean of a - b
  double t_statistic = 0.0;
  double p_value = 1.0;
  std::size_t df = 0;
  // Zero variance of the differences: p is 1 when the mean difference is
  // 0 and 0 otherwise.
  bool degenerate = false;
};

PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b);

// Sign-flip permutation p-value for the mean paired difference.
double paired_permutation_p_value(std::span<const double> a, std::span<const double> b, std::size_t shuffles,
                                  std::uint64_t seed);

struct BonferroniResult {
  double threshold = 0.0;
  std::vector<bool> significant;
};

// Significant iff p < family_alpha / m.
BonferroniResult bonferroni(std::span<const double> p_values, double family_alpha = 0.05);

double mean(std::span<const double> values);
// Sample (n - 1) standard deviation; 0 below two values.
double sample_std(std::span<const double> values);

}  // namespace notimind
