#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "notimind/learn/classifiers.hpp"
#include "notimind/learn/dataset.hpp"
#include "notimind/stats.hpp"

namespace notimind::learn {

// counts[actual][predicted], indexed by class_index.
using Confusion = std::array<std::array<long long, kClassCount>, kClassCount>;

Confusion confusion_matrix(std::span<const int> actual, std::span<const int> predicted);

struct FMeasure {
  std::array<double, kClassCount> precision{};
  std::array<double, kClassCount> recall{};
  std::array<double, kClassCount> f{};
  // Class neither predicted nor present; its F is 0.
  std::array<bool, kClassCount> undefined{};
  double macro = 0.0;
};

// One-vs-rest precision/recall/F per class. Throws kEmptyConfusion.
FMeasure f_measure(const Confusion& confusion);

struct FoldAssignment {
  std::size_t folds = 0;
  std::vector<std::size_t> fold_of_row;
  // Leave-one-user-out: the held-out user of each fold.
  std::vector<std::string> fold_names;
  std::vector<std::string> warnings;

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
};

// Each class is shuffled and dealt round-robin over the folds, the deal
// continuing where the previous class stopped. Throws kTooFewRows if
// there are fewer rows than folds.
FoldAssignment stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);

// One fold per user in order of first appearance. Roster users with no
// rows get a warning and no fold. Throws kSingleUser.
FoldAssignment leave_one_user_out(std::span<const std::string> user_ids, std::span<const std::string> roster = {});

enum class Regime { kWithinSubject, kGlobal };

std::string regime_tag(Regime regime, std::size_t k = 15);

struct CvConfig {
  std::vector<ClassifierKind> classifiers{ClassifierKind::kAnn, ClassifierKind::kSvm, ClassifierKind::kLr};
  std::size_t k = 15;
  std::uint64_t seed = 0;
  TrainingParams params;
  double family_alpha = 0.05;
  // 0: NOTIMIND_THREADS, else hardware concurrency.
  std::size_t threads = 0;
};

struct FoldScore {
  std::string user;  // held-out user, or the user the fold belongs to
  std::size_t fold = 0;
  double f_macro = 0.0;
};

struct ClassifierResult {
  ClassifierKind kind = ClassifierKind::kAnn;
  std::vector<FoldScore> folds;
  // Paired units of the t-tests: per-user means within subjects,
  // per-fold values for the global regime.
  std::vector<double> units;
  double mean = 0.0;
  double std = 0.0;
  Confusion confusion{};
};

struct PairwiseComparison {
  ClassifierKind a = ClassifierKind::kAnn;
  ClassifierKind b = ClassifierKind::kSvm;
  PairedTTest test;
  bool significant = false;
};

struct EvaluationReport {
  Regime regime = Regime::kGlobal;
  std::size_t k = 15;
  std::vector<ClassifierResult> results;
  std::vector<PairwiseComparison> comparisons;
  double bonferroni_threshold = 0.0;
  std::vector<std::string> warnings;

  const ClassifierResult* find(ClassifierKind kind) const;
};

// Normalizer fit on each training split only. Within subjects, every
// user with at least k rows gets its own stratified k-fold run. Every
// fold derives its seeds from (seed, user, fold), so thread count does
// not change the result. Training errors are rethrown naming the fold.
EvaluationReport cross_validate(const Dataset& dataset, Regime regime, const CvConfig& config);

// classifier,regime,fold,f_macro
std::string format_report_csv(const EvaluationReport& report);
// Average / STD / Global rows, one column per classifier, then the
// pairwise tests.
std::string format_summary(const EvaluationReport* within, const EvaluationReport* global);

}  // namespace notimind::learn
