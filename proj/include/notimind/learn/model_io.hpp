#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "notimind/learn/classifiers.hpp"
#include "notimind/learn/dataset.hpp"

namespace notimind::learn {

// A trained classifier together with the columns and normalization it
// expects. Stored as line-oriented text starting with "notimind-model 1".
struct SavedModel {
  ClassifierModel model;
  std::vector<std::string> columns;
  NormalizationModel normalization;

  // Normalizes raw feature rows, then predicts.
  std::vector<int> predict_raw(const Eigen::MatrixXd& rows) const;
};

std::string write_model(const SavedModel& saved);
// Throws kBadFormat naming the line.
SavedModel read_model(std::string_view text);

}  // namespace notimind::learn
