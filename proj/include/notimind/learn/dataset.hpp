#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "notimind/segment.hpp"

namespace notimind::learn {

inline constexpr int kClassCount = 3;
// Fixed class ordering (-1, 0, +1) <-> index (0, 1, 2).
constexpr int class_index(int label) { return label + 1; }
constexpr int class_label(int index) { return index - 1; }

struct Dataset {
  Eigen::MatrixXd features;  // rows = segments
  std::vector<int> labels;   // -1, 0, +1
  std::vector<std::string> users;
  std::vector<std::string> columns;

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return columns.size(); }

  // Shape agreement, finite values, labels in {-1,0,1}, rows >= classes
  // and every class present. Throws kInvalidDataset.
  void validate() const;

  Dataset subset(std::span<const std::size_t> row_indices) const;
};

// Picks the named rate columns out of feature-table rows.
// Throws kUnknownFeatureName for names outside the rate block.
Dataset make_dataset(std::span<const FeatureRow> rows, std::span<const std::string> columns);

enum class ConstantColumnPolicy {
  kReject,      // throw kConstantColumn
  kCenterOnly,  // keep the column, divide by 1
};

// Per-column z-score with the sample (n - 1) standard deviation.
struct NormalizationModel {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
};

NormalizationModel fit_normalizer(const Eigen::MatrixXd& train_rows, std::span<const std::string> columns = {},
                                  ConstantColumnPolicy policy = ConstantColumnPolicy::kReject);

}  // namespace notimind::learn
