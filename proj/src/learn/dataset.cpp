#include "notimind/learn/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "notimind/error.hpp"

namespace notimind::learn {

void Dataset::validate() const {
  const auto fail = [](const std::string& why) { return Error(ErrorCode::kInvalidDataset, why); };
  if (static_cast<std::size_t>(features.rows()) != labels.size() || users.size() != labels.size()) {
    throw fail("row count mismatch between features, labels and users");
  }
  if (static_cast<std::size_t>(features.cols()) != columns.size()) throw fail("column count mismatch");
  if (!features.allFinite()) throw fail("non-finite feature value");
  std::array<std::size_t, kClassCount> seen{};
  for (int label : labels) {
    if (label < -1 || label > 1) throw fail("label outside {-1,0,1}: " + std::to_string(label));
    ++seen[static_cast<std::size_t>(class_index(label))];
  }
  if (labels.size() < static_cast<std::size_t>(kClassCount)) throw fail("fewer rows than classes");
  for (int c = 0; c < kClassCount; ++c) {
    if (seen[static_cast<std::size_t>(c)] == 0) throw fail("class " + std::to_string(class_label(c)) + " is absent");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> row_indices) const {
  Dataset out;
  out.columns = columns;
  out.features.resize(static_cast<Eigen::Index>(row_indices.size()), features.cols());
  out.labels.reserve(row_indices.size());
  out.users.reserve(row_indices.size());
  for (std::size_t i = 0; i < row_indices.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(row_indices[i]);
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(src);
    out.labels.push_back(labels[row_indices[i]]);
    out.users.push_back(users[row_indices[i]]);
  }
  return out;
}

Dataset make_dataset(std::span<const FeatureRow> rows, std::span<const std::string> columns) {
  std::vector<std::size_t> source;
  for (const std::string& name : columns) {
    const auto it = std::find(kRateFeatureNames.begin(), kRateFeatureNames.end(), name);
    if (it == kRateFeatureNames.end()) throw Error(ErrorCode::kUnknownFeatureName, name);
    source.push_back(static_cast<std::size_t>(it - kRateFeatureNames.begin()));
  }
  Dataset ds;
  ds.columns.assign(columns.begin(), columns.end());
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < source.size(); ++c) {
      ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r].rates[source[c]];
    }
    ds.labels.push_back(rows[r].affect_class);
    ds.users.push_back(rows[r].user_id);
  }
  return ds;
}

Eigen::MatrixXd NormalizationModel::apply(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != mean.size()) {
    throw Error(ErrorCode::kArityMismatch,
                "normalizer expects " + std::to_string(mean.size()) + " columns, got " + std::to_string(rows.cols()));
  }
  return (rows.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

NormalizationModel fit_normalizer(const Eigen::MatrixXd& train_rows, std::span<const std::string> columns,
                                  ConstantColumnPolicy policy) {
  if (train_rows.rows() == 0) throw Error(ErrorCode::kEmptyInput, "no training rows to normalize");
  NormalizationModel model;
  const double n = static_cast<double>(train_rows.rows());
  model.mean = train_rows.colwise().mean().transpose();
  model.scale.resize(train_rows.cols());
  for (Eigen::Index c = 0; c < train_rows.cols(); ++c) {
    const double ss = (train_rows.col(c).array() - model.mean(c)).square().sum();
    const double sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    // Relative floor: a column equal up to rounding is constant.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(model.mean(c))))) {
      if (policy == ConstantColumnPolicy::kReject) {
        const std::string name =
            static_cast<std::size_t>(c) < columns.size() ? columns[static_cast<std::size_t>(c)] : std::to_string(c);
        throw Error(ErrorCode::kConstantColumn, name);
      }
      model.scale(c) = 1.0;
    } else {
      model.scale(c) = sd;
    }
  }
  return model;
}

}  // namespace notimind::learn
