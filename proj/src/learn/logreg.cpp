#include <cmath>

#include "notimind/error.hpp"
#include "notimind/learn/classifiers.hpp"

namespace notimind::learn {

namespace {

Eigen::MatrixXd one_hot(std::span<const int> labels) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), kClassCount);
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i), class_index(labels[i])) = 1.0;
  return y;
}

Eigen::MatrixXd logits(const LogisticModel& model, const Eigen::MatrixXd& x) {
  return (x * model.weights.transpose()).rowwise() + model.bias.transpose();
}

}  // namespace

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd p = z.colwise() - z.rowwise().maxCoeff();
  p = p.array().exp();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

double logistic_loss(const LogisticModel& model, const Eigen::MatrixXd& x, std::span<const int> labels) {
  const Eigen::MatrixXd z = logits(model, x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    const double lse = m + std::log((z.row(i).array() - m).exp().sum());
    total += lse - z(i, class_index(labels[static_cast<std::size_t>(i)]));
  }
  return z.rows() > 0 ? total / static_cast<double>(z.rows()) : 0.0;
}

LogisticModel logistic_gradient(const LogisticModel& model, const Eigen::MatrixXd& x, std::span<const int> labels) {
  const double n = static_cast<double>(x.rows());
  const Eigen::MatrixXd residual = (softmax_rows(logits(model, x)) - one_hot(labels)) / n;
  return LogisticModel{residual.transpose() * x, residual.colwise().sum().transpose()};
}

LogisticModel train_logreg(const Eigen::MatrixXd& x, std::span<const int> labels, const LogisticParams& params) {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) throw Error(ErrorCode::kLengthMismatch, "rows vs labels");
  LogisticModel model{Eigen::MatrixXd::Zero(kClassCount, x.cols()), Eigen::VectorXd::Zero(kClassCount)};
  if (x.rows() == 0) return model;
  for (int epoch = 1; epoch <= params.epochs; ++epoch) {
    const LogisticModel grad = logistic_gradient(model, x, labels);
    model.weights -= params.learning_rate * grad.weights;
    model.bias -= params.learning_rate * grad.bias;
    if (!model.weights.allFinite() || !model.bias.allFinite()) {
      throw Error(ErrorCode::kNonFiniteLoss, "logistic regression diverged at epoch " + std::to_string(epoch));
    }
  }
  if (!std::isfinite(logistic_loss(model, x, labels))) {
    throw Error(ErrorCode::kNonFiniteLoss, "logistic regression loss is not finite after training");
  }
  return model;
}

}  // namespace notimind::learn
