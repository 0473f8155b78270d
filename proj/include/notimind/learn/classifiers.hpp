#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "notimind/learn/dataset.hpp"

namespace notimind::learn {

// ---------------------------------------------------------------------------
// Multinomial logistic regression.

struct LogisticModel {
  Eigen::MatrixXd weights;  // classes x features
  Eigen::VectorXd bias;     // classes
};

struct LogisticParams {
  int epochs = 500;
  double learning_rate = 0.3;
  // Weights start at zero, so the seed is unused. Kept so every trainer
  // takes the same arguments.
  std::uint64_t seed = 0;
};

// Mean cross-entropy over the rows.
double logistic_loss(const LogisticModel& model, const Eigen::MatrixXd& x, std::span<const int> labels);
// Gradient of logistic_loss, packed in the model's shape.
LogisticModel logistic_gradient(const LogisticModel& model, const Eigen::MatrixXd& x, std::span<const int> labels);
// Full-batch gradient descent. Throws kNonFiniteLoss naming the epoch.
LogisticModel train_logreg(const Eigen::MatrixXd& x, std::span<const int> labels, const LogisticParams& params = {});

// ---------------------------------------------------------------------------
// One-hidden-layer network: sigmoid hidden units, softmax output,
// cross-entropy loss, backpropagation with classical momentum.

struct MlpModel {
  Eigen::MatrixXd w1;  // hidden x features
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // classes x hidden
  Eigen::VectorXd b2;
};

struct MlpParams {
  int hidden = 0;  // 0: ceil((features + classes) / 2)
  int epochs = 500;
  double learning_rate = 0.3;
  double momentum = 0.2;
  // Rows per update; 0 means the whole training set (full batch).
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;
};

int default_hidden_size(std::size_t features);
// Uniform weights in [-0.5, 0.5] drawn from the seed.
MlpModel init_mlp(std::size_t features, int hidden, std::uint64_t seed);
double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, std::span<const int> labels);
MlpModel mlp_gradient(const MlpModel& model, const Eigen::MatrixXd& x, std::span<const int> labels);
// Batches are reshuffled every epoch unless batch = full set.
MlpModel train_mlp(const Eigen::MatrixXd& x, std::span<const int> labels, const MlpParams& params = {});

// ---------------------------------------------------------------------------
// RBF-kernel SVM, one-vs-one over the three classes.

// Binary machine separating class index `positive` (+1) from `negative`.
struct BinarySvm {
  int positive = 0;
  int negative = 1;
  Eigen::MatrixXd support_vectors;
  Eigen::VectorXd coefficients;  // alpha_i * y_i
  double bias = 0.0;

  double decision(const Eigen::VectorXd& row, double gamma) const;
};

struct SvmModel {
  double gamma = 0.0;
  double c = 1.0;
  std::size_t features = 0;
  std::vector<BinarySvm> machines;
  // Used when training saw fewer than two classes.
  std::optional<int> constant_class;
};

struct SvmParams {
  double c = 1.0;
  double gamma = 0.0;  // 0: 1 / features
  double tolerance = 1e-3;
  std::size_t max_iterations = 0;  // 0: max(10^7, 100 n)
  std::uint64_t seed = 0;          // SMO is deterministic; accepted for uniformity
};

struct SmoResult {
  Eigen::VectorXd alpha;
  double bias = 0.0;  // decision(x) = sum alpha_i y_i K(x_i, x) + bias
  std::size_t iterations = 0;
  std::vector<double> objective_trace;  // dual objective after every step
};

// Dual: max sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij,
// 0 <= alpha <= c, sum alpha_i y_i = 0. Second-order working-set
// selection; stops when the maximal KKT violation is below `tolerance`.
// Throws kNoConvergence after max_iterations.
SmoResult solve_smo(const Eigen::MatrixXd& kernel, std::span<const int> y, double c, double tolerance,
                    std::size_t max_iterations, bool trace_objective = false);

double dual_objective(const Eigen::MatrixXd& kernel, std::span<const int> y, const Eigen::VectorXd& alpha);
Eigen::MatrixXd rbf_kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma);

SvmModel train_svm_rbf(const Eigen::MatrixXd& x, std::span<const int> labels, const SvmParams& params = {});

// ---------------------------------------------------------------------------

// Predicts the most frequent training class.
struct MajorityModel {
  int label = 0;
  std::size_t features = 0;
};
MajorityModel train_majority(std::size_t features, std::span<const int> labels);

using ClassifierModel = std::variant<LogisticModel, MlpModel, SvmModel, MajorityModel>;

enum class ClassifierKind { kAnn, kSvm, kLr, kMajority };

std::string_view to_string(ClassifierKind kind);
std::optional<ClassifierKind> parse_classifier_kind(std::string_view text);
ClassifierKind kind_of(const ClassifierModel& model);
std::size_t input_arity(const ClassifierModel& model);

struct TrainingParams {
  MlpParams mlp;
  LogisticParams logreg;
  SvmParams svm;
};

ClassifierModel train(ClassifierKind kind, const Eigen::MatrixXd& x, std::span<const int> labels,
                      const TrainingParams& params, std::uint64_t seed);

// Argmax over logits with ties to the lower class index; labels in {-1,0,1}.
std::vector<int> predict(const ClassifierModel& model, const Eigen::MatrixXd& rows);

// Softmax of each row of logits.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);
int argmax_class(const Eigen::VectorXd& scores);

}  // namespace notimind::learn
