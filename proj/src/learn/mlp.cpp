#include <algorithm>
#include <cmath>
#include <numeric>

#include "notimind/error.hpp"
#include "notimind/learn/classifiers.hpp"
#include "notimind/rng.hpp"

namespace notimind::learn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

MlpModel zeros_like(const MlpModel& m) {
  return MlpModel{Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols()), Eigen::VectorXd::Zero(m.b1.size()),
                  Eigen::MatrixXd::Zero(m.w2.rows(), m.w2.cols()), Eigen::VectorXd::Zero(m.b2.size())};
}

bool all_finite(const MlpModel& m) {
  return m.w1.allFinite() && m.b1.allFinite() && m.w2.allFinite() && m.b2.allFinite();
}

// Forward/backward pass over a set of rows with preallocated scratch.
// Accumulates the mean gradient over `rows` into `grad` (overwritten)
// and returns the mean loss.
class Backprop {
 public:
  explicit Backprop(const MlpModel& model)
      : hidden_(static_cast<std::size_t>(model.w1.rows())),
        h_(hidden_),
        dh_(hidden_),
        z_(kClassCount) {}

  double run(const MlpModel& model, const RowMatrix& x, std::span<const int> labels, std::span<const std::size_t> rows,
             MlpModel& grad) {
    grad.w1.setZero();
    grad.b1.setZero();
    grad.w2.setZero();
    grad.b2.setZero();
    const std::size_t d = static_cast<std::size_t>(x.cols());
    double loss = 0.0;
    for (std::size_t r : rows) {
      const double* xr = x.data() + r * d;
      for (std::size_t j = 0; j < hidden_; ++j) {
        double a = model.b1(static_cast<Eigen::Index>(j));
        for (std::size_t c = 0; c < d; ++c) a += model.w1(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) * xr[c];
        h_[j] = sigmoid(a);
      }
      double zmax = -INFINITY;
      for (int k = 0; k < kClassCount; ++k) {
        double a = model.b2(k);
        for (std::size_t j = 0; j < hidden_; ++j) a += model.w2(k, static_cast<Eigen::Index>(j)) * h_[j];
        z_[static_cast<std::size_t>(k)] = a;
        zmax = std::max(zmax, a);
      }
      double norm = 0.0;
      for (double& v : z_) {
        v = std::exp(v - zmax);
        norm += v;
      }
      const int target = class_index(labels[r]);
      loss += -std::log(z_[static_cast<std::size_t>(target)] / norm);
      std::fill(dh_.begin(), dh_.end(), 0.0);
      for (int k = 0; k < kClassCount; ++k) {
        const double delta = z_[static_cast<std::size_t>(k)] / norm - (k == target ? 1.0 : 0.0);
        grad.b2(k) += delta;
        for (std::size_t j = 0; j < hidden_; ++j) {
          grad.w2(k, static_cast<Eigen::Index>(j)) += delta * h_[j];
          dh_[j] += delta * model.w2(k, static_cast<Eigen::Index>(j));
        }
      }
      for (std::size_t j = 0; j < hidden_; ++j) {
        const double da = dh_[j] * h_[j] * (1.0 - h_[j]);
        grad.b1(static_cast<Eigen::Index>(j)) += da;
        for (std::size_t c = 0; c < d; ++c) grad.w1(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) += da * xr[c];
      }
    }
    const double scale = rows.empty() ? 0.0 : 1.0 / static_cast<double>(rows.size());
    grad.w1 *= scale;
    grad.b1 *= scale;
    grad.w2 *= scale;
    grad.b2 *= scale;
    return loss * scale;
  }

 private:
  std::size_t hidden_;
  std::vector<double> h_;
  std::vector<double> dh_;
  std::vector<double> z_;
};

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

void check_shapes(const MlpModel& model, const Eigen::MatrixXd& x, std::span<const int> labels) {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) throw Error(ErrorCode::kLengthMismatch, "rows vs labels");
  if (x.cols() != model.w1.cols()) throw Error(ErrorCode::kArityMismatch, "input width differs from the network");
}

}  // namespace

int default_hidden_size(std::size_t features) {
  return static_cast<int>((features + static_cast<std::size_t>(kClassCount) + 1) / 2);
}

MlpModel init_mlp(std::size_t features, int hidden, std::uint64_t seed) {
  if (hidden < 1) throw Error(ErrorCode::kInvalidArgument, "hidden layer needs at least one unit");
  Rng rng(seed);
  const auto draw = [&] { return rng.uniform(-0.5, 0.5); };
  MlpModel m;
  const auto d = static_cast<Eigen::Index>(features);
  m.w1 = Eigen::MatrixXd::NullaryExpr(hidden, d, draw);
  m.b1 = Eigen::VectorXd::NullaryExpr(hidden, draw);
  m.w2 = Eigen::MatrixXd::NullaryExpr(kClassCount, hidden, draw);
  m.b2 = Eigen::VectorXd::NullaryExpr(kClassCount, draw);
  return m;
}

double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, std::span<const int> labels) {
  check_shapes(model, x, labels);
  const RowMatrix xr = x;
  MlpModel grad = zeros_like(model);
  return Backprop(model).run(model, xr, labels, all_rows(labels.size()), grad);
}

MlpModel mlp_gradient(const MlpModel& model, const Eigen::MatrixXd& x, std::span<const int> labels) {
  check_shapes(model, x, labels);
  const RowMatrix xr = x;
  MlpModel grad = zeros_like(model);
  Backprop(model).run(model, xr, labels, all_rows(labels.size()), grad);
  return grad;
}

MlpModel train_mlp(const Eigen::MatrixXd& x, std::span<const int> labels, const MlpParams& params) {
  const int hidden = params.hidden > 0 ? params.hidden : default_hidden_size(static_cast<std::size_t>(x.cols()));
  MlpModel model = init_mlp(static_cast<std::size_t>(x.cols()), hidden, params.seed);
  check_shapes(model, x, labels);
  const std::size_t n = labels.size();
  if (n == 0) return model;

  const RowMatrix xr = x;
  MlpModel grad = zeros_like(model);
  MlpModel velocity = zeros_like(model);
  Backprop backprop(model);
  std::vector<std::size_t> order = all_rows(n);
  const std::size_t batch = params.batch_size == 0 ? n : std::min(params.batch_size, n);
  Rng shuffler(derive_seed(params.seed, {0x5348554646ULL}));

  const auto step = [&](std::span<const std::size_t> rows) {
    backprop.run(model, xr, labels, rows, grad);
    velocity.w1 = params.momentum * velocity.w1 - params.learning_rate * grad.w1;
    velocity.b1 = params.momentum * velocity.b1 - params.learning_rate * grad.b1;
    velocity.w2 = params.momentum * velocity.w2 - params.learning_rate * grad.w2;
    velocity.b2 = params.momentum * velocity.b2 - params.learning_rate * grad.b2;
    model.w1 += velocity.w1;
    model.b1 += velocity.b1;
    model.w2 += velocity.w2;
    model.b2 += velocity.b2;
  };

  for (int epoch = 1; epoch <= params.epochs; ++epoch) {
    if (batch < n) shuffler.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += batch) {
      step(std::span<const std::size_t>(order).subspan(start, std::min(batch, n - start)));
    }
    if (!all_finite(model)) {
      throw Error(ErrorCode::kNonFiniteLoss, "network diverged at epoch " + std::to_string(epoch));
    }
  }
  return model;
}

}  // namespace notimind::learn
