#include <algorithm>
#include <array>

#include "notimind/error.hpp"
#include "notimind/learn/classifiers.hpp"

namespace notimind::learn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<int> predict_svm(const SvmModel& model, const Eigen::MatrixXd& rows) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    if (model.constant_class) {
      out.push_back(*model.constant_class);
      continue;
    }
    const Eigen::VectorXd row = rows.row(r).transpose();
    std::array<int, kClassCount> votes{};
    std::array<double, kClassCount> margin{};
    for (const BinarySvm& machine : model.machines) {
      const double d = machine.decision(row, model.gamma);
      ++votes[static_cast<std::size_t>(d > 0.0 ? machine.positive : machine.negative)];
      margin[static_cast<std::size_t>(machine.positive)] += d;
      margin[static_cast<std::size_t>(machine.negative)] -= d;
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < kClassCount; ++k) {
      if (votes[k] > votes[best] || (votes[k] == votes[best] && margin[k] > margin[best])) best = k;
    }
    out.push_back(class_label(static_cast<int>(best)));
  }
  return out;
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& scores) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) out.push_back(argmax_class(scores.row(r).transpose()));
  return out;
}

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

}  // namespace

int argmax_class(const Eigen::VectorXd& scores) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < scores.size(); ++k) {
    if (scores(k) > scores(best)) best = k;
  }
  return class_label(static_cast<int>(best));
}

MajorityModel train_majority(std::size_t features, std::span<const int> labels) {
  std::array<std::size_t, kClassCount> counts{};
  for (int label : labels) ++counts[static_cast<std::size_t>(class_index(label))];
  const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
  return MajorityModel{class_label(static_cast<int>(best)), features};
}

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kAnn: return "ann";
    case ClassifierKind::kSvm: return "svm";
    case ClassifierKind::kLr: return "lr";
    case ClassifierKind::kMajority: return "majority";
  }
  return "?";
}

std::optional<ClassifierKind> parse_classifier_kind(std::string_view text) {
  for (ClassifierKind k : {ClassifierKind::kAnn, ClassifierKind::kSvm, ClassifierKind::kLr, ClassifierKind::kMajority}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

ClassifierKind kind_of(const ClassifierModel& model) {
  return std::visit(Overloaded{[](const LogisticModel&) { return ClassifierKind::kLr; },
                               [](const MlpModel&) { return ClassifierKind::kAnn; },
                               [](const SvmModel&) { return ClassifierKind::kSvm; },
                               [](const MajorityModel&) { return ClassifierKind::kMajority; }},
                    model);
}

std::size_t input_arity(const ClassifierModel& model) {
  return std::visit(Overloaded{[](const LogisticModel& m) { return static_cast<std::size_t>(m.weights.cols()); },
                               [](const MlpModel& m) { return static_cast<std::size_t>(m.w1.cols()); },
                               [](const SvmModel& m) { return m.features; },
                               [](const MajorityModel& m) { return m.features; }},
                    model);
}

ClassifierModel train(ClassifierKind kind, const Eigen::MatrixXd& x, std::span<const int> labels,
                      const TrainingParams& params, std::uint64_t seed) {
  switch (kind) {
    case ClassifierKind::kAnn: {
      MlpParams p = params.mlp;
      p.seed = seed;
      return train_mlp(x, labels, p);
    }
    case ClassifierKind::kSvm: {
      SvmParams p = params.svm;
      p.seed = seed;
      return train_svm_rbf(x, labels, p);
    }
    case ClassifierKind::kLr: {
      LogisticParams p = params.logreg;
      p.seed = seed;
      return train_logreg(x, labels, p);
    }
    case ClassifierKind::kMajority:
      return train_majority(static_cast<std::size_t>(x.cols()), labels);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown classifier kind");
}

std::vector<int> predict(const ClassifierModel& model, const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) return {};
  if (static_cast<std::size_t>(rows.cols()) != input_arity(model)) {
    throw Error(ErrorCode::kArityMismatch, "model expects " + std::to_string(input_arity(model)) + " columns, got " +
                                               std::to_string(rows.cols()));
  }
  return std::visit(
      Overloaded{
          [&](const LogisticModel& m) {
            return argmax_rows((rows * m.weights.transpose()).rowwise() + m.bias.transpose());
          },
          [&](const MlpModel& m) {
            const Eigen::MatrixXd hidden = sigmoid((rows * m.w1.transpose()).rowwise() + m.b1.transpose());
            return argmax_rows((hidden * m.w2.transpose()).rowwise() + m.b2.transpose());
          },
          [&](const SvmModel& m) { return predict_svm(m, rows); },
          [&](const MajorityModel& m) { return std::vector<int>(static_cast<std::size_t>(rows.rows()), m.label); }},
      model);
}

}  // namespace notimind::learn
