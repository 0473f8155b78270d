#include <algorithm>
#include <cmath>
#include <limits>

#include "notimind/error.hpp"
#include "notimind/learn/classifiers.hpp"

namespace notimind::learn {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Eigen::MatrixXd rbf_kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma) {
  const Eigen::VectorXd an = a.rowwise().squaredNorm();
  const Eigen::VectorXd bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (a * b.transpose());
  d2.colwise() += an;
  d2.rowwise() += bn.transpose();
  return (-gamma * d2.array().max(0.0)).exp().matrix();
}

double dual_objective(const Eigen::MatrixXd& kernel, std::span<const int> y, const Eigen::VectorXd& alpha) {
  Eigen::VectorXd ya(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) ya(i) = alpha(i) * y[static_cast<std::size_t>(i)];
  return alpha.sum() - 0.5 * ya.dot(kernel * ya);
}

SmoResult solve_smo(const Eigen::MatrixXd& kernel, std::span<const int> y, double c, double tolerance,
                    std::size_t max_iterations, bool trace_objective) {
  const auto n = static_cast<Eigen::Index>(y.size());
  if (kernel.rows() != n || kernel.cols() != n) throw Error(ErrorCode::kLengthMismatch, "kernel vs labels");
  for (int v : y) {
    if (v != 1 && v != -1) throw Error(ErrorCode::kInvalidArgument, "binary labels must be +1/-1");
  }
  if (!(c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "C must be positive");
  if (max_iterations == 0) max_iterations = std::max<std::size_t>(10'000'000, 100 * y.size());

  const auto yi = [&](Eigen::Index i) { return static_cast<double>(y[static_cast<std::size_t>(i)]); };
  const auto q = [&](Eigen::Index i, Eigen::Index j) { return yi(i) * yi(j) * kernel(i, j); };

  SmoResult result;
  Eigen::VectorXd& alpha = result.alpha;
  alpha = Eigen::VectorXd::Zero(n);
  // Gradient of f(alpha) = 1/2 a'Qa - e'a, the negated dual.
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  const auto upper = [&](Eigen::Index i) { return alpha(i) >= c; };
  const auto lower = [&](Eigen::Index i) { return alpha(i) <= 0.0; };
  const auto objective = [&] {
    double w = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) w += alpha(i) * (1.0 - grad(i));
    return 0.5 * w;
  };

  while (true) {
    // Working set: maximal violating i, then j by second-order gain.
    double gmax = -kInf, gmax2 = -kInf;
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y[static_cast<std::size_t>(t)] == 1) {
        if (!upper(t) && -grad(t) >= gmax) gmax = -grad(t), i = t;
      } else {
        if (!lower(t) && grad(t) >= gmax) gmax = grad(t), i = t;
      }
    }
    double best_gain = kInf;
    if (i != -1) {
      for (Eigen::Index t = 0; t < n; ++t) {
        double grad_diff;
        if (y[static_cast<std::size_t>(t)] == 1) {
          if (lower(t)) continue;
          grad_diff = gmax + grad(t);
          gmax2 = std::max(gmax2, grad(t));
        } else {
          if (upper(t)) continue;
          grad_diff = gmax - grad(t);
          gmax2 = std::max(gmax2, -grad(t));
        }
        if (grad_diff <= 0.0) continue;
        double quad = kernel(i, i) + kernel(t, t) - 2.0 * kernel(t, i);
        if (quad <= 0.0) quad = kTau;
        const double gain = -(grad_diff * grad_diff) / quad;
        if (gain <= best_gain) best_gain = gain, j = t;
      }
    }
    if (i == -1 || j == -1 || gmax + gmax2 < tolerance) break;
    if (result.iterations >= max_iterations) {
      throw Error(ErrorCode::kNoConvergence, "SMO stopped after " + std::to_string(result.iterations) + " iterations");
    }
    ++result.iterations;

    const double old_i = alpha(i), old_j = alpha(j);
    if (y[static_cast<std::size_t>(i)] != y[static_cast<std::size_t>(j)]) {
      double quad = kernel(i, i) + kernel(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0.0) {
        if (alpha(j) < 0.0) alpha(j) = 0.0, alpha(i) = diff;
      } else {
        if (alpha(i) < 0.0) alpha(i) = 0.0, alpha(j) = -diff;
      }
      if (diff > 0.0) {
        if (alpha(i) > c) alpha(i) = c, alpha(j) = c - diff;
      } else {
        if (alpha(j) > c) alpha(j) = c, alpha(i) = c + diff;
      }
    } else {
      double quad = kernel(i, i) + kernel(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) alpha(i) = c, alpha(j) = sum - c;
      } else {
        if (alpha(j) < 0.0) alpha(j) = 0.0, alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) alpha(j) = c, alpha(i) = sum - c;
      } else {
        if (alpha(i) < 0.0) alpha(i) = 0.0, alpha(j) = sum;
      }
    }
    const double di = alpha(i) - old_i, dj = alpha(j) - old_j;
    for (Eigen::Index t = 0; t < n; ++t) grad(t) += q(t, i) * di + q(t, j) * dj;
    if (trace_objective) result.objective_trace.push_back(objective());
  }

  // rho from the free vectors, or the midpoint of the feasible interval.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  std::size_t free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = yi(t) * grad(t);
    if (upper(t)) {
      if (y[static_cast<std::size_t>(t)] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[static_cast<std::size_t>(t)] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free_count;
      sum_free += yg;
    }
  }
  double rho;
  if (free_count > 0) rho = sum_free / static_cast<double>(free_count);
  else if (std::isfinite(ub) && std::isfinite(lb)) rho = (ub + lb) / 2.0;
  else rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
  result.bias = -rho;
  return result;
}

double BinarySvm::decision(const Eigen::VectorXd& row, double gamma) const {
  double total = bias;
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
    total += coefficients(i) * std::exp(-gamma * (support_vectors.row(i).transpose() - row).squaredNorm());
  }
  return total;
}

SvmModel train_svm_rbf(const Eigen::MatrixXd& x, std::span<const int> labels, const SvmParams& params) {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) throw Error(ErrorCode::kLengthMismatch, "rows vs labels");
  SvmModel model;
  model.features = static_cast<std::size_t>(x.cols());
  model.c = params.c;
  model.gamma = params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(std::max<Eigen::Index>(1, x.cols()));

  std::array<std::vector<std::size_t>, kClassCount> members;
  for (std::size_t r = 0; r < labels.size(); ++r) members[static_cast<std::size_t>(class_index(labels[r]))].push_back(r);
  std::vector<int> present;
  for (int k = 0; k < kClassCount; ++k) {
    if (!members[static_cast<std::size_t>(k)].empty()) present.push_back(k);
  }
  if (present.size() < 2) {
    model.constant_class = present.empty() ? 0 : class_label(present.front());
    return model;
  }

  for (std::size_t a = 0; a < present.size(); ++a) {
    for (std::size_t b = a + 1; b < present.size(); ++b) {
      const auto& pos = members[static_cast<std::size_t>(present[a])];
      const auto& neg = members[static_cast<std::size_t>(present[b])];
      const auto m = static_cast<Eigen::Index>(pos.size() + neg.size());
      Eigen::MatrixXd sub(m, x.cols());
      std::vector<int> y;
      y.reserve(static_cast<std::size_t>(m));
      Eigen::Index r = 0;
      for (std::size_t idx : pos) sub.row(r++) = x.row(static_cast<Eigen::Index>(idx)), y.push_back(1);
      for (std::size_t idx : neg) sub.row(r++) = x.row(static_cast<Eigen::Index>(idx)), y.push_back(-1);

      SmoResult solved;
      try {
        solved = solve_smo(rbf_kernel_matrix(sub, sub, model.gamma), y, params.c, params.tolerance,
                           params.max_iterations);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " (pair " + std::to_string(class_label(present[a])) + " vs " +
                                  std::to_string(class_label(present[b])) + ")");
      }
      BinarySvm machine;
      machine.positive = present[a];
      machine.negative = present[b];
      machine.bias = solved.bias;
      std::vector<Eigen::Index> support;
      for (Eigen::Index t = 0; t < m; ++t) {
        if (solved.alpha(t) > 0.0) support.push_back(t);
      }
      machine.support_vectors.resize(static_cast<Eigen::Index>(support.size()), x.cols());
      machine.coefficients.resize(static_cast<Eigen::Index>(support.size()));
      for (std::size_t s = 0; s < support.size(); ++s) {
        machine.support_vectors.row(static_cast<Eigen::Index>(s)) = sub.row(support[s]);
        machine.coefficients(static_cast<Eigen::Index>(s)) = solved.alpha(support[s]) * y[static_cast<std::size_t>(support[s])];
      }
      model.machines.push_back(std::move(machine));
    }
  }
  return model;
}

}  // namespace notimind::learn
