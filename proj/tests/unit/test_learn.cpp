#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "notimind/error.hpp"
#include "notimind/learn/classifiers.hpp"
#include "notimind/learn/dataset.hpp"
#include "notimind/learn/model_io.hpp"
#include "notimind/rng.hpp"

using namespace notimind;
using namespace notimind::learn;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
  return Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return rng.normal(); });
}

std::vector<int> random_labels(Rng& rng, int n) {
  std::vector<int> y(n);
  for (auto& v : y) v = static_cast<int>(rng.below(3)) - 1;
  return y;
}

double softmax_xent(const Eigen::VectorXd& z, int label) {
  const double m = z.maxCoeff();
  return -(z(label + 1) - m - std::log((z.array() - m).exp().sum()));
}

// Forward passes written independently of the library.
double lr_loss(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, const Eigen::MatrixXd& x, const std::vector<int>& y) {
  double total = 0;
  for (int r = 0; r < x.rows(); ++r) total += softmax_xent(w * x.row(r).transpose() + b, y[r]);
  return total / x.rows();
}

double mlp_forward_loss(const MlpModel& m, const Eigen::MatrixXd& x, const std::vector<int>& y) {
  double total = 0;
  for (int r = 0; r < x.rows(); ++r) {
    Eigen::VectorXd a = m.w1 * x.row(r).transpose() + m.b1;
    Eigen::VectorXd h = a.unaryExpr([](double v) { return 1 / (1 + std::exp(-v)); });
    total += softmax_xent(m.w2 * h + m.b2, y[r]);
  }
  return total / x.rows();
}

double rel_error(double analytic, double numeric) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-7});
  return std::fabs(analytic - numeric) / denom;
}

// Central differences of `loss` with respect to every entry of `param`.
template <typename Param, typename Loss>
double max_gradient_error(Param& param, const Param& analytic, Loss loss) {
  double worst = 0;
  const double h = 1e-5;
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double keep = param.data()[i];
    param.data()[i] = keep + h;
    const double up = loss();
    param.data()[i] = keep - h;
    const double down = loss();
    param.data()[i] = keep;
    worst = std::max(worst, rel_error(analytic.data()[i], (up - down) / (2 * h)));
  }
  return worst;
}

double accuracy(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / a.size();
}

// Four corners, XOR labelling, each corner repeated.
void xor_data(Eigen::MatrixXd& x, std::vector<int>& y, int copies) {
  x.resize(4 * copies, 2);
  y.clear();
  const double corners[4][2] = {{1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
  for (int c = 0; c < copies; ++c) {
    for (int k = 0; k < 4; ++k) {
      x.row(4 * c + k) << corners[k][0], corners[k][1];
      y.push_back(k < 2 ? 1 : -1);
    }
  }
}

// Active-set enumeration of the binary SVM dual: every alpha is pinned at
// 0, pinned at c, or free; free ones solve the KKT system together with
// the equality constraint.
double best_dual_by_enumeration(const Eigen::MatrixXd& k, const std::vector<int>& y, double c, Eigen::VectorXd& best_alpha) {
  const int n = static_cast<int>(y.size());
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  double best = -INFINITY;
  for (int code = 0; code < combos; ++code) {
    std::vector<int> state(n);
    for (int i = 0, v = code; i < n; ++i, v /= 3) state[i] = v % 3;
    std::vector<int> free;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (state[i] == 1) alpha(i) = c;
      if (state[i] == 2) free.push_back(i);
    }
    const int f = static_cast<int>(free.size());
    if (f > 0) {
      // Unknowns: free alphas and the multiplier of sum alpha_i y_i = 0.
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(f + 1, f + 1);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(f + 1);
      for (int p = 0; p < f; ++p) {
        const int i = free[p];
        for (int q = 0; q < f; ++q) a(p, q) = y[i] * y[free[q]] * k(i, free[q]);
        a(p, f) = y[i];
        double fixed = 0;
        for (int j = 0; j < n; ++j) {
          if (state[j] == 1) fixed += y[i] * y[j] * k(i, j) * c;
        }
        rhs(p) = 1 - fixed;
        a(f, p) = y[i];
      }
      double fixed_sum = 0;
      for (int j = 0; j < n; ++j) {
        if (state[j] == 1) fixed_sum += y[j] * c;
      }
      rhs(f) = -fixed_sum;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (!lu.isInvertible()) continue;
      Eigen::VectorXd sol = lu.solve(rhs);
      for (int p = 0; p < f; ++p) alpha(free[p]) = sol(p);
    }
    bool feasible = true;
    double eq = 0;
    for (int i = 0; i < n; ++i) {
      if (alpha(i) < -1e-12 || alpha(i) > c + 1e-12) feasible = false;
      eq += alpha(i) * y[i];
    }
    if (!feasible || std::fabs(eq) > 1e-9) continue;
    double obj = alpha.sum();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) obj -= 0.5 * alpha(i) * alpha(j) * y[i] * y[j] * k(i, j);
    if (obj > best) {
      best = obj;
      best_alpha = alpha;
    }
  }
  return best;
}

Eigen::MatrixXd rbf(const Eigen::MatrixXd& x, double gamma) {
  Eigen::MatrixXd k(x.rows(), x.rows());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.rows(); ++j) k(i, j) = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
  return k;
}

}  // namespace

TEST_CASE("normalizer") {
  Eigen::MatrixXd col(2, 1);
  col << 0, 10;
  auto model = fit_normalizer(col);
  auto z = model.apply(col);
  CHECK(z(0, 0) == doctest::Approx(-1 / std::sqrt(2.0)));
  CHECK(z(1, 0) == doctest::Approx(1 / std::sqrt(2.0)));

  Rng rng(1);
  Eigen::MatrixXd x = random_matrix(rng, 40, 4) * 3.0;
  x.col(2).array() += 7;
  auto fitted = fit_normalizer(x);
  auto zx = fitted.apply(x);
  for (int c = 0; c < 4; ++c) {
    const double m = zx.col(c).mean();
    const double sd = std::sqrt((zx.col(c).array() - m).square().sum() / (zx.rows() - 1));
    CHECK(std::fabs(m) < 1e-9);
    CHECK(std::fabs(sd - 1) < 1e-9);
  }
  auto again = fit_normalizer(zx).apply(zx);
  CHECK((again - zx).cwiseAbs().maxCoeff() < 1e-9);

  Eigen::MatrixXd flat(3, 2);
  flat << 1, 5, 2, 5, 3, 5;
  std::vector<std::string> names{"a", "b"};
  try {
    fit_normalizer(flat, names);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConstantColumn);
    CHECK(std::string(e.what()).find('b') != std::string::npos);
  }
  auto centered = fit_normalizer(flat, names, ConstantColumnPolicy::kCenterOnly);
  CHECK(centered.apply(flat).col(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("logistic gradient matches finite differences") {
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(100 + seed);
    Eigen::MatrixXd x = random_matrix(rng, 5, 3);
    auto y = random_labels(rng, 5);
    LogisticModel m{random_matrix(rng, 3, 3), random_matrix(rng, 3, 1).col(0)};
    auto g = logistic_gradient(m, x, y);
    CHECK(logistic_loss(m, x, y) == doctest::Approx(lr_loss(m.weights, m.bias, x, y)));
    auto loss = [&] { return lr_loss(m.weights, m.bias, x, y); };
    CHECK(max_gradient_error(m.weights, g.weights, loss) < 1e-4);
    CHECK(max_gradient_error(m.bias, g.bias, loss) < 1e-4);

    LogisticModel zero{Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Zero(3)};
    auto gz = logistic_gradient(zero, x, y);
    auto zloss = [&] { return lr_loss(zero.weights, zero.bias, x, y); };
    CHECK(max_gradient_error(zero.weights, gz.weights, zloss) < 1e-4);
  }
}

TEST_CASE("mlp gradient matches finite differences") {
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(200 + seed);
    Eigen::MatrixXd x = random_matrix(rng, 5, 3);
    auto y = random_labels(rng, 5);
    MlpModel m = init_mlp(3, 6, seed);
    auto g = mlp_gradient(m, x, y);
    CHECK(mlp_loss(m, x, y) == doctest::Approx(mlp_forward_loss(m, x, y)));
    auto loss = [&] { return mlp_forward_loss(m, x, y); };
    CHECK(max_gradient_error(m.w1, g.w1, loss) < 1e-4);
    CHECK(max_gradient_error(m.b1, g.b1, loss) < 1e-4);
    CHECK(max_gradient_error(m.w2, g.w2, loss) < 1e-4);
    CHECK(max_gradient_error(m.b2, g.b2, loss) < 1e-4);
  }
}

TEST_CASE("mlp momentum updates") {
  Rng rng(3);
  Eigen::MatrixXd x = random_matrix(rng, 6, 3);
  auto y = random_labels(rng, 6);
  MlpParams p;
  p.hidden = 4, p.learning_rate = 0.3, p.batch_size = 0, p.seed = 9;

  p.momentum = 0.0, p.epochs = 1;
  auto one = train_mlp(x, y, p);
  MlpModel start = init_mlp(3, 4, 9);
  auto g0 = mlp_gradient(start, x, y);
  CHECK((one.w1 - (start.w1 - 0.3 * g0.w1)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((one.b2 - (start.b2 - 0.3 * g0.b2)).cwiseAbs().maxCoeff() < 1e-15);

  p.momentum = 0.2, p.epochs = 2;
  auto two = train_mlp(x, y, p);
  MlpModel step1 = start;
  step1.w1 -= 0.3 * g0.w1, step1.b1 -= 0.3 * g0.b1, step1.w2 -= 0.3 * g0.w2, step1.b2 -= 0.3 * g0.b2;
  auto g1 = mlp_gradient(step1, x, y);
  Eigen::MatrixXd w1 = step1.w1 + (0.2 * (-0.3 * g0.w1) - 0.3 * g1.w1);
  CHECK((two.w1 - w1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("logistic regression fits a separable three-class set") {
  Rng rng(4);
  const double centers[3][2] = {{-4, 0}, {0, 4}, {4, 0}};
  Eigen::MatrixXd x(60, 2);
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    const int k = i % 3;
    x(i, 0) = centers[k][0] + rng.uniform(-1, 1);
    x(i, 1) = centers[k][1] + rng.uniform(-1, 1);
    y.push_back(k - 1);
  }
  // Nearest centroid separates the set perfectly, so a linear model can.
  std::vector<int> nearest;
  for (int i = 0; i < 60; ++i) {
    int best = 0;
    double dist = INFINITY;
    for (int k = 0; k < 3; ++k) {
      double d = std::hypot(x(i, 0) - centers[k][0], x(i, 1) - centers[k][1]);
      if (d < dist) dist = d, best = k;
    }
    nearest.push_back(best - 1);
  }
  REQUIRE(accuracy(nearest, y) == 1.0);
  LogisticParams p;
  p.epochs = 500;
  auto model = train_logreg(x, y, p);
  CHECK(accuracy(predict(model, x), y) == 1.0);

  p.learning_rate = 1e300;
  try {
    train_logreg(x * 1e200, y, p);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFiniteLoss);
  }
}

TEST_CASE("mlp learns xor where no linear rule can") {
  Eigen::MatrixXd x;
  std::vector<int> y;
  xor_data(x, y, 5);
  double best_linear = 0;
  for (int a = 0; a < 360; ++a) {
    const double th = a * M_PI / 180;
    for (double b = -3; b <= 3; b += 0.05) {
      std::vector<int> pred;
      for (int i = 0; i < x.rows(); ++i) pred.push_back(std::cos(th) * x(i, 0) + std::sin(th) * x(i, 1) + b > 0 ? 1 : -1);
      best_linear = std::max(best_linear, accuracy(pred, y));
    }
  }
  CHECK(best_linear <= 0.75);

  double best_mlp = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    MlpParams p;
    p.hidden = 6, p.seed = seed;
    best_mlp = std::max(best_mlp, accuracy(predict(train_mlp(x, y, p), x), y));
  }
  CHECK(best_mlp >= 0.95);
}

TEST_CASE("smo matches the symmetric four-point solution") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 1, -1, -1, 1, -1, -1, 1;
  std::vector<int> y{1, 1, -1, -1};
  const double gamma = 0.5;
  // Every row of y_i y_j K_ij sums to (1 - e^{-4 gamma})^2, so by symmetry
  // alpha = 1 / (1 - e^{-4 gamma})^2 for all four points and the bias is 0.
  const double alpha = 1 / std::pow(1 - std::exp(-4 * gamma), 2);
  auto solved = solve_smo(rbf_kernel_matrix(x, x, gamma), y, 10.0, 1e-6, 0, true);
  for (int i = 0; i < 4; ++i) CHECK(std::fabs(solved.alpha(i) - alpha) < 1e-3);
  CHECK(std::fabs(solved.bias) < 1e-3);
  CHECK(std::fabs(dual_objective(rbf(x, gamma), y, solved.alpha) - 2 * alpha) < 1e-3);
}

TEST_CASE("smo agrees with active-set enumeration on four-point problems") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd x = random_matrix(rng, 4, 2);
    std::vector<int> y{1, -1, rng.below(2) ? 1 : -1, rng.below(2) ? 1 : -1};
    const double c = 0.2 + rng.uniform() * 3;
    const double gamma = 0.2 + rng.uniform();
    Eigen::VectorXd oracle;
    const double best = best_dual_by_enumeration(rbf(x, gamma), y, c, oracle);
    auto solved = solve_smo(rbf_kernel_matrix(x, x, gamma), y, c, 1e-6, 0);
    CHECK(std::fabs(dual_objective(rbf(x, gamma), y, solved.alpha) - best) < 1e-3);
    CHECK((solved.alpha - oracle).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("smo dual objective never decreases") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + static_cast<int>(rng.below(30));
    Eigen::MatrixXd x = random_matrix(rng, n, 3);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) y[i] = x(i, 0) + 0.8 * rng.normal() > 0 ? 1 : -1;
    y[0] = 1, y[1] = -1;
    const double c = 0.1 + rng.uniform() * 5;
    auto solved = solve_smo(rbf_kernel_matrix(x, x, 0.5), y, c, 1e-3, 0, true);
    REQUIRE_FALSE(solved.objective_trace.empty());
    for (std::size_t i = 1; i < solved.objective_trace.size(); ++i) {
      CHECK(solved.objective_trace[i] >= solved.objective_trace[i - 1] - 1e-12 * std::fabs(solved.objective_trace[i - 1]));
    }
    for (int i = 0; i < n; ++i) {
      CHECK(solved.alpha(i) >= 0.0);
      CHECK(solved.alpha(i) <= c);
    }
  }
}

TEST_CASE("svm on separated blobs, flat kernel and conflicting duplicates") {
  Rng rng(7);
  Eigen::MatrixXd x(40, 2);
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    const int side = i < 20 ? -1 : 1;
    x(i, 0) = 3 * side + rng.normal(0, 0.5);
    x(i, 1) = rng.normal(0, 0.5);
    y.push_back(side);
  }
  auto model = train_svm_rbf(x, y);
  CHECK(model.machines.size() == 1);
  CHECK(accuracy(predict(model, x), y) == 1.0);

  SvmParams flat;
  flat.gamma = 1e-9;
  std::vector<int> mostly_one(40, 1);
  for (int i = 0; i < 10; ++i) mostly_one[i] = -1;
  auto pred = predict(train_svm_rbf(x, mostly_one, flat), x);
  CHECK(std::all_of(pred.begin(), pred.end(), [](int v) { return v == 1; }));

  Eigen::MatrixXd dup(4, 1);
  dup << 0, 0, 1, 1;
  std::vector<int> conflicting{-1, 1, -1, 1};
  auto solved = solve_smo(rbf_kernel_matrix(dup, dup, 1.0), conflicting, 1.0, 1e-3, 0);
  for (int i = 0; i < 4; ++i) CHECK((solved.alpha(i) >= 0 && solved.alpha(i) <= 1.0));

  std::vector<int> y3(40);
  for (int i = 0; i < 40; ++i) y3[i] = x(i, 0) < -1.5 ? -1 : x(i, 0) < 3 ? 0 : 1;
  CHECK(train_svm_rbf(x, y3).machines.size() == 3);
}

TEST_CASE("svm iteration limit is reported with the pair") {
  Rng rng(8);
  Eigen::MatrixXd x = random_matrix(rng, 30, 2);
  auto y = random_labels(rng, 30);
  SvmParams p;
  p.max_iterations = 1;
  p.c = 100;
  try {
    train_svm_rbf(x, y, p);
    FAIL("expected non-convergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoConvergence);
    CHECK(std::string(e.what()).find("pair") != std::string::npos);
  }
}

TEST_CASE("prediction conventions") {
  LogisticModel logits{Eigen::MatrixXd::Zero(3, 2), Eigen::Vector3d(2, 1, 1)};
  Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, 2);
  CHECK(predict(logits, row) == std::vector<int>{-1});
  CHECK(predict(logits, Eigen::MatrixXd(0, 2)).empty());
  CHECK_THROWS_AS(predict(logits, Eigen::MatrixXd::Zero(1, 3)), Error);
  CHECK(argmax_class(Eigen::Vector3d(1, 1, 0)) == -1);
  CHECK(argmax_class(Eigen::Vector3d(0, 2, 2)) == 0);

  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    LogisticModel m{random_matrix(rng, 3, 4), random_matrix(rng, 3, 1).col(0)};
    Eigen::MatrixXd xs = random_matrix(rng, 20, 4);
    const double scale = 0.01 + rng.uniform() * 100;
    LogisticModel scaled{m.weights * scale, m.bias * scale};
    CHECK(predict(m, xs) == predict(scaled, xs));
  }
  auto probs = softmax_rows(Eigen::MatrixXd::Constant(2, 3, 1000.0));
  CHECK(probs.row(0).sum() == doctest::Approx(1.0));
}

TEST_CASE("training is invariant to row order where the contract says so") {
  Rng rng(11);
  Eigen::MatrixXd x = random_matrix(rng, 45, 3);
  std::vector<int> y(45);
  for (int i = 0; i < 45; ++i) y[i] = x(i, 0) + 0.5 * x(i, 1) > 0.5 ? 1 : x(i, 0) < -0.5 ? -1 : 0;
  std::vector<int> perm(45);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<int>(perm));
  Eigen::MatrixXd xp(45, 3);
  std::vector<int> yp(45);
  for (int i = 0; i < 45; ++i) xp.row(i) = x.row(perm[i]), yp[i] = y[perm[i]];
  Eigen::MatrixXd probe = random_matrix(rng, 100, 3);

  CHECK(predict(train_logreg(x, y), probe) == predict(train_logreg(xp, yp), probe));
  CHECK(predict(train_svm_rbf(x, y), probe) == predict(train_svm_rbf(xp, yp), probe));
  MlpParams full;
  full.batch_size = 0, full.epochs = 200, full.seed = 3;
  CHECK(predict(train_mlp(x, y, full), probe) == predict(train_mlp(xp, yp, full), probe));
}

TEST_CASE("training is deterministic in the seed") {
  Rng rng(12);
  Eigen::MatrixXd x = random_matrix(rng, 30, 3);
  auto y = random_labels(rng, 30);
  TrainingParams params;
  params.mlp.epochs = 50;
  for (auto kind : {ClassifierKind::kAnn, ClassifierKind::kSvm, ClassifierKind::kLr, ClassifierKind::kMajority}) {
    auto a = train(kind, x, y, params, 42);
    auto b = train(kind, x, y, params, 42);
    CHECK(kind_of(a) == kind);
    CHECK(write_model({a, {"a", "b", "c"}, fit_normalizer(x)}) == write_model({b, {"a", "b", "c"}, fit_normalizer(x)}));
  }
  CHECK(parse_classifier_kind("ann") == ClassifierKind::kAnn);
  CHECK(parse_classifier_kind("svm") == ClassifierKind::kSvm);
  CHECK(parse_classifier_kind("lr") == ClassifierKind::kLr);
  CHECK_FALSE(parse_classifier_kind("knn"));
  CHECK(default_hidden_size(9) == 6);
}

TEST_CASE("model files round trip") {
  Rng rng(13);
  Eigen::MatrixXd raw = random_matrix(rng, 40, 3) * 5;
  raw.col(1).array() += 20;
  auto y = random_labels(rng, 40);
  const std::vector<std::string> cols{"k_a", "e_a", "w_a"};
  auto norm = fit_normalizer(raw, cols);
  TrainingParams params;
  params.mlp.epochs = 30;
  Eigen::MatrixXd probe = random_matrix(rng, 50, 3) * 5;
  for (auto kind : {ClassifierKind::kAnn, ClassifierKind::kSvm, ClassifierKind::kLr, ClassifierKind::kMajority}) {
    SavedModel saved{train(kind, norm.apply(raw), y, params, 1), cols, norm};
    const std::string text = write_model(saved);
    CHECK(text.rfind("notimind-model 1\n", 0) == 0);
    auto back = read_model(text);
    CHECK(back.columns == cols);
    CHECK(write_model(back) == text);
    CHECK(back.predict_raw(probe) == saved.predict_raw(probe));
  }
  std::vector<int> one_class(40, 1);
  SavedModel constant{train_svm_rbf(raw, one_class), cols, norm};
  CHECK(read_model(write_model(constant)).predict_raw(probe) == std::vector<int>(50, 1));

  CHECK_THROWS_AS(read_model("notimind-model 2\n"), Error);
  CHECK_THROWS_AS(read_model("notimind-model 1\nkind lr\ncolumns 2 a\n"), Error);
}

TEST_CASE("dataset validation and selection") {
  FeatureRow row;
  row.user_id = "u";
  row.rates = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  std::vector<FeatureRow> rows(3, row);
  rows[0].affect_class = -1, rows[1].affect_class = 0, rows[2].affect_class = 1;
  std::vector<std::string> cols{"w_a", "k_a"};
  auto ds = make_dataset(rows, cols);
  CHECK(ds.features(0, 0) == 11);
  CHECK(ds.features(0, 1) == 6);
  CHECK_NOTHROW(ds.validate());
  std::vector<std::string> bad{"hour"};
  CHECK_THROWS_AS(make_dataset(rows, bad), Error);

  rows[2].affect_class = 0;
  CHECK_THROWS_AS(make_dataset(rows, cols).validate(), Error);
  std::vector<std::size_t> pick{2, 0};
  auto sub = ds.subset(pick);
  CHECK(sub.labels == std::vector<int>{1, -1});
}
