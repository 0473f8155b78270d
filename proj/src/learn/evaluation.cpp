#include "notimind/learn/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "notimind/error.hpp"
#include "notimind/rng.hpp"
#include "notimind/text.hpp"

namespace notimind::learn {

Confusion confusion_matrix(std::span<const int> actual, std::span<const int> predicted) {
  if (actual.size() != predicted.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(actual.size()) + " labels vs " +
                                                std::to_string(predicted.size()) + " predictions");
  }
  Confusion c{};
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ++c[static_cast<std::size_t>(class_index(actual[i]))][static_cast<std::size_t>(class_index(predicted[i]))];
  }
  return c;
}

FMeasure f_measure(const Confusion& confusion) {
  long long total = 0;
  for (const auto& row : confusion) {
    for (long long v : row) {
      if (v < 0) throw Error(ErrorCode::kInvalidArgument, "negative confusion count");
      total += v;
    }
  }
  if (total == 0) throw Error(ErrorCode::kEmptyConfusion, "confusion matrix has no entries");
  FMeasure out;
  double sum = 0.0;
  for (std::size_t k = 0; k < kClassCount; ++k) {
    long long predicted = 0;
    long long actual = 0;
    for (std::size_t j = 0; j < kClassCount; ++j) {
      predicted += confusion[j][k];
      actual += confusion[k][j];
    }
    const double tp = static_cast<double>(confusion[k][k]);
    out.precision[k] = predicted > 0 ? tp / static_cast<double>(predicted) : 0.0;
    out.recall[k] = actual > 0 ? tp / static_cast<double>(actual) : 0.0;
    out.undefined[k] = predicted == 0 && actual == 0;
    const double denom = out.precision[k] + out.recall[k];
    out.f[k] = denom > 0.0 ? 2.0 * out.precision[k] * out.recall[k] / denom : 0.0;
    sum += out.f[k];
  }
  out.macro = sum / kClassCount;
  return out;
}

std::vector<std::size_t> FoldAssignment::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
    if (fold_of_row[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
    if (fold_of_row[i] != fold) rows.push_back(i);
  }
  return rows;
}

FoldAssignment stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k must be at least 2");
  if (labels.size() < k) {
    throw Error(ErrorCode::kTooFewRows, std::to_string(labels.size()) + " rows for " + std::to_string(k) + " folds");
  }
  FoldAssignment out;
  out.folds = k;
  out.fold_of_row.assign(labels.size(), 0);
  std::size_t next = 0;
  for (int c = 0; c < kClassCount; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (class_index(labels[i]) == c) members.push_back(i);
    }
    if (members.empty()) continue;
    if (members.size() < k) {
      out.warnings.push_back("class " + std::to_string(class_label(c)) + " has " + std::to_string(members.size()) +
                             " rows, fewer than " + std::to_string(k) + " folds");
    }
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(c)}));
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t row : members) {
      out.fold_of_row[row] = next;
      next = (next + 1) % k;
    }
  }
  return out;
}

FoldAssignment leave_one_user_out(std::span<const std::string> user_ids, std::span<const std::string> roster) {
  FoldAssignment out;
  std::map<std::string, std::size_t> fold_of_user;
  out.fold_of_row.reserve(user_ids.size());
  for (const std::string& user : user_ids) {
    auto [it, inserted] = fold_of_user.try_emplace(user, out.fold_names.size());
    if (inserted) out.fold_names.push_back(user);
    out.fold_of_row.push_back(it->second);
  }
  for (const std::string& user : roster) {
    if (!fold_of_user.contains(user)) out.warnings.push_back("user " + user + " has no rows; fold skipped");
  }
  if (out.fold_names.size() < 2) {
    throw Error(ErrorCode::kSingleUser, "leave-one-user-out needs at least two users with rows");
  }
  out.folds = out.fold_names.size();
  return out;
}

std::string regime_tag(Regime regime, std::size_t k) {
  return regime == Regime::kGlobal ? "global_louo" : "within_subject_" + std::to_string(k) + "fold";
}

const ClassifierResult* EvaluationReport::find(ClassifierKind kind) const {
  for (const ClassifierResult& r : results) {
    if (r.kind == kind) return &r;
  }
  return nullptr;
}

namespace {

struct Task {
  std::string user;
  std::size_t fold = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct TaskResult {
  std::vector<double> f;
  std::vector<Confusion> confusion;
};

std::string strip_code(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = std::string(error_code_name(e.code())) + ": ";
  return what.starts_with(prefix) ? what.substr(prefix.size()) : what;
}

std::size_t thread_count(std::size_t requested, std::size_t tasks) {
  std::size_t n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("NOTIMIND_THREADS")) {
      if (auto parsed = parse_int(env); parsed && *parsed > 0) n = static_cast<std::size_t>(*parsed);
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, tasks));
}

TaskResult run_task(const Dataset& dataset, const Task& task, Regime regime, const CvConfig& config) {
  const Dataset train_set = dataset.subset(task.train);
  const Dataset test_set = dataset.subset(task.test);
  const NormalizationModel norm =
      fit_normalizer(train_set.features, train_set.columns, ConstantColumnPolicy::kCenterOnly);
  const Eigen::MatrixXd x_train = norm.apply(train_set.features);
  const Eigen::MatrixXd x_test = norm.apply(test_set.features);
  TaskResult out;
  for (ClassifierKind kind : config.classifiers) {
    const std::uint64_t seed = derive_seed(config.seed, {static_cast<std::uint64_t>(regime), hash_string(task.user),
                                                         task.fold, static_cast<std::uint64_t>(kind)});
    const ClassifierModel model = train(kind, x_train, train_set.labels, config.params, seed);
    const std::vector<int> predicted = predict(model, x_test);
    const Confusion c = confusion_matrix(test_set.labels, predicted);
    out.f.push_back(f_measure(c).macro);
    out.confusion.push_back(c);
  }
  return out;
}

std::vector<Task> make_tasks(const Dataset& dataset, Regime regime, const CvConfig& config,
                             std::vector<std::string>& warnings) {
  std::vector<Task> tasks;
  if (regime == Regime::kGlobal) {
    const FoldAssignment folds = leave_one_user_out(dataset.users);
    warnings.insert(warnings.end(), folds.warnings.begin(), folds.warnings.end());
    for (std::size_t f = 0; f < folds.folds; ++f) {
      tasks.push_back(Task{folds.fold_names[f], f, folds.train_rows(f), folds.test_rows(f)});
    }
    return tasks;
  }
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> rows_of;
  for (std::size_t i = 0; i < dataset.users.size(); ++i) {
    auto& rows = rows_of[dataset.users[i]];
    if (rows.empty()) order.push_back(dataset.users[i]);
    rows.push_back(i);
  }
  for (const std::string& user : order) {
    const std::vector<std::size_t>& rows = rows_of[user];
    if (rows.size() < config.k) {
      warnings.push_back("user " + user + " has " + std::to_string(rows.size()) + " rows, fewer than " +
                         std::to_string(config.k) + " folds; skipped");
      continue;
    }
    std::vector<int> labels;
    for (std::size_t r : rows) labels.push_back(dataset.labels[r]);
    const FoldAssignment folds = stratified_kfold(labels, config.k, derive_seed(config.seed, {hash_string(user)}));
    for (const std::string& w : folds.warnings) warnings.push_back("user " + user + ": " + w);
    for (std::size_t f = 0; f < folds.folds; ++f) {
      Task task{user, f, {}, {}};
      for (std::size_t local : folds.train_rows(f)) task.train.push_back(rows[local]);
      for (std::size_t local : folds.test_rows(f)) task.test.push_back(rows[local]);
      tasks.push_back(std::move(task));
    }
  }
  return tasks;
}

std::string fold_label(const EvaluationReport& report, const FoldScore& fold) {
  if (report.regime == Regime::kGlobal) return fold.user;
  return fold.user + "#" + std::to_string(fold.fold);
}

}  // namespace

EvaluationReport cross_validate(const Dataset& dataset, Regime regime, const CvConfig& config) {
  dataset.validate();
  if (config.classifiers.empty()) throw Error(ErrorCode::kInvalidArgument, "no classifiers requested");
  EvaluationReport report;
  report.regime = regime;
  report.k = config.k;
  const std::vector<Task> tasks = make_tasks(dataset, regime, config, report.warnings);
  if (tasks.empty()) throw Error(ErrorCode::kTooFewRows, "no user has enough rows for " + std::to_string(config.k) + " folds");

  std::vector<TaskResult> results(tasks.size());
  std::vector<std::exception_ptr> failures(tasks.size());
  std::atomic<std::size_t> cursor{0};
  const auto worker = [&] {
    for (std::size_t i = cursor++; i < tasks.size(); i = cursor++) {
      try {
        results[i] = run_task(dataset, tasks[i], regime, config);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = thread_count(config.threads, tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!failures[i]) continue;
    const std::string where = regime == Regime::kGlobal ? "fold " + std::to_string(tasks[i].fold) + " (user " + tasks[i].user + ")"
                                                         : "user " + tasks[i].user + " fold " + std::to_string(tasks[i].fold);
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + strip_code(e));
    }
  }

  for (std::size_t c = 0; c < config.classifiers.size(); ++c) {
    ClassifierResult r;
    r.kind = config.classifiers[c];
    std::vector<std::string> unit_users;
    std::vector<std::vector<double>> per_user;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const double f = results[i].f[c];
      r.folds.push_back(FoldScore{tasks[i].user, tasks[i].fold, f});
      for (std::size_t a = 0; a < kClassCount; ++a) {
        for (std::size_t b = 0; b < kClassCount; ++b) r.confusion[a][b] += results[i].confusion[c][a][b];
      }
      if (unit_users.empty() || unit_users.back() != tasks[i].user) {
        unit_users.push_back(tasks[i].user);
        per_user.emplace_back();
      }
      per_user.back().push_back(f);
    }
    if (regime == Regime::kGlobal) {
      for (const FoldScore& f : r.folds) r.units.push_back(f.f_macro);
    } else {
      for (const auto& values : per_user) r.units.push_back(mean(values));
    }
    r.mean = mean(r.units);
    r.std = sample_std(r.units);
    report.results.push_back(std::move(r));
  }

  std::vector<double> p_values;
  if (report.results.front().units.size() >= 2) {
    for (std::size_t a = 0; a < report.results.size(); ++a) {
      for (std::size_t b = a + 1; b < report.results.size(); ++b) {
        PairwiseComparison cmp;
        cmp.a = report.results[a].kind;
        cmp.b = report.results[b].kind;
        cmp.test = paired_t_test(report.results[a].units, report.results[b].units);
        p_values.push_back(cmp.test.p_value);
        report.comparisons.push_back(cmp);
      }
    }
  } else if (report.results.size() > 1) {
    report.warnings.push_back("fewer than two paired units; pairwise tests skipped");
  }
  if (!p_values.empty()) {
    const BonferroniResult bonf = bonferroni(p_values, config.family_alpha);
    report.bonferroni_threshold = bonf.threshold;
    for (std::size_t i = 0; i < p_values.size(); ++i) report.comparisons[i].significant = bonf.significant[i];
  }
  return report;
}

std::string format_report_csv(const EvaluationReport& report) {
  std::string out = "classifier,regime,fold,f_macro\n";
  const std::string tag = regime_tag(report.regime, report.k);
  for (const ClassifierResult& r : report.results) {
    for (const FoldScore& f : r.folds) {
      out += std::string(to_string(r.kind)) + "," + tag + "," + fold_label(report, f) + "," + format_double(f.f_macro) +
             "\n";
    }
  }
  return out;
}

namespace {

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void append_tests(std::string& out, const EvaluationReport& report) {
  out += "\npairwise " + regime_tag(report.regime, report.k);
  if (report.comparisons.empty()) {
    out += ": none\n";
    return;
  }
  out += " (bonferroni threshold " + format_fixed(report.bonferroni_threshold, 4) + ")\n";
  for (const PairwiseComparison& c : report.comparisons) {
    out += "  " + upper(to_string(c.a)) + " vs " + upper(to_string(c.b)) + "  diff " +
           format_fixed(c.test.mean_difference, 4) + "  t " + format_fixed(c.test.t_statistic, 3) + "  p " +
           format_fixed(c.test.p_value, 4) + (c.significant ? "  significant" : "  not significant") + "\n";
  }
}

}  // namespace

std::string format_summary(const EvaluationReport* within, const EvaluationReport* global) {
  std::vector<ClassifierKind> kinds;
  for (const EvaluationReport* rep : {within, global}) {
    if (!rep) continue;
    for (const ClassifierResult& r : rep->results) {
      if (std::find(kinds.begin(), kinds.end(), r.kind) == kinds.end()) kinds.push_back(r.kind);
    }
  }
  constexpr std::size_t kWidth = 10;
  std::string out = pad("", 8);
  for (ClassifierKind k : kinds) out += pad(upper(to_string(k)), kWidth);
  out += "\n";
  const auto row = [&](const std::string& name, const EvaluationReport* rep, double ClassifierResult::*field) {
    out += name + std::string(8 - name.size(), ' ');
    for (ClassifierKind k : kinds) {
      const ClassifierResult* r = rep->find(k);
      out += pad(r ? format_fixed(r->*field, 3) : "-", kWidth);
    }
    out += "\n";
  };
  if (within) {
    row("Average", within, &ClassifierResult::mean);
    row("STD", within, &ClassifierResult::std);
  }
  if (global) row("Global", global, &ClassifierResult::mean);
  for (const EvaluationReport* rep : {within, global}) {
    if (rep) append_tests(out, *rep);
  }
  for (const EvaluationReport* rep : {within, global}) {
    if (!rep) continue;
    for (const std::string& w : rep->warnings) out += "warning: " + w + "\n";
  }
  return out;
}

}  // namespace notimind::learn
