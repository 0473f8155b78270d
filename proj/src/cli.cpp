#include "notimind/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "notimind/enrich.hpp"
#include "notimind/error.hpp"
#include "notimind/ingest.hpp"
#include "notimind/learn/evaluation.hpp"
#include "notimind/learn/model_io.hpp"
#include "notimind/pipeline.hpp"
#include "notimind/rng.hpp"
#include "notimind/stats.hpp"
#include "notimind/synth.hpp"
#include "notimind/text.hpp"

namespace notimind {

namespace {

namespace fs = std::filesystem;
using namespace notimind::learn;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string config;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--seed", common.seed, "64-bit seed");
  cmd->add_option("--out", common.out, "output directory");
  cmd->add_option("--config", common.config, "key=value file; flags win");
}

// Fills every option the command line left unset from the config file.
void apply_config(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  for (const KeyValue& kv : parse_key_value(read_file(path))) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + kv.key);
    if (opt == nullptr || kv.key == "config") {
      throw UsageError(path + ":" + std::to_string(kv.line) + ": unknown key '" + kv.key + "' for " + cmd->get_name());
    }
    if (opt->count() > 0) continue;
    opt->add_result(kv.value);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(path + ":" + std::to_string(kv.line) + ": " + e.what());
    }
  }
}

std::string out_path(const Common& common, const std::string& name) { return (fs::path(common.out) / name).string(); }

void ensure_out(const Common& common) {
  std::error_code ec;
  fs::create_directories(common.out, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + common.out + ": " + ec.message());
}

template <typename F>
auto stage(std::string_view name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    const std::string what = e.what();
    const std::string prefix = std::string(error_code_name(e.code())) + ": ";
    throw Error(e.code(), std::string(name) + ": " + (what.starts_with(prefix) ? what.substr(prefix.size()) : what));
  }
}

EventLog load_events(const std::string& path) {
  std::istringstream in(read_file(path));
  return parse_event_log(in);
}

PanasLog load_panas(const std::string& path) {
  std::istringstream in(read_file(path));
  return parse_panas_log(in);
}

std::string format_parse_errors(std::string_view file, std::span<const ParseError> errors) {
  std::string out;
  for (const ParseError& e : errors) out += std::string(file) + ":" + e.message() + "\n";
  return out;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  Common common;
  std::string events;
  std::string panas;
  bool lenient = false;
};

void require(const std::string& value, std::string_view flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required (flag or config key)");
}

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  require(a.events, "--events");
  require(a.panas, "--panas");
  const EventLog events = stage("ingest events", [&] { return load_events(a.events); });
  const PanasLog panas = stage("ingest panas", [&] { return load_panas(a.panas); });
  ensure_out(a.common);
  std::string ev_text;
  for (const NotificationEvent& e : events.events) ev_text += to_json_line(e) + "\n";
  std::string pa_text;
  for (const PanasEntry& e : panas.entries) pa_text += to_json_line(e) + "\n";
  write_file(out_path(a.common, "events.jsonl"), ev_text);
  write_file(out_path(a.common, "panas.jsonl"), pa_text);
  write_file(out_path(a.common, "parse_errors.txt"),
             format_parse_errors("events", events.errors) + format_parse_errors("panas", panas.errors));
  const std::size_t errors = events.errors.size() + panas.errors.size();
  out << "events: " << events.events.size() << " records, " << events.errors.size() << " errors\n"
      << "panas: " << panas.entries.size() << " records, " << panas.errors.size() << " errors\n";
  if (errors > 0 && !a.lenient) {
    out << errors << " parse errors; see parse_errors.txt (use --lenient to accept)\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct FeaturesArgs {
  Common common;
  std::string events;
  std::string panas;
  std::string detectors;
  double max_gap_hours = 10.0;
  double emoji_cap = kDefaultEmojiRateCap;
  bool lenient = false;
};

std::string features_summary(const FeatureTable& t) {
  const DistributionSummary& d = t.distribution;
  std::string s;
  s += "affect score distribution\n";
  s += "  entries   " + std::to_string(d.n) + "\n";
  s += "  mean      " + format_fixed(d.mean, 2) + "\n";
  s += "  std       " + format_fixed(d.std, 2) + "\n";
  s += "  positive  " + format_fixed(100.0 * d.fraction_positive, 1) + "%\n";
  s += "  negative  " + format_fixed(100.0 * d.fraction_negative, 1) + "%\n";
  s += "  range     " + std::to_string(d.min) + " .. " + std::to_string(d.max) + "\n";
  s += "discretization\n";
  s += "  cut1      " + format_double(t.discretization.cut1) + "\n";
  s += "  cut2      " + format_double(t.discretization.cut2) + "\n";
  std::array<std::size_t, 3> classes{};
  for (const FeatureRow& r : t.rows) ++classes[static_cast<std::size_t>(r.affect_class + 1)];
  s += "  class -1  " + std::to_string(classes[0]) + "\n";
  s += "  class  0  " + std::to_string(classes[1]) + "\n";
  s += "  class +1  " + std::to_string(classes[2]) + "\n";
  s += "segments\n";
  s += "  retained  " + std::to_string(t.segmentation.segments.size()) + "\n";
  s += "  dismissed " + std::to_string(t.segmentation.dismissed.size()) + "\n";
  s += "  events    " + std::to_string(t.segmentation.assigned_events) + " assigned, " +
       std::to_string(t.segmentation.dropped_events) + " dropped\n";
  s += "overall state shares\n";
  constexpr std::array<std::string_view, 6> kStates = {"p_a", "r_a", "o_a", "f_a", "u_a", "k_a"};
  for (std::size_t i = 0; i < kStates.size(); ++i) {
    std::string label(rate_feature_label(kStates[i]));
    label.resize(14, ' ');
    s += "  " + label + format_fixed(t.state_shares[i], 1) + "%\n";
  }
  return s;
}

int cmd_features(const FeaturesArgs& a, std::ostream& out) {
  require(a.events, "--events");
  require(a.panas, "--panas");
  if (!(a.max_gap_hours > 0)) throw UsageError("--max-gap-hours must be positive");
  const EventLog events = stage("ingest events", [&] { return load_events(a.events); });
  const PanasLog panas = stage("ingest panas", [&] { return load_panas(a.panas); });
  const std::size_t errors = events.errors.size() + panas.errors.size();
  if (errors > 0 && !a.lenient) {
    throw Error(ErrorCode::kBadFormat, "ingest: " + std::to_string(errors) + " parse errors (use --lenient to skip them)");
  }
  const DetectorConfig detectors =
      stage("enrich", [&] { return a.detectors.empty() ? DetectorConfig{} : DetectorConfig::load(a.detectors); });
  const Enricher enricher = stage("enrich", [&] { return Enricher(detectors); });
  const auto max_gap = std::chrono::milliseconds(std::llround(a.max_gap_hours * 3600.0 * 1000.0));
  const FeatureTable table = stage("features", [&] {
    return build_feature_table(events.events, panas.entries, enricher, max_gap, a.emoji_cap);
  });
  ensure_out(a.common);
  write_file(out_path(a.common, "features.csv"), write_feature_csv(table.rows));
  write_file(out_path(a.common, "summary.txt"), features_summary(table));
  write_file(out_path(a.common, "discretization.txt"), table.discretization.serialize());
  std::string dismissed = "user,t_start,t_end,events\n";
  for (const DismissedSegment& d : table.segmentation.dismissed) {
    dismissed += d.user_id + "," + format_timestamp(d.t_start) + "," + format_timestamp(d.t_end) + "," +
                 std::to_string(d.events) + "\n";
  }
  write_file(out_path(a.common, "dismissed.csv"), dismissed);
  out << "segments: " << table.rows.size() << " retained, " << table.segmentation.dismissed.size()
      << " dismissed (gap > " << format_double(a.max_gap_hours) << " h)\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct CorrelateArgs {
  Common common;
  std::string features;
};

int cmd_correlate(const CorrelateArgs& a, std::ostream& out) {
  require(a.features, "--features");
  const std::vector<FeatureRow> rows = stage("read features", [&] { return read_feature_csv(read_file(a.features)); });
  const CorrelationReport report = stage("correlate", [&] {
    std::vector<std::string> names(kRateFeatureNames.begin(), kRateFeatureNames.end());
    std::vector<std::vector<double>> columns(kRateFeatureCount);
    std::vector<double> scores;
    for (const FeatureRow& r : rows) {
      for (std::size_t c = 0; c < kRateFeatureCount; ++c) columns[c].push_back(r.rates[c]);
      scores.push_back(r.score);
    }
    return correlation_table(names, columns, scores);
  });
  ensure_out(a.common);
  write_file(out_path(a.common, "correlations.csv"), write_correlation_csv(report));
  for (const CorrelationRow& r : report.rows) {
    std::string label(rate_feature_label(r.feature));
    label.resize(14, ' ');
    out << label << (r.r < 0 ? "" : " ") << format_fixed(r.r, 3) << "  p " << format_fixed(r.p, 4)
        << (r.constant ? "  (constant)" : "") << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string features;
  std::string regime = "both";
  std::string classifiers = "ann,svm,lr";
  std::string selection = "default";
  std::size_t k = 15;
  int hidden = 0;
  int epochs = 500;
  double learning_rate = 0.3;
  double momentum = 0.2;
  std::size_t batch_size = 0;
  int lr_epochs = 500;
  double lr_learning_rate = 0.3;
  double svm_c = 1.0;
  double svm_gamma = 0.0;
  double family_alpha = 0.05;
  std::size_t threads = 0;
};

std::vector<ClassifierKind> parse_kinds(const std::string& text) {
  std::vector<ClassifierKind> kinds;
  for (std::string_view token : split(text, ',')) {
    const auto kind = parse_classifier_kind(to_lower(trim(token)));
    if (!kind) throw UsageError("unknown classifier '" + std::string(token) + "' (expected ann, svm, lr, majority)");
    if (std::find(kinds.begin(), kinds.end(), *kind) != kinds.end()) {
      throw UsageError("classifier '" + std::string(token) + "' listed twice");
    }
    kinds.push_back(*kind);
  }
  if (kinds.empty()) throw UsageError("no classifiers given");
  return kinds;
}

std::vector<std::string> choose_columns(const TrainArgs& a, std::span<const FeatureRow> rows,
                                        std::vector<std::string>& warnings) {
  if (a.selection == "default") return default_feature_selection();
  if (a.selection.starts_with("threshold:")) {
    const auto t = parse_double(std::string_view(a.selection).substr(10));
    if (!t || *t < 0 || *t > 1) throw UsageError("bad selection threshold in '" + a.selection + "'");
    std::vector<std::string> names(kRateFeatureNames.begin(), kRateFeatureNames.end());
    std::vector<std::vector<double>> columns(kRateFeatureCount);
    std::vector<double> scores;
    for (const FeatureRow& r : rows) {
      for (std::size_t c = 0; c < kRateFeatureCount; ++c) columns[c].push_back(r.rates[c]);
      scores.push_back(r.score);
    }
    FeatureSelection sel = select_features(correlation_table(names, columns, scores), *t);
    warnings.insert(warnings.end(), sel.warnings.begin(), sel.warnings.end());
    if (sel.features.empty()) throw Error(ErrorCode::kInvalidArgument, "no feature reaches |r| >= " + format_double(*t));
    return sel.features;
  }
  std::vector<std::string> columns;
  for (std::string_view token : split(a.selection, ',')) columns.emplace_back(trim(token));
  return columns;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  require(a.features, "--features");
  const std::vector<ClassifierKind> kinds = parse_kinds(a.classifiers);
  std::vector<Regime> regimes;
  if (a.regime == "within" || a.regime == "both") regimes.push_back(Regime::kWithinSubject);
  if (a.regime == "global" || a.regime == "both") regimes.push_back(Regime::kGlobal);
  if (regimes.empty()) throw UsageError("--regime must be within, global or both");
  if (a.k < 2) throw UsageError("--k must be at least 2");

  const std::vector<FeatureRow> rows = stage("read features", [&] { return read_feature_csv(read_file(a.features)); });
  std::vector<std::string> warnings;
  const std::vector<std::string> columns = stage("select", [&] { return choose_columns(a, rows, warnings); });
  const Dataset dataset = stage("dataset", [&] {
    Dataset ds = make_dataset(rows, columns);
    ds.validate();
    return ds;
  });

  CvConfig cfg;
  cfg.classifiers = kinds;
  cfg.k = a.k;
  cfg.seed = a.common.seed;
  cfg.family_alpha = a.family_alpha;
  cfg.threads = a.threads;
  cfg.params.mlp.hidden = a.hidden;
  cfg.params.mlp.epochs = a.epochs;
  cfg.params.mlp.learning_rate = a.learning_rate;
  cfg.params.mlp.momentum = a.momentum;
  cfg.params.mlp.batch_size = a.batch_size;
  cfg.params.logreg.epochs = a.lr_epochs;
  cfg.params.logreg.learning_rate = a.lr_learning_rate;
  cfg.params.svm.c = a.svm_c;
  cfg.params.svm.gamma = a.svm_gamma;

  std::optional<EvaluationReport> within;
  std::optional<EvaluationReport> global;
  for (Regime regime : regimes) {
    EvaluationReport rep = stage(regime_tag(regime, a.k), [&] { return cross_validate(dataset, regime, cfg); });
    (regime == Regime::kGlobal ? global : within) = std::move(rep);
  }

  ensure_out(a.common);
  std::string csv = "classifier,regime,fold,f_macro\n";
  for (const auto* rep : {within ? &*within : nullptr, global ? &*global : nullptr}) {
    if (!rep) continue;
    const std::string body = format_report_csv(*rep);
    csv += body.substr(body.find('\n') + 1);
  }
  write_file(out_path(a.common, "report.csv"), csv);
  std::string summary = "features: ";
  for (std::size_t i = 0; i < columns.size(); ++i) summary += (i ? "," : "") + columns[i];
  summary += "\n\n" + format_summary(within ? &*within : nullptr, global ? &*global : nullptr);
  for (const std::string& w : warnings) summary += "warning: " + w + "\n";
  write_file(out_path(a.common, "summary.txt"), summary);

  stage("final models", [&] {
    const NormalizationModel norm = fit_normalizer(dataset.features, dataset.columns);
    const Eigen::MatrixXd x = norm.apply(dataset.features);
    for (ClassifierKind kind : kinds) {
      SavedModel saved{train(kind, x, dataset.labels, cfg.params,
                             derive_seed(a.common.seed, {hash_string("final"), static_cast<std::uint64_t>(kind)})),
                       dataset.columns, norm};
      write_file(out_path(a.common, "model_" + std::string(to_string(kind)) + ".txt"), write_model(saved));
    }
    return 0;
  });
  out << summary;
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::string spec;
  bool verify = false;
};

int cmd_synth(const SynthArgs& a, CLI::App* cmd, std::ostream& out) {
  CohortSpec spec = stage("spec", [&] { return a.spec.empty() ? CohortSpec{} : parse_cohort_spec(read_file(a.spec)); });
  if (cmd->get_option("--seed")->count() > 0) spec.seed = a.common.seed;
  const Cohort cohort = stage("synth", [&] { return generate_cohort(spec); });
  ensure_out(a.common);
  write_file(out_path(a.common, "events.jsonl"), write_events_jsonl(cohort.events));
  write_file(out_path(a.common, "panas.jsonl"), write_panas_jsonl(cohort.panas));
  write_file(out_path(a.common, "ground_truth.csv"), write_truth_csv(cohort.truth));
  out << "users: " << spec.users << ", reports: " << cohort.panas.size() << ", events: " << cohort.events.size()
      << ", segments: " << cohort.truth.size() << "\n";
  if (a.verify) {
    const VerifyReport report = verify_cohort(cohort.events, cohort.panas, cohort.truth);
    out << "verify: " << report.checked << " segments checked, " << report.mismatches << " mismatches\n";
    for (const SegmentMismatch& m : report.first) {
      out << "  " << m.user_id << " " << format_timestamp(m.t_end) << ": " << m.detail << "\n";
    }
    if (!report.ok()) return 1;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"notimind: notification logs to affect classifiers"};
  app.name("notimind");
  app.require_subcommand(1);

  IngestArgs ingest;
  CLI::App* c_ingest = app.add_subcommand("ingest", "parse and validate event and PANAS logs");
  add_common(c_ingest, ingest.common);
  c_ingest->add_option("--events", ingest.events, "notification event log (JSON lines)");
  c_ingest->add_option("--panas", ingest.panas, "PANAS log (JSON lines)");
  c_ingest->add_flag("--lenient", ingest.lenient, "exit 0 even with parse errors");

  FeaturesArgs features;
  CLI::App* c_features = app.add_subcommand("features", "build the per-segment feature table");
  add_common(c_features, features.common);
  c_features->add_option("--events", features.events, "notification event log");
  c_features->add_option("--panas", features.panas, "PANAS log");
  c_features->add_option("--detectors", features.detectors, "detector config file");
  c_features->add_option("--max-gap-hours", features.max_gap_hours, "longest kept gap between reports");
  c_features->add_option("--emoji-cap", features.emoji_cap, "cap for the emoji rate");
  c_features->add_flag("--lenient", features.lenient, "skip unparseable lines");

  CorrelateArgs correlate;
  CLI::App* c_correlate = app.add_subcommand("correlate", "correlate rate features with the affect score");
  add_common(c_correlate, correlate.common);
  c_correlate->add_option("--features", correlate.features, "features.csv");

  TrainArgs trainer;
  CLI::App* c_train = app.add_subcommand("train", "cross-validate and train classifiers");
  add_common(c_train, trainer.common);
  c_train->add_option("--features", trainer.features, "features.csv");
  c_train->add_option("--regime", trainer.regime, "within, global or both");
  c_train->add_option("--classifiers", trainer.classifiers, "comma list of ann, svm, lr, majority");
  c_train->add_option("--selection", trainer.selection, "default, threshold:<|r|> or a comma list of columns");
  c_train->add_option("--k", trainer.k, "folds per user in the within-subject regime");
  c_train->add_option("--hidden", trainer.hidden, "hidden units (0: (features + 3) / 2 rounded up)");
  c_train->add_option("--epochs", trainer.epochs, "network epochs");
  c_train->add_option("--learning-rate", trainer.learning_rate, "network learning rate");
  c_train->add_option("--momentum", trainer.momentum, "network momentum");
  c_train->add_option("--batch-size", trainer.batch_size, "network batch size (0: full batch)");
  c_train->add_option("--lr-epochs", trainer.lr_epochs, "logistic regression epochs");
  c_train->add_option("--lr-learning-rate", trainer.lr_learning_rate, "logistic regression learning rate");
  c_train->add_option("--svm-c", trainer.svm_c, "SVM box constraint");
  c_train->add_option("--svm-gamma", trainer.svm_gamma, "RBF gamma (0: 1 / features)");
  c_train->add_option("--family-alpha", trainer.family_alpha, "family-wise significance level");
  c_train->add_option("--threads", trainer.threads, "worker threads (0: NOTIMIND_THREADS or all cores)");

  SynthArgs synth;
  CLI::App* c_synth = app.add_subcommand("synth", "generate a synthetic cohort");
  add_common(c_synth, synth.common);
  c_synth->add_option("--spec", synth.spec, "cohort spec file (key=value)");
  c_synth->add_flag("--verify", synth.verify, "run the pipeline on the cohort and compare with the ground truth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (c_ingest->parsed()) {
      apply_config(c_ingest, ingest.common.config);
      return cmd_ingest(ingest, out);
    }
    if (c_features->parsed()) {
      apply_config(c_features, features.common.config);
      return cmd_features(features, out);
    }
    if (c_correlate->parsed()) {
      apply_config(c_correlate, correlate.common.config);
      return cmd_correlate(correlate, out);
    }
    if (c_train->parsed()) {
      apply_config(c_train, trainer.common.config);
      return cmd_train(trainer, out);
    }
    if (c_synth->parsed()) {
      apply_config(c_synth, synth.common.config);
      return cmd_synth(synth, c_synth, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace notimind
