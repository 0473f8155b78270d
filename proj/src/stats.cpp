#include "notimind/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "notimind/error.hpp"
#include "notimind/rng.hpp"
#include "notimind/segment.hpp"
#include "notimind/text.hpp"

namespace notimind {

namespace {

double two_sided_t(double t, double dof) {
  if (!std::isfinite(t)) return 0.0;
  const boost::math::students_t dist(dof);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

double centered_sum_squares(std::span<const double> v, double m) {
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss;
}

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  return std::sqrt(centered_sum_squares(values, mean(values)) / static_cast<double>(values.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 3) throw Error(ErrorCode::kTooFewSamples, "pearson needs n >= 3, got " + std::to_string(x.size()));
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::kConstantInput, "constant input vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double correlation_p_value(double r, std::size_t n) {
  if (n < 3) return 1.0;
  if (std::abs(r) >= 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  return two_sided_t(r * std::sqrt(dof / (1.0 - r * r)), dof);
}

double correlation_permutation_p_value(std::span<const double> x, std::span<const double> y, std::size_t shuffles,
                                       std::uint64_t seed) {
  const double observed = std::abs(pearson(x, y));
  std::vector<double> permuted(y.begin(), y.end());
  Rng rng(seed);
  std::size_t extreme = 0;
  for (std::size_t i = 0; i < shuffles; ++i) {
    rng.shuffle(std::span<double>(permuted));
    if (std::abs(pearson(x, permuted)) >= observed - 1e-12) ++extreme;
  }
  return static_cast<double>(extreme + 1) / static_cast<double>(shuffles + 1);
}

const CorrelationRow* CorrelationReport::find(std::string_view feature) const {
  for (const CorrelationRow& row : rows) {
    if (row.feature == feature) return &row;
  }
  return nullptr;
}

CorrelationReport correlation_table(std::span<const std::string> names, std::span<const std::vector<double>> columns,
                                    std::span<const double> scores) {
  if (names.size() != columns.size()) throw Error(ErrorCode::kLengthMismatch, "names vs columns");
  CorrelationReport report;
  for (std::size_t i = 0; i < names.size(); ++i) {
    CorrelationRow row;
    row.feature = names[i];
    row.n = scores.size();
    try {
      row.r = pearson(columns[i], scores);
      row.p = correlation_p_value(row.r, row.n);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kConstantInput) throw;
      row.constant = true;
    }
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const CorrelationRow& a, const CorrelationRow& b) { return a.r > b.r; });
  return report;
}

std::string write_correlation_csv(const CorrelationReport& report) {
  std::string out = "feature,r,p,n\n";
  for (const CorrelationRow& row : report.rows) {
    out += row.feature + "," + format_double(row.r) + "," + format_double(row.p) + "," + std::to_string(row.n) + "\n";
  }
  return out;
}

CorrelationReport read_correlation_csv(std::string_view text) {
  CorrelationReport report;
  bool header = false;
  for (std::string_view line : split(text, '\n')) {
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != "feature,r,p,n") throw Error(ErrorCode::kBadFormat, "correlation csv header");
      header = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 4) throw Error(ErrorCode::kBadFormat, "correlation csv row");
    const auto r = parse_double(cells[1]);
    const auto p = parse_double(cells[2]);
    const auto n = parse_int(cells[3]);
    if (!r || !p || !n) throw Error(ErrorCode::kBadFormat, "correlation csv value");
    report.rows.push_back({std::string(cells[0]), *r, *p, static_cast<std::size_t>(*n), false});
  }
  return report;
}

const std::vector<std::string>& default_feature_selection() {
  static const std::vector<std::string> kDefault = {"k_a", "e_a", "r_a", "w_a", "p_a", "g_a", "m_a", "o_a", "u_a"};
  return kDefault;
}

FeatureSelection select_features(const CorrelationReport& report, std::optional<double> threshold,
                                 std::span<const std::string> candidates) {
  FeatureSelection out;
  for (const std::string& name : candidates) {
    if (!report.find(name)) throw Error(ErrorCode::kUnknownFeatureName, name);
  }
  if (!threshold) {
    for (const std::string& name : default_feature_selection()) {
      if (!report.find(name)) throw Error(ErrorCode::kUnknownFeatureName, name);
    }
    out.features = default_feature_selection();
    return out;
  }
  for (const CorrelationRow& row : report.rows) {
    const bool allowed =
        candidates.empty() || std::find(candidates.begin(), candidates.end(), row.feature) != candidates.end();
    if (allowed && !row.constant && std::abs(row.r) >= *threshold) out.features.push_back(row.feature);
  }
  if (out.features.empty()) out.warnings.push_back("no feature reaches |r| >= " + format_double(*threshold));
  return out;
}

PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (a.size() < 2) throw Error(ErrorCode::kTooFewSamples, "paired t-test needs at least two pairs");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  PairedTTest out;
  out.df = diff.size() - 1;
  out.mean_difference = mean(diff);
  const double sd = sample_std(diff);
  // Differences equal up to rounding count as zero variance.
  if (sd <= 1e-12 * std::max(1.0, std::abs(out.mean_difference))) {
    out.degenerate = true;
    const bool zero_mean = std::abs(out.mean_difference) <= 1e-12;
    out.p_value = zero_mean ? 1.0 : 0.0;
    out.t_statistic = zero_mean ? 0.0 : std::copysign(INFINITY, out.mean_difference);
    return out;
  }
  out.t_statistic = out.mean_difference / (sd / std::sqrt(static_cast<double>(diff.size())));
  out.p_value = two_sided_t(out.t_statistic, static_cast<double>(out.df));
  return out;
}

double paired_permutation_p_value(std::span<const double> a, std::span<const double> b, std::size_t shuffles,
                                  std::uint64_t seed) {
  if (a.size() != b.size()) throw Error(ErrorCode::kLengthMismatch, "paired permutation");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const auto t_of = [](std::span<const double> d) {
    const double sd = sample_std(d);
    const double m = mean(d);
    return sd == 0.0 ? (m == 0.0 ? 0.0 : INFINITY) : std::abs(m) / (sd / std::sqrt(static_cast<double>(d.size())));
  };
  const double observed = t_of(diff);
  Rng rng(seed);
  std::vector<double> flipped(diff.size());
  std::size_t extreme = 0;
  for (std::size_t s = 0; s < shuffles; ++s) {
    for (std::size_t i = 0; i < diff.size(); ++i) flipped[i] = (rng() >> 63) ? -diff[i] : diff[i];
    if (t_of(flipped) >= observed - 1e-12) ++extreme;
  }
  return static_cast<double>(extreme + 1) / static_cast<double>(shuffles + 1);
}

BonferroniResult bonferroni(std::span<const double> p_values, double family_alpha) {
  BonferroniResult out;
  if (p_values.empty()) return out;
  out.threshold = family_alpha / static_cast<double>(p_values.size());
  for (double p : p_values) out.significant.push_back(p < out.threshold);
  return out;
}

}  // namespace notimind
