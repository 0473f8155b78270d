#include "notimind/panas.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "notimind/error.hpp"
#include "notimind/text.hpp"

namespace notimind {

namespace {

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// Weighted-entropy bookkeeping over the distinct sorted values. For an
// interval of distinct values [lo, hi] holding n samples,
//   n * H = n log2 n - sum(c log2 c)
// so a partition's weighted entropy is (sum over bins of n*H) / N.
struct Profile {
  std::vector<int> values;
  std::vector<double> prefix_count;  // prefix sums of counts
  std::vector<double> prefix_clogc;  // prefix sums of c log2 c

  explicit Profile(std::span<const int> scores) {
    std::map<int, long long> counts;
    for (int s : scores) ++counts[s];
    prefix_count.push_back(0.0);
    prefix_clogc.push_back(0.0);
    for (const auto& [value, count] : counts) {
      values.push_back(value);
      prefix_count.push_back(prefix_count.back() + static_cast<double>(count));
      prefix_clogc.push_back(prefix_clogc.back() + xlog2x(static_cast<double>(count)));
    }
  }

  std::size_t distinct() const { return values.size(); }

  // n * H of the interval [lo, hi] of distinct-value indices.
  double mass_entropy(std::size_t lo, std::size_t hi) const {
    const double n = prefix_count[hi + 1] - prefix_count[lo];
    return xlog2x(n) - (prefix_clogc[hi + 1] - prefix_clogc[lo]);
  }

  double cut_after(std::size_t index) const {
    return (static_cast<double>(values[index]) + static_cast<double>(values[index + 1])) / 2.0;
  }
};

struct Split {
  std::size_t after = 0;  // cut sits between distinct values `after` and `after + 1`
  double mass_entropy = 0.0;
};

bool strictly_better(double candidate, double incumbent) {
  const double tolerance = 1e-9 * std::max(1.0, std::abs(incumbent));
  return candidate < incumbent - tolerance;
}

// Best binary split of [lo, hi] (needs hi > lo); smallest cut wins ties.
Split best_split(const Profile& profile, std::size_t lo, std::size_t hi) {
  Split best{lo, profile.mass_entropy(lo, lo) + profile.mass_entropy(lo + 1, hi)};
  for (std::size_t k = lo + 1; k < hi; ++k) {
    const double value = profile.mass_entropy(lo, k) + profile.mass_entropy(k + 1, hi);
    if (strictly_better(value, best.mass_entropy)) best = {k, value};
  }
  return best;
}

}  // namespace

AffectScore score(const PanasEntry& entry) {
  AffectScore s;
  for (std::size_t i = 0; i < 5; ++i) s.pa += entry.items[i];
  for (std::size_t i = 5; i < kPanasItemCount; ++i) s.na += entry.items[i];
  s.balance = s.pa - s.na;
  return s;
}

double entropy(std::span<const long long> counts) {
  long long total = 0;
  for (long long c : counts) {
    if (c < 0) throw Error(ErrorCode::kInvalidArgument, "negative count");
    total += c;
  }
  if (total == 0) throw Error(ErrorCode::kEmptyDistribution, "all counts are zero");
  double h = 0.0;
  for (long long c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;
}

int DiscretizationModel::classify(int balance) const {
  if (balance <= cut1) return -1;
  if (balance <= cut2) return 0;
  return 1;
}

std::string DiscretizationModel::serialize() const {
  return "cut1 " + format_double(cut1) + "\ncut2 " + format_double(cut2) + "\n";
}

DiscretizationModel DiscretizationModel::parse(std::string_view text) {
  DiscretizationModel model;
  bool seen1 = false, seen2 = false;
  for (std::string_view line : split(text, '\n')) {
    line = trim(line);
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string_view::npos) throw Error(ErrorCode::kBadFormat, "discretization line without value");
    const auto key = line.substr(0, space);
    const auto value = parse_double(line.substr(space + 1));
    if (!value) throw Error(ErrorCode::kBadFormat, "bad cut value");
    if (key == "cut1") model.cut1 = *value, seen1 = true;
    else if (key == "cut2") model.cut2 = *value, seen2 = true;
    else throw Error(ErrorCode::kBadFormat, "unknown key " + std::string(key));
  }
  if (!seen1 || !seen2 || !(model.cut1 < model.cut2)) {
    throw Error(ErrorCode::kBadFormat, "discretization needs cut1 < cut2");
  }
  return model;
}

DiscretizationModel discretize(std::span<const int> scores, int num_classes) {
  if (num_classes != 3) throw Error(ErrorCode::kInvalidArgument, "only three classes are supported");
  const Profile profile(scores);
  const std::size_t d = profile.distinct();
  if (d < 3) {
    throw Error(ErrorCode::kTooFewDistinctValues, std::to_string(d) + " distinct scores, need 3");
  }

  // Candidate (first, second) cut index pairs with their total n*H.
  bool have = false;
  std::size_t best_a = 0, best_b = 0;
  double best_value = 0.0;
  const auto consider = [&](std::size_t a, std::size_t b, double value) {
    if (!have || strictly_better(value, best_value) ||
        (!strictly_better(best_value, value) && std::pair{a, b} < std::pair{best_a, best_b})) {
      have = true;
      best_a = a, best_b = b, best_value = value;
    }
  };

  for (std::size_t first = 0; first + 1 < d; ++first) {
    const double left_whole = profile.mass_entropy(0, first);
    const double right_whole = profile.mass_entropy(first + 1, d - 1);
    if (first >= 1) {
      const Split left = best_split(profile, 0, first);
      consider(left.after, first, left.mass_entropy + right_whole);
    }
    if (first + 2 < d) {
      const Split right = best_split(profile, first + 1, d - 1);
      consider(first, right.after, left_whole + right.mass_entropy);
    }
  }
  return DiscretizationModel{profile.cut_after(best_a), profile.cut_after(best_b)};
}

double partition_entropy(std::span<const int> scores, const DiscretizationModel& model) {
  std::vector<int> bins[3];
  for (int s : scores) bins[model.classify(s) + 1].push_back(s);
  double total = 0.0;
  for (const auto& bin : bins) {
    if (bin.empty()) continue;
    std::map<int, long long> counts;
    for (int s : bin) ++counts[s];
    std::vector<long long> c;
    for (const auto& [value, count] : counts) c.push_back(count);
    total += static_cast<double>(bin.size()) * entropy(c);
  }
  return scores.empty() ? 0.0 : total / static_cast<double>(scores.size());
}

DistributionSummary distribution_report(std::span<const int> scores) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "no scores");
  DistributionSummary out;
  out.n = scores.size();
  const double n = static_cast<double>(scores.size());
  double sum = 0.0;
  std::size_t pos = 0, neg = 0;
  out.min = scores.front();
  out.max = scores.front();
  for (int s : scores) {
    sum += s;
    if (s > 0) ++pos;
    if (s < 0) ++neg;
    out.min = std::min(out.min, s);
    out.max = std::max(out.max, s);
  }
  out.mean = sum / n;
  if (scores.size() > 1) {
    double ss = 0.0;
    for (int s : scores) ss += (s - out.mean) * (s - out.mean);
    out.std = std::sqrt(ss / (n - 1.0));
  }
  out.fraction_positive = static_cast<double>(pos) / n;
  out.fraction_negative = static_cast<double>(neg) / n;
  return out;
}

}  // namespace notimind
