#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "notimind/ingest.hpp"
#include "notimind/segment.hpp"

namespace notimind {

// Parameters of a synthetic cohort. Shares and rates are percentages;
// couplings are target Pearson correlations between a rate column and
// the reported affect score, indexed like kRateFeatureNames.
struct CohortSpec {
  int users = 34;
  int days = 35;
  int panas_per_day = 3;
  double events_per_segment = 100.0;
  double events_per_segment_sd = 25.0;
  int min_events_per_segment = 10;
  // p, r, o, f, u, k
  std::array<double, 6> state_mix{31, 5, 15, 15, 10, 20};
  double system_rate = 6;
  double multi_rate = 17;
  double group_rate = 13;
  double work_rate = 7;
  double emoji_rate = 9;
  std::array<double, kRateFeatureCount> coupling{0.13, 0.08, 0.09, 0.0, -0.07, 0.46, 0.0, 0.22, -0.08, 0.35, -0.35};
  double label_noise = 0.0;
  double score_mean = 4.78;
  double score_sd = 5.08;
  // Spread of per-user mean scores; the rest of score_sd is within-user.
  // Event mixes respond to the within-user deviation only.
  double user_affect_sd = 3.0;
  // Fraction of reports that are never filed; each leaves a long gap.
  double miss_rate = 0.0;
  // Log-normal spread of per-user base rates.
  double heterogeneity = 0.0;
  // Relative spread of per-user coupling strength.
  double coupling_spread = 0.0;
  // Log-scale sensitivity of event weights to their latent factor.
  double volatility = 0.8;
  std::string start_date = "2024-03-04";
  std::uint64_t seed = 1;

  // Throws kInvalidArgument naming the field.
  void validate() const;
};

// Reads key=value lines. Keys: users, days, panas_per_day,
// events_per_segment, events_per_segment_sd, min_events_per_segment,
// share_p .. share_k, rate_s, rate_m, rate_g, rate_w, rate_e,
// coupling_<column> (e.g. coupling_k_a), label_noise, score_mean,
// score_sd, user_affect_sd, miss_rate, heterogeneity, coupling_spread, volatility,
// start_date, seed. Unknown keys throw kBadFormat.
CohortSpec parse_cohort_spec(std::string_view text);
std::string format_cohort_spec(const CohortSpec& spec);

// Latent coupling coefficients that realize the spec's target
// correlations, found by deterministic simulation. f_a carries no
// coupling of its own. Throws kInfeasibleCoupling naming the column.
std::array<double, kRateFeatureCount> calibrate_coupling(const CohortSpec& spec);

struct TruthRow {
  std::string user_id;
  Timestamp t_start{};
  Timestamp t_end{};
  int score = 0;
  double latent = 0.0;
  RawCounts counts;
  std::array<double, kRateFeatureCount> rates{};
};

struct Cohort {
  std::vector<NotificationEvent> events;
  std::vector<PanasEntry> panas;
  std::vector<TruthRow> truth;  // retained segments only
};

// Deterministic in the spec (seed included).
Cohort generate_cohort(const CohortSpec& spec);
Cohort generate_cohort(const CohortSpec& spec, const std::array<double, kRateFeatureCount>& coefficients);

// PANAS items in [1, 5] whose balance is `balance`: positives are raised
// from 1 in turn, then negatives lowered from 5 in turn.
std::array<int, kPanasItemCount> panas_items_for(int balance);

std::string write_events_jsonl(std::span<const NotificationEvent> events);
std::string write_panas_jsonl(std::span<const PanasEntry> entries);
// user,t_start,t_end,score,latent,n,p_a,...,w_a
std::string write_truth_csv(std::span<const TruthRow> rows);
std::vector<TruthRow> read_truth_csv(std::string_view text);

struct SegmentMismatch {
  std::string user_id;
  Timestamp t_end{};
  std::string detail;
};

struct VerifyReport {
  std::size_t checked = 0;
  std::size_t mismatches = 0;
  std::vector<SegmentMismatch> first;  // at most 10

  bool ok() const { return mismatches == 0; }
};

// Runs ingest-equivalent records through enrich, segment and score and
// compares each retained segment with the ground truth.
VerifyReport verify_cohort(std::span<const NotificationEvent> events, std::span<const PanasEntry> panas,
                           std::span<const TruthRow> truth);

}  // namespace notimind
