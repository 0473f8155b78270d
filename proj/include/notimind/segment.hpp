#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "notimind/enrich.hpp"
#include "notimind/ingest.hpp"
#include "notimind/panas.hpp"

namespace notimind {

// State counts over one segment. m, g, w, s and e only count Posted events.
struct RawCounts {
  long long p = 0, r = 0, o = 0, f = 0, u = 0, k = 0;
  long long m = 0, g = 0, w = 0, s = 0;
  long long e = 0;
  long long n = 0;

  bool operator==(const RawCounts&) const = default;
};

inline constexpr std::size_t kRateFeatureCount = 11;
// Column order of the rate block in every feature table.
inline constexpr std::array<std::string_view, kRateFeatureCount> kRateFeatureNames = {
    "p_a", "r_a", "o_a", "f_a", "u_a", "k_a", "s_a", "m_a", "g_a", "e_a", "w_a"};

// Human-readable name ("Keyboard-Out") for a rate column ("k_a").
std::string_view rate_feature_label(std::string_view column);

inline constexpr double kDefaultEmojiRateCap = 500.0;

struct FeatureVector {
  // Shares of all events in the segment, percent.
  double p_a = 0, r_a = 0, o_a = 0, f_a = 0, u_a = 0, k_a = 0;
  // Shares of posted notifications, percent.
  double s_a = 0, m_a = 0, g_a = 0;
  // Emojis per non-multi post x100, capped.
  double e_a = 0;
  // Work posts per non-system post x100, clamped to [0, 100].
  double w_a = 0;
  int hour_of_day = 0;
  RingerMode volume_mode = RingerMode::kUnknown;

  std::array<double, kRateFeatureCount> rates() const;
  bool operator==(const FeatureVector&) const = default;
};

struct Segment {
  std::string user_id;
  Timestamp t_start{};
  Timestamp t_end{};
  PanasEntry label;  // the report closing the segment
  AffectScore score;
  std::vector<EnrichedEvent> events;
  RawCounts counts;
  FeatureVector features;
};

struct DismissedSegment {
  std::string user_id;
  Timestamp t_start{};
  Timestamp t_end{};
  std::size_t events = 0;
};

struct SegmentationResult {
  std::vector<Segment> segments;
  std::vector<DismissedSegment> dismissed;  // gap longer than max_gap
  std::size_t assigned_events = 0;
  std::size_t dropped_events = 0;  // outside every retained segment
};

inline constexpr std::chrono::milliseconds kDefaultMaxGap = std::chrono::hours{10};

// One segment per consecutive pair of a user's reports, covering the
// half-open interval (t_start, t_end]. Pairs further apart than max_gap
// are dismissed along with their events. Output is ordered by user, then
// time; inputs need not be sorted.
SegmentationResult build_segments(std::span<const EnrichedEvent> events, std::span<const PanasEntry> panas,
                                  std::chrono::milliseconds max_gap = kDefaultMaxGap,
                                  double emoji_rate_cap = kDefaultEmojiRateCap);

RawCounts count_states(std::span<const EnrichedEvent> segment_events);

// Rates with a zero denominator are 0. volume_mode is the most frequent
// mode (ties to the earlier enumerator, kUnknown when empty).
FeatureVector feature_vector(const RawCounts& counts, Timestamp t_start, std::span<const RingerMode> volumes,
                             double emoji_rate_cap = kDefaultEmojiRateCap);

struct UserDayCount {
  std::string user_id;
  std::chrono::sys_days day;
  int count = 0;
};

struct ResponseRate {
  std::vector<UserDayCount> table;
  double fraction_three_or_more = 0.0;
  bool undefined = false;  // no entries at all; fraction reported as 0
};

ResponseRate response_rate(std::span<const PanasEntry> entries,
                           std::chrono::minutes utc_offset = std::chrono::minutes{0});

// Feature matrix CSV, one row per segment:
// user,t_start,t_end,p_a,r_a,o_a,f_a,u_a,k_a,s_a,m_a,g_a,e_a,w_a,hour,volume,score,class
std::string_view feature_csv_header();

struct FeatureRow {
  std::string user_id;
  Timestamp t_start{};
  Timestamp t_end{};
  std::array<double, kRateFeatureCount> rates{};
  int hour = 0;
  RingerMode volume = RingerMode::kUnknown;
  int score = 0;
  int affect_class = 0;

  bool operator==(const FeatureRow&) const = default;
};

FeatureRow to_feature_row(const Segment& segment, int affect_class);
std::string format_feature_row(const FeatureRow& row);
std::string write_feature_csv(std::span<const FeatureRow> rows);
// Throws kBadFormat with the offending line number.
std::vector<FeatureRow> read_feature_csv(std::string_view text);

}  // namespace notimind
