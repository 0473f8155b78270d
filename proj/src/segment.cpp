#include "notimind/segment.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "notimind/error.hpp"
#include "notimind/text.hpp"

namespace notimind {

namespace {

double rate(long long numerator, long long denominator) {
  if (denominator <= 0) return 0.0;
  return 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
}

bool by_time(const EnrichedEvent& a, const EnrichedEvent& b) { return a.base.timestamp < b.base.timestamp; }

}  // namespace

std::string_view rate_feature_label(std::string_view column) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, kRateFeatureCount> kLabels = {{
      {"p_a", "Post"},
      {"r_a", "Remove"},
      {"o_a", "Screen-On"},
      {"f_a", "Screen-Off"},
      {"u_a", "Unlock"},
      {"k_a", "Keyboard-Out"},
      {"s_a", "System"},
      {"m_a", "Multi"},
      {"g_a", "Group"},
      {"e_a", "Emoji-Count"},
      {"w_a", "Work"},
  }};
  for (const auto& [key, label] : kLabels) {
    if (key == column) return label;
  }
  return column;
}

std::array<double, kRateFeatureCount> FeatureVector::rates() const {
  return {p_a, r_a, o_a, f_a, u_a, k_a, s_a, m_a, g_a, e_a, w_a};
}

RawCounts count_states(std::span<const EnrichedEvent> segment_events) {
  RawCounts c;
  for (const EnrichedEvent& ev : segment_events) {
    ++c.n;
    switch (ev.base.state) {
      case EventState::kPosted:
        ++c.p;
        c.m += ev.is_multi;
        c.g += ev.is_group;
        c.w += ev.is_work;
        c.s += ev.is_system;
        c.e += ev.emoji_count;
        break;
      case EventState::kRemoved: ++c.r; break;
      case EventState::kScreenOn: ++c.o; break;
      case EventState::kScreenOff: ++c.f; break;
      case EventState::kUnlock: ++c.u; break;
      case EventState::kKeyboardOut: ++c.k; break;
    }
  }
  return c;
}

FeatureVector feature_vector(const RawCounts& c, Timestamp t_start, std::span<const RingerMode> volumes,
                             double emoji_rate_cap) {
  FeatureVector fv;
  fv.p_a = rate(c.p, c.n);
  fv.r_a = rate(c.r, c.n);
  fv.o_a = rate(c.o, c.n);
  fv.f_a = rate(c.f, c.n);
  fv.u_a = rate(c.u, c.n);
  fv.k_a = rate(c.k, c.n);
  fv.s_a = rate(c.s, c.p);
  fv.m_a = rate(c.m, c.p);
  fv.g_a = rate(c.g, c.p);
  fv.e_a = std::min(rate(c.e, c.p - c.m), emoji_rate_cap);
  fv.w_a = std::clamp(rate(c.w, c.p - c.s), 0.0, 100.0);

  const auto since_midnight = t_start - std::chrono::floor<std::chrono::days>(t_start);
  fv.hour_of_day = static_cast<int>(std::chrono::duration_cast<std::chrono::hours>(since_midnight).count());

  std::array<std::size_t, 4> tally{};
  for (RingerMode v : volumes) ++tally[static_cast<std::size_t>(v)];
  std::size_t best = static_cast<std::size_t>(RingerMode::kUnknown);
  for (std::size_t i = 0; i < tally.size(); ++i) {
    if (tally[i] > tally[best] || (tally[i] == tally[best] && tally[i] > 0 && i < best)) best = i;
  }
  fv.volume_mode = static_cast<RingerMode>(best);
  return fv;
}

SegmentationResult build_segments(std::span<const EnrichedEvent> events, std::span<const PanasEntry> panas,
                                  std::chrono::milliseconds max_gap, double emoji_rate_cap) {
  std::map<std::string, std::vector<EnrichedEvent>> events_by_user;
  for (const EnrichedEvent& ev : events) events_by_user[ev.base.user_id].push_back(ev);
  std::map<std::string, std::vector<PanasEntry>> reports_by_user;
  for (const PanasEntry& entry : panas) reports_by_user[entry.user_id].push_back(entry);

  SegmentationResult result;
  for (auto& [user, user_events] : events_by_user) {
    if (!reports_by_user.count(user)) result.dropped_events += user_events.size();
  }

  for (auto& [user, reports] : reports_by_user) {
    std::sort(reports.begin(), reports.end(),
              [](const PanasEntry& a, const PanasEntry& b) { return a.timestamp < b.timestamp; });
    std::vector<EnrichedEvent> empty;
    auto found = events_by_user.find(user);
    std::vector<EnrichedEvent>& user_events = found == events_by_user.end() ? empty : found->second;
    std::stable_sort(user_events.begin(), user_events.end(), by_time);

    std::size_t assigned_here = 0;
    for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
      const Timestamp start = reports[i].timestamp;
      const Timestamp end = reports[i + 1].timestamp;
      // (start, end]
      const auto first = std::upper_bound(user_events.begin(), user_events.end(), start,
                                          [](Timestamp t, const EnrichedEvent& ev) { return t < ev.base.timestamp; });
      const auto last = std::upper_bound(first, user_events.end(), end,
                                         [](Timestamp t, const EnrichedEvent& ev) { return t < ev.base.timestamp; });
      const auto count = static_cast<std::size_t>(last - first);
      if (end - start > max_gap) {
        result.dismissed.push_back({user, start, end, count});
        continue;
      }
      Segment seg;
      seg.user_id = user;
      seg.t_start = start;
      seg.t_end = end;
      seg.label = reports[i + 1];
      seg.score = score(seg.label);
      seg.events.assign(first, last);
      seg.counts = count_states(seg.events);
      std::vector<RingerMode> volumes;
      volumes.reserve(seg.events.size());
      for (const EnrichedEvent& ev : seg.events) volumes.push_back(ev.base.volume);
      seg.features = feature_vector(seg.counts, start, volumes, emoji_rate_cap);
      assigned_here += count;
      result.segments.push_back(std::move(seg));
    }
    result.assigned_events += assigned_here;
    result.dropped_events += user_events.size() - assigned_here;
  }
  return result;
}

ResponseRate response_rate(std::span<const PanasEntry> entries, std::chrono::minutes utc_offset) {
  ResponseRate out;
  std::map<std::pair<std::string, std::chrono::sys_days>, int> counts;
  for (const PanasEntry& entry : entries) {
    const auto local_day = std::chrono::floor<std::chrono::days>(entry.timestamp + utc_offset);
    ++counts[{entry.user_id, local_day}];
  }
  if (counts.empty()) {
    out.undefined = true;
    return out;
  }
  std::size_t three_or_more = 0;
  for (const auto& [key, count] : counts) {
    out.table.push_back({key.first, key.second, count});
    if (count >= 3) ++three_or_more;
  }
  out.fraction_three_or_more = static_cast<double>(three_or_more) / static_cast<double>(counts.size());
  return out;
}

std::string_view feature_csv_header() {
  return "user,t_start,t_end,p_a,r_a,o_a,f_a,u_a,k_a,s_a,m_a,g_a,e_a,w_a,hour,volume,score,class";
}

FeatureRow to_feature_row(const Segment& segment, int affect_class) {
  FeatureRow row;
  row.user_id = segment.user_id;
  row.t_start = segment.t_start;
  row.t_end = segment.t_end;
  row.rates = segment.features.rates();
  row.hour = segment.features.hour_of_day;
  row.volume = segment.features.volume_mode;
  row.score = segment.score.balance;
  row.affect_class = affect_class;
  return row;
}

std::string format_feature_row(const FeatureRow& row) {
  std::string line = row.user_id + "," + format_timestamp(row.t_start) + "," + format_timestamp(row.t_end);
  for (double v : row.rates) line += "," + format_double(v);
  line += "," + std::to_string(row.hour) + "," + std::string(to_string(row.volume)) + "," + std::to_string(row.score) +
          "," + std::to_string(row.affect_class);
  return line;
}

std::string write_feature_csv(std::span<const FeatureRow> rows) {
  std::string out(feature_csv_header());
  out += "\n";
  for (const FeatureRow& row : rows) {
    out += format_feature_row(row);
    out += "\n";
  }
  return out;
}

std::vector<FeatureRow> read_feature_csv(std::string_view text) {
  std::vector<FeatureRow> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const auto fail = [&](const std::string& why) {
      return Error(ErrorCode::kBadFormat, "feature csv line " + std::to_string(line_no) + ": " + why);
    };
    if (!header_seen) {
      if (line != feature_csv_header()) throw fail("unexpected header");
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 7 + kRateFeatureCount) throw fail("expected 18 columns");
    FeatureRow row;
    row.user_id = std::string(cells[0]);
    const auto start = parse_timestamp(cells[1]);
    const auto end = parse_timestamp(cells[2]);
    if (!start || !end) throw fail("bad timestamp");
    row.t_start = *start;
    row.t_end = *end;
    for (std::size_t i = 0; i < kRateFeatureCount; ++i) {
      const auto v = parse_double(cells[3 + i]);
      if (!v) throw fail("bad value in " + std::string(kRateFeatureNames[i]));
      row.rates[i] = *v;
    }
    const auto hour = parse_int(cells[14]);
    const auto score_value = parse_int(cells[16]);
    const auto cls = parse_int(cells[17]);
    if (!hour || !score_value || !cls || *cls < -1 || *cls > 1) throw fail("bad integer column");
    row.hour = static_cast<int>(*hour);
    row.volume = parse_ringer_mode(cells[15]);
    row.score = static_cast<int>(*score_value);
    row.affect_class = static_cast<int>(*cls);
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw Error(ErrorCode::kBadFormat, "feature csv is empty");
  return rows;
}

}  // namespace notimind
