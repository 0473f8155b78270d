#include <doctest.h>

#include <chrono>
#include <string>
#include <vector>

#include "notimind/error.hpp"
#include "notimind/rng.hpp"
#include "notimind/segment.hpp"

using namespace notimind;
using namespace std::chrono;

namespace {

Timestamp at(int day, int hour, int minute = 0) {
  return Timestamp{sys_days{2016y / April / (12 + day)}} + hours{hour} + minutes{minute};
}

PanasEntry report(const std::string& user, Timestamp ts, int fill = 3) {
  PanasEntry e;
  e.user_id = user;
  e.timestamp = ts;
  e.items.fill(fill);
  return e;
}

EnrichedEvent event(const std::string& user, Timestamp ts, EventState state = EventState::kPosted) {
  EnrichedEvent e;
  e.base.user_id = user;
  e.base.timestamp = ts;
  e.base.state = state;
  return e;
}

}  // namespace

TEST_CASE("one segment per consecutive report pair") {
  std::vector<PanasEntry> panas{report("u", at(0, 9)), report("u", at(0, 12)), report("u", at(0, 15))};
  std::vector<EnrichedEvent> events;
  for (int h = 8; h <= 16; ++h) events.push_back(event("u", at(0, h, 30)));
  auto result = build_segments(events, panas);
  REQUIRE(result.segments.size() == 2);
  CHECK(result.segments[0].t_start == at(0, 9));
  CHECK(result.segments[0].t_end == at(0, 12));
  CHECK(result.segments[0].counts.n == 3);
  CHECK(result.segments[1].counts.n == 3);
  CHECK(result.assigned_events == 6);
  CHECK(result.dropped_events == 3);
}

TEST_CASE("gaps over ten hours are dismissed") {
  std::vector<PanasEntry> panas{report("u", at(0, 9)), report("u", at(0, 21))};
  std::vector<EnrichedEvent> events{event("u", at(0, 10))};
  auto result = build_segments(events, panas);
  CHECK(result.segments.empty());
  REQUIRE(result.dismissed.size() == 1);
  CHECK(result.dismissed[0].events == 1);
  CHECK(result.dropped_events == 1);

  std::vector<PanasEntry> exact{report("u", at(0, 9)), report("u", at(0, 19))};
  CHECK(build_segments(std::vector<EnrichedEvent>{}, exact).segments.size() == 1);
}

TEST_CASE("boundary event belongs to the segment it closes") {
  std::vector<PanasEntry> panas{report("u", at(0, 9)), report("u", at(0, 12)), report("u", at(0, 15))};
  std::vector<EnrichedEvent> events{event("u", at(0, 12)), event("u", at(0, 9))};
  auto result = build_segments(events, panas);
  REQUIRE(result.segments.size() == 2);
  CHECK(result.segments[0].counts.n == 1);
  CHECK(result.segments[1].counts.n == 0);
  CHECK(result.dropped_events == 1);
}

TEST_CASE("segments are labeled by their closing report") {
  std::vector<PanasEntry> panas{report("u", at(0, 9), 1), report("u", at(0, 12), 2)};
  panas[1].items = {5, 5, 5, 5, 5, 1, 1, 1, 1, 1};
  auto result = build_segments(std::vector<EnrichedEvent>{}, panas);
  REQUIRE(result.segments.size() == 1);
  CHECK(result.segments[0].score.balance == 20);
}

TEST_CASE("state counting") {
  std::vector<EnrichedEvent> events;
  for (int i = 0; i < 3; ++i) events.push_back(event("u", at(0, 10)));
  events[0].is_multi = true;
  events.push_back(event("u", at(0, 10), EventState::kRemoved));
  events.push_back(event("u", at(0, 10), EventState::kScreenOn));
  events.push_back(event("u", at(0, 10), EventState::kScreenOn));
  auto c = count_states(events);
  CHECK(c.p == 3);
  CHECK(c.m == 1);
  CHECK(c.r == 1);
  CHECK(c.o == 2);
  CHECK(c.n == 6);

  CHECK(count_states(std::vector<EnrichedEvent>{}) == RawCounts{});

  std::vector<EnrichedEvent> emoji(2, event("u", at(0, 10)));
  for (auto& e : emoji) e.emoji_count = 2;
  CHECK(count_states(emoji).e == 4);

  auto flagged_removed = event("u", at(0, 10), EventState::kRemoved);
  flagged_removed.is_group = true;
  flagged_removed.emoji_count = 3;
  auto rc = count_states(std::vector<EnrichedEvent>{flagged_removed});
  CHECK(rc.g == 0);
  CHECK(rc.e == 0);
}

TEST_CASE("rate features") {
  CHECK(feature_vector(RawCounts{}, at(0, 9), {}).rates() == std::array<double, kRateFeatureCount>{});

  RawCounts emoji;
  emoji.p = 4, emoji.m = 1, emoji.e = 6, emoji.n = 4;
  CHECK(feature_vector(emoji, at(0, 9), {}).e_a == doctest::Approx(100.0 * 6 / 3));

  RawCounts work;
  work.p = 10, work.s = 2, work.w = 4, work.n = 10;
  CHECK(feature_vector(work, at(0, 9), {}).w_a == doctest::Approx(50.0));

  RawCounts capped;
  capped.p = 1, capped.e = 9, capped.n = 1;
  CHECK(feature_vector(capped, at(0, 9), {}).e_a == 500.0);
  CHECK(feature_vector(capped, at(0, 9), {}, 1000.0).e_a == 900.0);

  RawCounts overlap;
  overlap.p = 2, overlap.s = 2, overlap.w = 2, overlap.n = 2;
  CHECK(feature_vector(overlap, at(0, 9), {}).w_a == 0.0);
  overlap.p = 3;
  overlap.n = 3;
  CHECK(feature_vector(overlap, at(0, 9), {}).w_a == 100.0);

  auto fv = feature_vector(work, at(0, 14, 59), std::vector<RingerMode>{RingerMode::kSilent, RingerMode::kVibrate,
                                                                         RingerMode::kSilent});
  CHECK(fv.hour_of_day == 14);
  CHECK(fv.volume_mode == RingerMode::kSilent);
}

TEST_CASE("rate invariants on random counts") {
  Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    RawCounts c;
    c.p = rng.below(40), c.r = rng.below(10), c.o = rng.below(20), c.f = rng.below(20), c.u = rng.below(10),
    c.k = rng.below(30);
    c.n = c.p + c.r + c.o + c.f + c.u + c.k;
    c.s = c.p ? rng.below(c.p + 1) : 0;
    c.m = c.p ? rng.below(c.p + 1) : 0;
    c.g = c.p ? rng.below(c.p + 1) : 0;
    c.w = c.p - c.s ? rng.below(c.p - c.s + 1) : 0;
    c.e = rng.below(50);
    auto fv = feature_vector(c, at(0, 9), {});
    if (c.n > 0) CHECK(fv.p_a + fv.r_a + fv.o_a + fv.f_a + fv.u_a + fv.k_a == doctest::Approx(100.0).epsilon(1e-12));
    for (double v : {fv.s_a, fv.m_a, fv.g_a, fv.w_a}) {
      CHECK(v >= 0.0);
      CHECK(v <= 100.0);
    }
    RawCounts doubled = c;
    for (long long* v : {&doubled.p, &doubled.r, &doubled.o, &doubled.f, &doubled.u, &doubled.k, &doubled.m, &doubled.g,
                         &doubled.w, &doubled.s, &doubled.e, &doubled.n})
      *v *= 2;
    auto fd = feature_vector(doubled, at(0, 9), {}, 1e9);
    auto fo = feature_vector(c, at(0, 9), {}, 1e9);
    for (std::size_t i = 0; i < kRateFeatureCount; ++i) CHECK(fd.rates()[i] == doctest::Approx(fo.rates()[i]));
  }
}

TEST_CASE("conservation and segment count on random streams") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PanasEntry> panas;
    std::vector<EnrichedEvent> events;
    std::size_t expected_segments = 0;
    for (int u = 0; u < 3; ++u) {
      const std::string user = "u" + std::to_string(u);
      Timestamp t = at(0, 6);
      const int reports = 1 + static_cast<int>(rng.below(8));
      for (int i = 0; i < reports; ++i) {
        panas.push_back(report(user, t));
        const auto gap = minutes{30 + static_cast<int>(rng.below(14 * 60))};
        if (i + 1 < reports && gap <= hours{10}) ++expected_segments;
        t += gap;
      }
      for (int i = 0; i < 100; ++i) {
        events.push_back(event(user, at(0, 5) + minutes{static_cast<int>(rng.below(120 * 60))},
                               static_cast<EventState>(rng.below(6))));
      }
    }
    auto result = build_segments(events, panas);
    CHECK(result.segments.size() == expected_segments);
    CHECK(result.assigned_events + result.dropped_events == events.size());
    std::size_t total = 0;
    for (const auto& s : result.segments) {
      const auto& c = s.counts;
      CHECK(c.n == c.p + c.r + c.o + c.f + c.u + c.k);
      CHECK(s.t_end - s.t_start <= hours{10});
      for (const auto& e : s.events) {
        CHECK(e.base.timestamp > s.t_start);
        CHECK(e.base.timestamp <= s.t_end);
        CHECK(e.base.user_id == s.user_id);
      }
      total += s.events.size();
    }
    CHECK(total == result.assigned_events);
  }
}

TEST_CASE("response rate") {
  std::vector<PanasEntry> one{report("a", at(0, 8)), report("a", at(0, 12)), report("a", at(0, 20))};
  auto r1 = response_rate(one);
  CHECK(r1.fraction_three_or_more == 1.0);
  REQUIRE(r1.table.size() == 1);
  CHECK(r1.table[0].count == 3);

  auto two = one;
  two.push_back(report("b", at(0, 9)));
  CHECK(response_rate(two).fraction_three_or_more == 0.5);

  auto none = response_rate(std::vector<PanasEntry>{});
  CHECK(none.table.empty());
  CHECK(none.fraction_three_or_more == 0.0);
  CHECK(none.undefined);

  std::vector<PanasEntry> late{report("a", at(0, 23)), report("a", at(1, 0, 30))};
  CHECK(response_rate(late).table.size() == 2);
  CHECK(response_rate(late, minutes{-120}).table.size() == 1);
}

TEST_CASE("feature csv round trip") {
  FeatureRow row;
  row.user_id = "u01";
  row.t_start = at(0, 9);
  row.t_end = at(0, 12);
  row.rates = {31.5, 5, 15, 15, 10, 23.5, 0, 100.0 / 3.0, 0, 250, 12.5};
  row.hour = 9;
  row.volume = RingerMode::kVibrate;
  row.score = -4;
  row.affect_class = -1;
  const std::string csv = write_feature_csv(std::vector<FeatureRow>{row, row});
  CHECK(csv.substr(0, csv.find('\n')) == feature_csv_header());
  CHECK(feature_csv_header() == "user,t_start,t_end,p_a,r_a,o_a,f_a,u_a,k_a,s_a,m_a,g_a,e_a,w_a,hour,volume,score,class");
  auto back = read_feature_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == row);
  CHECK_THROWS_AS(read_feature_csv(std::string(feature_csv_header()) + "\nu01,bad\n"), Error);
}
