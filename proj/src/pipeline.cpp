#include "notimind/pipeline.hpp"

namespace notimind {

FeatureTable build_feature_table(std::span<const NotificationEvent> events, std::span<const PanasEntry> panas,
                                 const Enricher& enricher, std::chrono::milliseconds max_gap, double emoji_rate_cap) {
  FeatureTable table;
  std::vector<int> balances;
  balances.reserve(panas.size());
  for (const PanasEntry& entry : panas) balances.push_back(score(entry).balance);
  table.distribution = distribution_report(balances);
  table.discretization = discretize(balances);

  std::vector<EnrichedEvent> enriched;
  enriched.reserve(events.size());
  for (const NotificationEvent& e : events) enriched.push_back(enricher(e));
  table.segmentation = build_segments(enriched, panas, max_gap, emoji_rate_cap);

  RawCounts total;
  for (const Segment& s : table.segmentation.segments) {
    table.rows.push_back(to_feature_row(s, table.discretization.classify(s.score.balance)));
    total.p += s.counts.p;
    total.r += s.counts.r;
    total.o += s.counts.o;
    total.f += s.counts.f;
    total.u += s.counts.u;
    total.k += s.counts.k;
    total.n += s.counts.n;
  }
  if (total.n > 0) {
    const std::array<long long, 6> parts{total.p, total.r, total.o, total.f, total.u, total.k};
    for (std::size_t i = 0; i < parts.size(); ++i) {
      table.state_shares[i] = 100.0 * static_cast<double>(parts[i]) / static_cast<double>(total.n);
    }
  }
  return table;
}

}  // namespace notimind
