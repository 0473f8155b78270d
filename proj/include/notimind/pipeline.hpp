#pragma once

#include <chrono>
#include <span>
#include <vector>

#include "notimind/enrich.hpp"
#include "notimind/ingest.hpp"
#include "notimind/panas.hpp"
#include "notimind/segment.hpp"

namespace notimind {

struct FeatureTable {
  SegmentationResult segmentation;
  // Fit on the balance of every report, not only segment-closing ones.
  DiscretizationModel discretization;
  DistributionSummary distribution;
  std::vector<FeatureRow> rows;
  // Overall shares of p, r, o, f, u, k over all retained events, percent.
  std::array<double, 6> state_shares{};
};

// enrich -> score -> discretize -> segment -> feature rows.
FeatureTable build_feature_table(std::span<const NotificationEvent> events, std::span<const PanasEntry> panas,
                                 const Enricher& enricher = Enricher(),
                                 std::chrono::milliseconds max_gap = kDefaultMaxGap,
                                 double emoji_rate_cap = kDefaultEmojiRateCap);

}  // namespace notimind
