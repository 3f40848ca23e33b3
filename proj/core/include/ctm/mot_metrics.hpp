#pragma once

#include <cstdint>

#include "ctm/matched.hpp"
#include "ctm/metric_report.hpp"

namespace ctm {

/// Consecutive-frame TP pairs of one predicted id whose matched gt ids
/// differ. When a detection owns several TPs the gt id sets are compared.
std::int64_t idsw(const MatchedSequence& m);

MetricValue mota(const MatchedSequence& m);

/// Sum of TP overlaps over an optimal one-to-one pairing of gt and
/// predicted trajectories.
std::int64_t idtp(const MatchedSequence& m);
MetricValue idf1(const MatchedSequence& m);

MetricValue precision(const MatchedSequence& m);
MetricValue recall(const MatchedSequence& m);
/// False alarms per frame.
MetricValue faf(const MatchedSequence& m);

struct TrackCoverage {
  MetricValue mt;
  MetricValue ml;
  std::int64_t mostly_tracked = 0;
  std::int64_t mostly_lost = 0;
  std::int64_t tracks = 0;
};

/// Coverage >= 0.8 counts as mostly tracked, <= 0.2 as mostly lost. By
/// default any TP covers a frame; `strict_id` only counts the dominant id.
TrackCoverage mt_ml(const MatchedSequence& m, bool strict_id = false);

}  // namespace ctm
