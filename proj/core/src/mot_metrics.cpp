#include "ctm/mot_metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ctm/assignment.hpp"

namespace ctm {

std::int64_t idsw(const MatchedSequence& m) {
  std::map<TrackId, std::map<Frame, std::set<TrackId>>> by_pr;
  for (const auto& e : m.tp) by_pr[e.pr][e.frame].insert(e.gt);
  std::int64_t n = 0;
  for (const auto& [pr, frames] : by_pr) {
    const std::pair<const Frame, std::set<TrackId>>* prev = nullptr;
    for (const auto& cur : frames) {
      if (prev && prev->first + 1 == cur.first && prev->second != cur.second) ++n;
      prev = &cur;
    }
  }
  return n;
}

MetricValue mota(const MatchedSequence& m) {
  const auto n = m.annotation_count();
  if (n == 0) return MetricValue::undefined("no annotations");
  const double errors = static_cast<double>(m.fn.size() + m.fp.size()) + static_cast<double>(idsw(m));
  return MetricValue::of(1.0 - errors / static_cast<double>(n));
}

std::int64_t idtp(const MatchedSequence& m) {
  std::map<std::pair<TrackId, TrackId>, std::int64_t> overlap;
  for (const auto& e : m.tp) ++overlap[{e.gt, e.pr}];
  std::vector<WeightedEdge> edges;
  edges.reserve(overlap.size());
  for (const auto& [key, n] : overlap) edges.push_back({key.first, key.second, n});
  std::int64_t total = 0;
  for (const auto& [g, p] : sparse_max_weight_matching(edges)) {
    total += overlap.at({static_cast<TrackId>(g), static_cast<TrackId>(p)});
  }
  return total;
}

MetricValue idf1(const MatchedSequence& m) {
  const auto denom = 2 * m.tp.size() + m.fn.size() + m.fp.size();
  if (denom == 0) return MetricValue::undefined("no annotations or detections");
  return MetricValue::of(2.0 * static_cast<double>(idtp(m)) / static_cast<double>(denom));
}

MetricValue precision(const MatchedSequence& m) {
  const auto denom = m.tp.size() + m.fp.size();
  if (denom == 0) return MetricValue::undefined("no detections");
  return MetricValue::of(static_cast<double>(m.tp.size()) / static_cast<double>(denom));
}

MetricValue recall(const MatchedSequence& m) {
  const auto denom = m.tp.size() + m.fn.size();
  if (denom == 0) return MetricValue::undefined("no annotations");
  return MetricValue::of(static_cast<double>(m.tp.size()) / static_cast<double>(denom));
}

MetricValue faf(const MatchedSequence& m) {
  if (m.n_frames <= 0) return MetricValue::undefined("no frames");
  return MetricValue::of(static_cast<double>(m.fp.size()) / static_cast<double>(m.n_frames));
}

TrackCoverage mt_ml(const MatchedSequence& m, bool strict_id) {
  std::map<TrackId, std::int64_t> length;
  std::map<TrackId, std::set<Frame>> covered;
  std::map<TrackId, std::map<TrackId, std::int64_t>> per_id;
  for (const auto& e : m.tp) {
    covered[e.gt].insert(e.frame);
    ++per_id[e.gt][e.pr];
  }
  for (const auto& [id, frames] : covered) length[id] += static_cast<std::int64_t>(frames.size());
  for (const auto& e : m.fn) ++length[e.gt];

  TrackCoverage out;
  out.tracks = static_cast<std::int64_t>(length.size());
  if (length.empty()) {
    out.mt = out.ml = MetricValue::undefined("no ground-truth tracks");
    return out;
  }
  for (const auto& [id, len] : length) {
    std::int64_t hit = 0;
    if (strict_id) {
      for (const auto& [pr, n] : per_id[id]) hit = std::max(hit, n);
    } else {
      hit = static_cast<std::int64_t>(covered[id].size());
    }
    // Integer form of hit/len >= 0.8 and hit/len <= 0.2.
    if (5 * hit >= 4 * len) ++out.mostly_tracked;
    if (5 * hit <= len) ++out.mostly_lost;
  }
  const double n = static_cast<double>(out.tracks);
  out.mt = MetricValue::of(static_cast<double>(out.mostly_tracked) / n);
  out.ml = MetricValue::of(static_cast<double>(out.mostly_lost) / n);
  return out;
}

}  // namespace ctm
