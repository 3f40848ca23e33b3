#include "ctm/bio_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

#include "ctm/matching.hpp"

namespace ctm {

std::vector<BranchingEvent> branching_events(const TrackTable& tracks) {
  std::map<TrackId, std::vector<TrackId>> children;
  for (const auto& r : tracks.records()) {
    if (r.parent != kNoTrack) children[r.parent].push_back(r.id);
  }
  std::vector<BranchingEvent> out;
  for (auto& [parent, ds] : children) {
    if (ds.size() < 2) continue;
    BranchingEvent e;
    e.parent = parent;
    e.daughters = ds;
    e.frame = tracks.find(ds.front())->begin;
    for (TrackId d : ds) e.frame = std::min(e.frame, tracks.find(d)->begin);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Frame> cell_cycle_lengths(const TrackTable& tracks) {
  std::map<TrackId, int> n_children;
  for (const auto& r : tracks.records()) {
    if (r.parent != kNoTrack) ++n_children[r.parent];
  }
  std::vector<Frame> out;
  for (const auto& r : tracks.records()) {
    auto it = n_children.find(r.id);
    if (r.parent != kNoTrack && it != n_children.end() && it->second >= 2) out.push_back(r.length());
  }
  std::sort(out.begin(), out.end());
  return out;
}

MetricValue seg(const MatchedSequence& m) {
  if (!m.pixel_geometry) return MetricValue::undefined("no pixel masks");
  const std::size_t n = m.annotation_count();
  if (n == 0) return MetricValue::undefined("no annotations");
  double sum = 0.0;
  for (const auto& e : m.tp) sum += e.jaccard;
  return MetricValue::of(sum / static_cast<double>(n));
}

MetricValue SegTotals::value() const {
  if (annotations == 0) return MetricValue::undefined("no segmentation annotations");
  return MetricValue::of(jaccard_sum / static_cast<double>(annotations));
}

SegTotals seg_totals(std::span<const LabelFrame> seg_gt, std::span<const LabelFrame> pr) {
  SegTotals t;
  for (const auto& g : seg_gt) {
    auto it = std::find_if(pr.begin(), pr.end(), [&](const LabelFrame& c) { return c.frame == g.frame; });
    LabelFrame other = it != pr.end() ? *it : LabelFrame{g.frame, g.width, g.height, {}};
    if (other.width != g.width || other.height != g.height) {
      throw std::invalid_argument("dimension mismatch in frame " + std::to_string(g.frame));
    }
    if (other.labels.empty()) other.labels.assign(g.labels.size(), 0);
    other.frame = 0;
    LabelFrame one = g;
    one.frame = 0;
    auto table = compute_overlaps(std::span<const LabelFrame>(&one, 1), std::span<const LabelFrame>(&other, 1));
    const auto& fr = table.frames.front();
    t.annotations += static_cast<std::int64_t>(fr.gt.size());
    for (const auto& e : fr.pairs) {
      const std::int64_t r = fr.gt_size(e.gt);
      if (2 * e.intersection > r) t.jaccard_sum += jaccard(e.intersection, r, fr.pr_size(e.pr));
    }
  }
  return t;
}

MetricValue seg(std::span<const LabelFrame> seg_gt, std::span<const LabelFrame> pr) {
  return seg_totals(seg_gt, pr).value();
}

namespace {

// Per gt id: the pr id matched at each annotation in frame order (0 = FN).
std::map<TrackId, std::vector<std::pair<Frame, TrackId>>> gt_histories(const MatchedSequence& m) {
  std::map<TrackId, std::vector<std::pair<Frame, TrackId>>> h;
  for (const auto& e : m.tp) h[e.gt].push_back({e.frame, e.pr});
  for (const auto& e : m.fn) h[e.gt].push_back({e.frame, kNoTrack});
  for (auto& [id, v] : h) std::sort(v.begin(), v.end());
  return h;
}

}  // namespace

MetricValue ct(const MatchedSequence& m) {
  const auto gt = m.gt_ids();
  const auto pr = m.pr_ids();
  if (gt.empty() && pr.empty()) return MetricValue::undefined("no tracks");
  std::size_t complete = 0;
  for (const auto& [id, hist] : gt_histories(m)) {
    const TrackId first = hist.front().second;
    if (first != kNoTrack &&
        std::all_of(hist.begin(), hist.end(), [&](const auto& fp) { return fp.second == first; })) {
      ++complete;
    }
  }
  return MetricValue::of(2.0 * static_cast<double>(complete) / static_cast<double>(gt.size() + pr.size()));
}

MetricValue tf(const MatchedSequence& m, TfMode mode) {
  const auto hists = gt_histories(m);
  if (hists.empty()) return MetricValue::undefined("no ground-truth tracks");
  double sum = 0.0;
  for (const auto& [id, hist] : hists) {
    std::size_t best = 0;
    if (mode == TfMode::count) {
      std::map<TrackId, std::size_t> counts;
      for (const auto& [f, p] : hist) {
        if (p != kNoTrack) best = std::max(best, ++counts[p]);
      }
    } else {
      std::size_t run = 0;
      for (std::size_t k = 0; k < hist.size(); ++k) {
        const TrackId p = hist[k].second;
        if (p == kNoTrack) {
          run = 0;
        } else if (k > 0 && hist[k - 1].second == p && hist[k - 1].first + 1 == hist[k].first) {
          ++run;
        } else {
          run = 1;
        }
        best = std::max(best, run);
      }
    }
    sum += static_cast<double>(best) / static_cast<double>(hist.size());
  }
  return MetricValue::of(sum / static_cast<double>(hists.size()));
}

MetricValue cca(const TrackTable& gt, const TrackTable& pr) {
  const auto a = cell_cycle_lengths(gt);
  const auto b = cell_cycle_lengths(pr);
  if (a.empty()) return MetricValue::undefined("no complete ground-truth cell cycle");
  if (b.empty()) return MetricValue::undefined("no complete predicted cell cycle");
  std::vector<Frame> points = a;
  points.insert(points.end(), b.begin(), b.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double sup = 0.0;
  for (Frame t : points) {
    const auto ca = std::upper_bound(a.begin(), a.end(), t) - a.begin();
    const auto cb = std::upper_bound(b.begin(), b.end(), t) - b.begin();
    const double d = std::abs(static_cast<double>(ca) / static_cast<double>(a.size()) -
                              static_cast<double>(cb) / static_cast<double>(b.size()));
    sup = std::max(sup, d);
  }
  return MetricValue::of(1.0 - sup);
}

BranchingCounts branching_counts(const MatchedSequence& m, int window) {
  const auto gt_events = branching_events(m.gt_tracks);
  const auto pr_events = branching_events(m.pr_tracks);

  std::map<Occurrence, std::vector<TrackId>> matched;  // gt annotation -> pr ids
  for (const auto& e : m.tp) matched[{e.frame, e.gt}].push_back(e.pr);

  struct Candidate {
    Frame distance;
    TrackId gt_parent, pr_parent;
    std::size_t g, p;
  };
  std::vector<Candidate> candidates;
  for (std::size_t g = 0; g < gt_events.size(); ++g) {
    const auto& ge = gt_events[g];
    for (std::size_t p = 0; p < pr_events.size(); ++p) {
      const auto& pe = pr_events[p];
      const Frame distance = std::abs(ge.frame - pe.frame);
      if (distance > window) continue;
      const Frame at = std::max(ge.frame, pe.frame);
      const bool covered = std::all_of(ge.daughters.begin(), ge.daughters.end(), [&](TrackId d) {
        auto it = matched.find({at, d});
        if (it == matched.end()) return false;
        return std::any_of(it->second.begin(), it->second.end(), [&](TrackId pid) {
          return std::binary_search(pe.daughters.begin(), pe.daughters.end(), pid);
        });
      });
      if (covered) candidates.push_back({distance, ge.parent, pe.parent, g, p});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.distance, a.gt_parent, a.pr_parent) < std::tie(b.distance, b.gt_parent, b.pr_parent);
  });
  std::vector<char> g_used(gt_events.size()), p_used(pr_events.size());
  BranchingCounts c;
  for (const auto& cand : candidates) {
    if (g_used[cand.g] || p_used[cand.p]) continue;
    g_used[cand.g] = p_used[cand.p] = 1;
    ++c.tp;
  }
  c.fn = static_cast<std::int64_t>(gt_events.size()) - c.tp;
  c.fp = static_cast<std::int64_t>(pr_events.size()) - c.tp;
  return c;
}

MetricValue bc(const BranchingCounts& c) {
  if (c.tp + c.fn == 0) return MetricValue::undefined("no ground-truth branching events");
  const double num = 2.0 * static_cast<double>(c.tp);
  return MetricValue::of(num / (num + static_cast<double>(c.fp) + 2.0 * static_cast<double>(c.fn)));
}

MetricValue bc(const MatchedSequence& m, int window) { return bc(branching_counts(m, window)); }

MetricValue mean_of(std::initializer_list<MetricValue> parts, bool strict) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& p : parts) {
    if (!p.defined()) {
      if (strict) return MetricValue::undefined("undefined component: " + p.reason);
      continue;
    }
    sum += *p;
    ++n;
  }
  if (n == 0) return MetricValue::undefined("all components undefined");
  return MetricValue::of(sum / static_cast<double>(n));
}

MetricValue bio(const MetricValue& ct, const MetricValue& bc, const MetricValue& tf, const MetricValue& cca,
                bool strict) {
  return mean_of({ct, bc, tf, cca}, strict);
}

MetricValue op_csb(const MetricValue& det, const MetricValue& seg, bool strict) { return mean_of({det, seg}, strict); }
MetricValue op_ctb(const MetricValue& det, const MetricValue& tra, bool strict) { return mean_of({det, tra}, strict); }
MetricValue op_clb(const MetricValue& bio, const MetricValue& lnk, bool strict) { return mean_of({bio, lnk}, strict); }

}  // namespace ctm
