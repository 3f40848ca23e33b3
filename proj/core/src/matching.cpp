#include "ctm/matching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

#include "ctm/assignment.hpp"
#include "ctm/parallel.hpp"

namespace ctm {

namespace {

std::int64_t size_of(const std::vector<LabelSize>& sizes, TrackId id) noexcept {
  auto it = std::lower_bound(sizes.begin(), sizes.end(), id,
                             [](const LabelSize& s, TrackId v) { return s.id < v; });
  return it != sizes.end() && it->id == id ? it->size : 0;
}

std::vector<LabelSize> to_sizes(const std::map<TrackId, std::int64_t>& m) {
  std::vector<LabelSize> out;
  out.reserve(m.size());
  for (const auto& [id, n] : m) out.push_back({id, n});
  return out;
}

FrameOverlaps pixel_frame(const LabelFrame* gt, const LabelFrame* pr, Frame f) {
  FrameOverlaps out;
  out.frame = f;
  std::map<TrackId, std::int64_t> gs, ps;
  std::unordered_map<std::uint64_t, std::int64_t> inter;
  const std::size_t n = gt ? gt->labels.size() : (pr ? pr->labels.size() : 0);
  for (std::size_t k = 0; k < n; ++k) {
    const TrackId g = gt ? gt->labels[k] : 0;
    const TrackId p = pr ? pr->labels[k] : 0;
    if (g) ++gs[g];
    if (p) ++ps[p];
    if (g && p) ++inter[(static_cast<std::uint64_t>(p) << 32) | g];
  }
  out.gt = to_sizes(gs);
  out.pr = to_sizes(ps);
  out.pairs.reserve(inter.size());
  for (const auto& [key, count] : inter) {
    out.pairs.push_back({static_cast<TrackId>(key >> 32), static_cast<TrackId>(key & 0xffffffffu), count});
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const OverlapEntry& a, const OverlapEntry& b) { return std::tie(a.pr, a.gt) < std::tie(b.pr, b.gt); });
  return out;
}

std::vector<std::vector<const BoxDetection*>> by_frame(std::span<const BoxDetection> boxes, Frame n_frames) {
  std::vector<std::vector<const BoxDetection*>> out(static_cast<std::size_t>(n_frames));
  for (const auto& b : boxes) {
    if (b.frame < 0 || b.frame >= n_frames) {
      throw std::invalid_argument("box in frame " + std::to_string(b.frame) + " outside [0," +
                                  std::to_string(n_frames) + ")");
    }
    out[static_cast<std::size_t>(b.frame)].push_back(&b);
  }
  return out;
}

struct Extent {
  std::int64_t x0, x1, y0, y1;  // half-open
};

Extent exact_extent(const BoxDetection& b) { return {b.x, b.x + b.w, b.y, b.y + b.h}; }

// First integer k with 1000k + 500 >= v.
std::int64_t first_pixel(Milli v) {
  const std::int64_t num = v - 500;
  return num >= 0 ? (num + 999) / 1000 : -((-num) / 1000);
}

Extent raster_extent(const BoxDetection& b) {
  return {first_pixel(b.x), first_pixel(b.x + b.w), first_pixel(b.y), first_pixel(b.y + b.h)};
}

std::int64_t area(const Extent& e) {
  return std::max<std::int64_t>(0, e.x1 - e.x0) * std::max<std::int64_t>(0, e.y1 - e.y0);
}

std::int64_t overlap_area(const Extent& a, const Extent& b) {
  const std::int64_t w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const std::int64_t h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  return w > 0 && h > 0 ? w * h : 0;
}

OverlapTable box_table(std::span<const BoxDetection> gt, std::span<const BoxDetection> pr, Frame n_frames,
                       Geometry geometry) {
  OverlapTable table;
  table.geometry = geometry;
  table.frames.resize(static_cast<std::size_t>(std::max<Frame>(n_frames, 0)));
  const auto g = by_frame(gt, n_frames);
  const auto p = by_frame(pr, n_frames);
  auto extent = geometry == Geometry::raster ? raster_extent : exact_extent;
  parallel_for(table.frames.size(), [&](std::size_t f) {
    FrameOverlaps& out = table.frames[f];
    out.frame = static_cast<Frame>(f);
    std::map<TrackId, std::int64_t> gs, ps;
    for (const auto* b : g[f]) gs[b->id] = area(extent(*b));
    for (const auto* b : p[f]) ps[b->id] = area(extent(*b));
    for (const auto* pb : p[f]) {
      for (const auto* gb : g[f]) {
        const std::int64_t a = overlap_area(extent(*pb), extent(*gb));
        if (a > 0) out.pairs.push_back({pb->id, gb->id, a});
      }
    }
    out.gt = to_sizes(gs);
    out.pr = to_sizes(ps);
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const OverlapEntry& a, const OverlapEntry& b) { return std::tie(a.pr, a.gt) < std::tie(b.pr, b.gt); });
  });
  return table;
}

void check_geometry(const OverlapTable& overlaps) {
  if (overlaps.geometry == Geometry::boxes) {
    throw std::invalid_argument("majority-overlap matching needs pixel masks; rasterize boxes to opt in");
  }
}

MatchedSequence finish(const OverlapTable& overlaps, std::vector<TpEntry> tp, TrackTable gt_tracks,
                       TrackTable pr_tracks, MatchMode mode) {
  std::vector<FpEntry> fp;
  std::vector<FnEntry> fn;
  std::size_t k = 0;
  std::sort(tp.begin(), tp.end(), [](const TpEntry& a, const TpEntry& b) {
    return std::tie(a.frame, a.pr, a.gt) < std::tie(b.frame, b.pr, b.gt);
  });
  for (const auto& fr : overlaps.frames) {
    std::vector<TrackId> matched_pr, matched_gt;
    for (; k < tp.size() && tp[k].frame == fr.frame; ++k) {
      matched_pr.push_back(tp[k].pr);
      matched_gt.push_back(tp[k].gt);
    }
    std::sort(matched_pr.begin(), matched_pr.end());
    std::sort(matched_gt.begin(), matched_gt.end());
    for (const auto& s : fr.pr) {
      if (!std::binary_search(matched_pr.begin(), matched_pr.end(), s.id)) fp.push_back({fr.frame, s.id});
    }
    for (const auto& s : fr.gt) {
      if (!std::binary_search(matched_gt.begin(), matched_gt.end(), s.id)) fn.push_back({fr.frame, s.id});
    }
  }
  return MatchedSequence::assemble(std::move(tp), std::move(fp), std::move(fn), std::move(gt_tracks),
                                   std::move(pr_tracks), overlaps.n_frames(), mode,
                                   overlaps.geometry == Geometry::pixels);
}

}  // namespace

std::int64_t FrameOverlaps::gt_size(TrackId id) const noexcept { return size_of(gt, id); }
std::int64_t FrameOverlaps::pr_size(TrackId id) const noexcept { return size_of(pr, id); }

double jaccard(std::int64_t intersection, std::int64_t gt_size, std::int64_t pr_size) noexcept {
  const std::int64_t uni = gt_size + pr_size - intersection;
  return uni > 0 ? static_cast<double>(intersection) / static_cast<double>(uni) : 0.0;
}

OverlapTable compute_overlaps(std::span<const LabelFrame> gt, std::span<const LabelFrame> pr) {
  if (gt.size() != pr.size()) {
    throw std::invalid_argument("frame count mismatch: " + std::to_string(gt.size()) + " ground-truth vs " +
                                std::to_string(pr.size()) + " result frames");
  }
  for (std::size_t f = 0; f < gt.size(); ++f) {
    if (gt[f].width != pr[f].width || gt[f].height != pr[f].height) {
      throw std::invalid_argument("dimension mismatch in frame " + std::to_string(gt[f].frame));
    }
    if (gt[f].frame != static_cast<Frame>(f) || pr[f].frame != static_cast<Frame>(f)) {
      throw std::invalid_argument("frames must be indexed 0.." + std::to_string(gt.size() - 1));
    }
  }
  OverlapTable table;
  table.geometry = Geometry::pixels;
  table.frames.resize(gt.size());
  parallel_for(gt.size(), [&](std::size_t f) { table.frames[f] = pixel_frame(&gt[f], &pr[f], static_cast<Frame>(f)); });
  return table;
}

OverlapTable compute_box_overlaps(std::span<const BoxDetection> gt, std::span<const BoxDetection> pr,
                                  Frame n_frames) {
  return box_table(gt, pr, n_frames, Geometry::boxes);
}

OverlapTable rasterize_box_overlaps(std::span<const BoxDetection> gt, std::span<const BoxDetection> pr,
                                    Frame n_frames) {
  return box_table(gt, pr, n_frames, Geometry::raster);
}

MatchedSequence match_ctc(const OverlapTable& overlaps, TrackTable gt_tracks, TrackTable pr_tracks) {
  check_geometry(overlaps);
  std::vector<TpEntry> tp;
  for (const auto& fr : overlaps.frames) {
    // Best qualifying detection per annotation; with disjoint masks there is at most one.
    std::map<TrackId, const OverlapEntry*> best;
    for (const auto& e : fr.pairs) {
      if (2 * e.intersection <= fr.gt_size(e.gt)) continue;
      auto [it, fresh] = best.try_emplace(e.gt, &e);
      if (!fresh && e.intersection > it->second->intersection) it->second = &e;
    }
    for (const auto& [g, e] : best) {
      tp.push_back({fr.frame, e->pr, g, jaccard(e->intersection, fr.gt_size(g), fr.pr_size(e->pr))});
    }
  }
  return finish(overlaps, std::move(tp), std::move(gt_tracks), std::move(pr_tracks), MatchMode::ctc);
}

MatchedSequence match_bijective(const OverlapTable& overlaps, TrackTable gt_tracks, TrackTable pr_tracks,
                                double threshold) {
  constexpr double kScale = 1e12;
  std::vector<std::vector<TpEntry>> per_frame(overlaps.frames.size());
  parallel_for(overlaps.frames.size(), [&](std::size_t f) {
    const auto& fr = overlaps.frames[f];
    std::vector<WeightedEdge> edges;
    std::map<std::pair<TrackId, TrackId>, double> js;
    for (const auto& e : fr.pairs) {
      const double j = jaccard(e.intersection, fr.gt_size(e.gt), fr.pr_size(e.pr));
      if (!(j > threshold)) continue;
      const auto w = static_cast<std::int64_t>(std::llround(j * kScale));
      if (w <= 0) continue;
      edges.push_back({e.gt, e.pr, w});
      js[{e.gt, e.pr}] = j;
    }
    for (const auto& [g, p] : sparse_max_weight_matching(edges, TieBreak::lexicographic)) {
      const auto gi = static_cast<TrackId>(g);
      const auto pi = static_cast<TrackId>(p);
      per_frame[f].push_back({fr.frame, pi, gi, js.at({gi, pi})});
    }
  });
  std::vector<TpEntry> tp;
  for (auto& v : per_frame) tp.insert(tp.end(), v.begin(), v.end());
  return finish(overlaps, std::move(tp), std::move(gt_tracks), std::move(pr_tracks), MatchMode::hungarian);
}

MatchedSequence match(const OverlapTable& overlaps, TrackTable gt_tracks, TrackTable pr_tracks, MatchMode mode,
                      double threshold) {
  if (mode == MatchMode::ctc) return match_ctc(overlaps, std::move(gt_tracks), std::move(pr_tracks));
  return match_bijective(overlaps, std::move(gt_tracks), std::move(pr_tracks), threshold);
}

}  // namespace ctm
