#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ctm/matched.hpp"
#include "ctm/types.hpp"

namespace ctm {

struct LabelSize {
  TrackId id = 0;
  std::int64_t size = 0;
  friend bool operator==(const LabelSize&, const LabelSize&) = default;
};

struct OverlapEntry {
  TrackId pr = 0;
  TrackId gt = 0;
  std::int64_t intersection = 0;
  friend bool operator==(const OverlapEntry&, const OverlapEntry&) = default;
};

/// Overlaps of one frame. All vectors sorted by id; `pairs` by (pr, gt)
/// and holds only nonzero intersections.
struct FrameOverlaps {
  Frame frame = 0;
  std::vector<LabelSize> gt;
  std::vector<LabelSize> pr;
  std::vector<OverlapEntry> pairs;

  std::int64_t gt_size(TrackId id) const noexcept;
  std::int64_t pr_size(TrackId id) const noexcept;
  friend bool operator==(const FrameOverlaps&, const FrameOverlaps&) = default;
};

enum class Geometry {
  pixels,      // label masks; sizes are pixel counts
  boxes,       // exact rectangle areas in (1/1000 px)^2
  raster,      // boxes rasterized by pixel centres; pixel counts
};

struct OverlapTable {
  Geometry geometry = Geometry::pixels;
  std::vector<FrameOverlaps> frames;  // frames[f].frame == f

  Frame n_frames() const noexcept { return static_cast<Frame>(frames.size()); }
};

/// Exact pixel counts. Throws std::invalid_argument when the two sequences
/// differ in frame count or frame dimensions.
OverlapTable compute_overlaps(std::span<const LabelFrame> gt, std::span<const LabelFrame> pr);

/// Rectangle intersection areas. `n_frames` may exceed the last box frame.
OverlapTable compute_box_overlaps(std::span<const BoxDetection> gt, std::span<const BoxDetection> pr,
                                  Frame n_frames);

/// Boxes rasterized onto the integer pixel grid: pixel (x, y) belongs to a
/// box when its centre (x + 0.5, y + 0.5) lies in [x0, x0 + w) x [y0, y0 + h).
OverlapTable rasterize_box_overlaps(std::span<const BoxDetection> gt, std::span<const BoxDetection> pr,
                                    Frame n_frames);

/// Jaccard index of one pair, exact integers until the final division.
double jaccard(std::int64_t intersection, std::int64_t gt_size, std::int64_t pr_size) noexcept;

/// Majority-overlap matching: a detection matches an annotation R when it
/// covers strictly more than half of R. Several annotations may match one
/// detection. Throws std::invalid_argument on exact box geometry.
MatchedSequence match_ctc(const OverlapTable& overlaps, TrackTable gt_tracks, TrackTable pr_tracks);

/// Per-frame one-to-one matching maximising the Jaccard sum over pairs with
/// Jaccard > threshold. Ties go to the lexicographically smallest
/// (gtID, prID) sequence.
MatchedSequence match_bijective(const OverlapTable& overlaps, TrackTable gt_tracks, TrackTable pr_tracks,
                                double threshold = 0.5);

MatchedSequence match(const OverlapTable& overlaps, TrackTable gt_tracks, TrackTable pr_tracks, MatchMode mode,
                      double threshold = 0.5);

}  // namespace ctm
