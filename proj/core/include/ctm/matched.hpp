#pragma once

#include <string_view>
#include <vector>

#include "ctm/lineage.hpp"
#include "ctm/types.hpp"

namespace ctm {

enum class MatchMode { ctc, hungarian };

std::string_view to_string(MatchMode mode) noexcept;

struct TpEntry {
  Frame frame = 0;
  TrackId pr = 0;
  TrackId gt = 0;
  double jaccard = 1.0;

  friend bool operator==(const TpEntry&, const TpEntry&) = default;
};

struct FpEntry {
  Frame frame = 0;
  TrackId pr = 0;
  friend auto operator<=>(const FpEntry&, const FpEntry&) = default;
};

struct FnEntry {
  Frame frame = 0;
  TrackId gt = 0;
  friend auto operator<=>(const FnEntry&, const FnEntry&) = default;
};

/// Match-level representation every metric is computed from.
///
/// Under CTC matching one detection may own several TP entries (it covers
/// more than half of several annotations); under bijective matching it owns
/// at most one. Entries are kept sorted by (frame, pr, gt).
struct MatchedSequence {
  std::vector<TpEntry> tp;
  std::vector<FpEntry> fp;
  std::vector<FnEntry> fn;
  TrackTable gt_tracks;
  TrackTable pr_tracks;
  LineageForest gt_forest;
  LineageForest pr_forest;
  Frame n_frames = 0;
  MatchMode mode = MatchMode::ctc;
  /// Whether the stored Jaccard values come from pixel masks (SEG is defined).
  bool pixel_geometry = true;

  /// Sorts entries and derives both lineage forests from the track tables.
  /// Throws ValidationError if either table's parent links are not a forest.
  static MatchedSequence assemble(std::vector<TpEntry> tp, std::vector<FpEntry> fp, std::vector<FnEntry> fn,
                                  TrackTable gt_tracks, TrackTable pr_tracks, Frame n_frames,
                                  MatchMode mode = MatchMode::ctc, bool pixel_geometry = true);

  std::size_t annotation_count() const noexcept { return tp.size() + fn.size(); }

  /// Distinct gt ids among TP and FN entries, ascending.
  std::vector<TrackId> gt_ids() const;
  /// Distinct pr ids among TP and FP entries, ascending.
  std::vector<TrackId> pr_ids() const;
};

/// Copy of `m` with all parent links removed from both track tables.
MatchedSequence strip_parents(const MatchedSequence& m);

}  // namespace ctm
