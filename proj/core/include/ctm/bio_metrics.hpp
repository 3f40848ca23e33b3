#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "ctm/matched.hpp"
#include "ctm/metric_report.hpp"
#include "ctm/options.hpp"

namespace ctm {

/// A parent whose track ends with two or more daughters.
struct BranchingEvent {
  TrackId parent = 0;
  std::vector<TrackId> daughters;  // ascending
  Frame frame = 0;                 // first frame of the daughters

  friend bool operator==(const BranchingEvent&, const BranchingEvent&) = default;
};

std::vector<BranchingEvent> branching_events(const TrackTable& tracks);

/// Lengths of tracks that both start and end at a division.
std::vector<Frame> cell_cycle_lengths(const TrackTable& tracks);

MetricValue seg(const MatchedSequence& m);

struct SegTotals {
  double jaccard_sum = 0.0;
  std::int64_t annotations = 0;

  MetricValue value() const;
};

/// SEG against a separate (possibly sparse) set of pixel-accurate
/// annotations, matched by majority overlap. Annotation frames missing
/// from `pr` count as unmatched.
SegTotals seg_totals(std::span<const LabelFrame> seg_gt, std::span<const LabelFrame> pr);
MetricValue seg(std::span<const LabelFrame> seg_gt, std::span<const LabelFrame> pr);

MetricValue ct(const MatchedSequence& m);
MetricValue tf(const MatchedSequence& m, TfMode mode = TfMode::contiguous);
MetricValue cca(const TrackTable& gt, const TrackTable& pr);

struct BranchingCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

/// Pairs gt and predicted events whose frames differ by at most `window`
/// and whose gt daughters are all matched, at the later of the two event
/// frames, to daughters of the predicted parent. Pairing is greedy by
/// frame distance, then by (gt parent, pr parent).
BranchingCounts branching_counts(const MatchedSequence& m, int window);

/// 2 BTP / (2 BTP + BFP + 2 BFN).
MetricValue bc(const BranchingCounts& counts);
MetricValue bc(const MatchedSequence& m, int window = 1);

/// Mean of the defined components. With `strict`, any undefined component
/// makes the result undefined.
MetricValue mean_of(std::initializer_list<MetricValue> parts, bool strict = false);

MetricValue bio(const MetricValue& ct, const MetricValue& bc, const MetricValue& tf, const MetricValue& cca,
                bool strict = false);
MetricValue op_csb(const MetricValue& det, const MetricValue& seg, bool strict = false);
MetricValue op_ctb(const MetricValue& det, const MetricValue& tra, bool strict = false);
MetricValue op_clb(const MetricValue& bio, const MetricValue& lnk, bool strict = false);

}  // namespace ctm
