#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctm/bio_metrics.hpp"
#include "ctm/matched.hpp"
#include "ctm/metric_report.hpp"
#include "ctm/options.hpp"

namespace ctm {

/// Every metric for one sequence, plus the counters needed to pool
/// sequences later. `seg_override` replaces the match-level SEG (e.g. with
/// totals from sparse pixel-accurate annotations).
MetricReport evaluate(const MatchedSequence& m, const EvalOptions& options = {},
                      const std::optional<SegTotals>& seg_override = std::nullopt,
                      std::string sequence = {});

/// Recomputes the composites (BIO, OP_*) from the components already in `r`.
void fill_composites(MetricReport& r);

/// Macro: mean of the defined per-sequence values. Pooled: metrics
/// recomputed from summed counters (CCA cannot be pooled and is undefined).
/// Throws std::invalid_argument on mixed provenance unless `force`.
MetricReport aggregate(std::span<const MetricReport> reports, Aggregate mode, bool force = false);

}  // namespace ctm
