#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ctm/matched.hpp"
#include "ctm/metric_report.hpp"

namespace ctm {

/// Sparse prediction-to-ground-truth count matrix. Row 0 holds FN counts per
/// gt id, column 0 holds FP counts per pr id, M[i][j] (i, j >= 1) the TPs
/// shared by pr id i and gt id j.
class AccumulatorMatrix {
 public:
  struct Cell {
    TrackId gt = 0;  // 0 = the FP column
    std::int64_t count = 0;
  };

  std::int64_t at(TrackId pr, TrackId gt) const noexcept;
  /// Sum of row `pr` including the FP column; `pr == 0` is the FN row.
  std::int64_t row_sum(TrackId pr) const noexcept;
  /// Sum of column `gt` including the FN row; `gt == 0` is the FP column.
  std::int64_t col_sum(TrackId gt) const noexcept;

  /// Nonzero cells of row `pr`, sorted by gt id.
  const std::vector<Cell>& row(TrackId pr) const noexcept;

  /// Pr ids with a row, ascending (0 first when there are FNs).
  const std::vector<TrackId>& row_ids() const noexcept { return row_ids_; }

  std::int64_t tp() const noexcept { return tp_; }
  std::int64_t fp() const noexcept { return fp_; }
  std::int64_t fn() const noexcept { return fn_; }

  friend AccumulatorMatrix build_accumulator(const MatchedSequence& m);

 private:
  std::vector<TrackId> row_ids_;
  std::vector<std::vector<Cell>> rows_;
  std::unordered_map<TrackId, std::size_t> row_index_;
  std::unordered_map<TrackId, std::int64_t> row_sums_;
  std::unordered_map<TrackId, std::int64_t> col_sums_;
  std::int64_t tp_ = 0, fp_ = 0, fn_ = 0;
};

AccumulatorMatrix build_accumulator(const MatchedSequence& m);

struct AssociationCounts {
  std::int64_t tpa = 0;
  std::int64_t fpa = 0;
  std::int64_t fna = 0;

  double score() const noexcept {
    const auto d = tpa + fpa + fna;
    return d > 0 ? static_cast<double>(tpa) / static_cast<double>(d) : 0.0;
  }
  friend bool operator==(const AssociationCounts&, const AssociationCounts&) = default;
};

/// TPA, FPA and FNA of any TP with pr id `pr` and gt id `gt`, summed over
/// the lineage closures given by the two forests.
AssociationCounts association_counts(TrackId pr, TrackId gt, const AccumulatorMatrix& M,
                                     const LineageForest& pr_forest, const LineageForest& gt_forest);
double association_score(TrackId pr, TrackId gt, const AccumulatorMatrix& M, const LineageForest& pr_forest,
                         const LineageForest& gt_forest);

struct HigherOrderScore {
  MetricValue score;  // sqrt(DetA * AssA)
  MetricValue deta;
  MetricValue assa;
  double association_sum = 0.0;  // sum of A over all TPs
  std::int64_t tp = 0, fp = 0, fn = 0;
};

/// Accumulator evaluation. `lineage` false uses identity closures (HOTA).
HigherOrderScore higher_order(const MatchedSequence& m, bool lineage = true);

MetricValue chota(const MatchedSequence& m);
MetricValue hota(const MatchedSequence& m);

inline constexpr std::size_t kNaiveLimit = 10000;

/// Direct pairwise evaluation over all TP/FP/FN elements, relating ids by
/// walking parent links. Quadratic; throws std::length_error above
/// kNaiveLimit elements.
MetricValue naive_chota(const MatchedSequence& m, bool lineage = true);

}  // namespace ctm
