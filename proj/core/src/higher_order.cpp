#include "ctm/higher_order.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ctm/parallel.hpp"

namespace ctm {

namespace {

const std::vector<AccumulatorMatrix::Cell> kEmptyRow;

std::int64_t lookup(const std::unordered_map<TrackId, std::int64_t>& m, TrackId id) noexcept {
  auto it = m.find(id);
  return it == m.end() ? 0 : it->second;
}

}  // namespace

std::int64_t AccumulatorMatrix::at(TrackId pr, TrackId gt) const noexcept {
  const auto& r = row(pr);
  auto it = std::lower_bound(r.begin(), r.end(), gt, [](const Cell& c, TrackId v) { return c.gt < v; });
  return it != r.end() && it->gt == gt ? it->count : 0;
}

std::int64_t AccumulatorMatrix::row_sum(TrackId pr) const noexcept { return lookup(row_sums_, pr); }
std::int64_t AccumulatorMatrix::col_sum(TrackId gt) const noexcept { return lookup(col_sums_, gt); }

const std::vector<AccumulatorMatrix::Cell>& AccumulatorMatrix::row(TrackId pr) const noexcept {
  auto it = row_index_.find(pr);
  return it == row_index_.end() ? kEmptyRow : rows_[it->second];
}

AccumulatorMatrix build_accumulator(const MatchedSequence& m) {
  std::map<TrackId, std::map<TrackId, std::int64_t>> cells;
  for (const auto& e : m.tp) ++cells[e.pr][e.gt];
  for (const auto& e : m.fp) ++cells[e.pr][kNoTrack];
  for (const auto& e : m.fn) ++cells[kNoTrack][e.gt];

  AccumulatorMatrix M;
  M.tp_ = static_cast<std::int64_t>(m.tp.size());
  M.fp_ = static_cast<std::int64_t>(m.fp.size());
  M.fn_ = static_cast<std::int64_t>(m.fn.size());
  M.rows_.reserve(cells.size());
  for (const auto& [pr, row] : cells) {
    M.row_index_.emplace(pr, M.rows_.size());
    M.row_ids_.push_back(pr);
    auto& out = M.rows_.emplace_back();
    out.reserve(row.size());
    std::int64_t sum = 0;
    for (const auto& [gt, n] : row) {
      out.push_back({gt, n});
      sum += n;
      M.col_sums_[gt] += n;
    }
    M.row_sums_[pr] = sum;
  }
  return M;
}

AssociationCounts association_counts(TrackId pr, TrackId gt, const AccumulatorMatrix& M,
                                     const LineageForest& pr_forest, const LineageForest& gt_forest) {
  const auto li = pr_forest.closure(pr);
  const auto lj = gt_forest.closure(gt);
  AssociationCounts c;
  std::int64_t rows = 0, cols = 0;
  for (TrackId i : li) {
    rows += M.row_sum(i);
    for (const auto& cell : M.row(i)) {
      if (cell.gt != kNoTrack && std::binary_search(lj.begin(), lj.end(), cell.gt)) c.tpa += cell.count;
    }
  }
  for (TrackId j : lj) cols += M.col_sum(j);
  c.fpa = rows - c.tpa;
  c.fna = cols - c.tpa;
  return c;
}

double association_score(TrackId pr, TrackId gt, const AccumulatorMatrix& M, const LineageForest& pr_forest,
                         const LineageForest& gt_forest) {
  return association_counts(pr, gt, M, pr_forest, gt_forest).score();
}

namespace {

HigherOrderScore finish(double assoc_sum, std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  HigherOrderScore s;
  s.association_sum = assoc_sum;
  s.tp = tp;
  s.fp = fp;
  s.fn = fn;
  const std::int64_t denom = tp + fp + fn;
  if (denom == 0) {
    s.score = s.deta = MetricValue::undefined("no annotations or detections");
    s.assa = MetricValue::undefined("no true positives");
    return s;
  }
  s.score = MetricValue::of(std::sqrt(assoc_sum / static_cast<double>(denom)));
  s.deta = MetricValue::of(static_cast<double>(tp) / static_cast<double>(denom));
  s.assa = tp > 0 ? MetricValue::of(assoc_sum / static_cast<double>(tp)) : MetricValue::undefined("no true positives");
  return s;
}

}  // namespace

HigherOrderScore higher_order(const MatchedSequence& m, bool lineage) {
  const AccumulatorMatrix M = build_accumulator(m);
  const LineageForest pr_id = lineage ? LineageForest{} : identity_forest(m.pr_tracks);
  const LineageForest gt_id = lineage ? LineageForest{} : identity_forest(m.gt_tracks);
  const LineageForest& pf = lineage ? m.pr_forest : pr_id;
  const LineageForest& gf = lineage ? m.gt_forest : gt_id;

  struct Job {
    TrackId pr, gt;
    std::int64_t count;
  };
  std::vector<Job> jobs;
  for (TrackId pr : M.row_ids()) {
    if (pr == kNoTrack) continue;
    for (const auto& cell : M.row(pr)) {
      if (cell.gt != kNoTrack) jobs.push_back({pr, cell.gt, cell.count});
    }
  }
  std::vector<double> contrib(jobs.size());
  auto run = [&](std::size_t k) {
    contrib[k] = static_cast<double>(jobs[k].count) * association_score(jobs[k].pr, jobs[k].gt, M, pf, gf);
  };
  if (jobs.size() > 4096) {
    parallel_for(jobs.size(), run);
  } else {
    for (std::size_t k = 0; k < jobs.size(); ++k) run(k);
  }
  double sum = 0.0;
  for (double v : contrib) sum += v;
  return finish(sum, M.tp(), M.fp(), M.fn());
}

MetricValue chota(const MatchedSequence& m) { return higher_order(m, true).score; }
MetricValue hota(const MatchedSequence& m) { return higher_order(m, false).score; }

namespace {

bool descends_from(TrackId child, TrackId ancestor, const TrackTable& tracks) {
  std::size_t guard = 0;
  for (const TrackRecord* r = tracks.find(child); r && r->parent != kNoTrack && guard <= tracks.size(); ++guard) {
    if (r->parent == ancestor) return true;
    r = tracks.find(r->parent);
  }
  return false;
}

bool related(TrackId a, TrackId b, const TrackTable& tracks, bool lineage) {
  if (a == kNoTrack || b == kNoTrack || !tracks.contains(a) || !tracks.contains(b)) return false;
  if (a == b) return true;
  return lineage && (descends_from(a, b, tracks) || descends_from(b, a, tracks));
}

}  // namespace

MetricValue naive_chota(const MatchedSequence& m, bool lineage) {
  const std::size_t n = m.tp.size() + m.fp.size() + m.fn.size();
  if (n > kNaiveLimit) throw std::length_error("naive evaluation limited to " + std::to_string(kNaiveLimit) + " elements");
  if (n == 0) return MetricValue::undefined("no annotations or detections");
  double sum = 0.0;
  for (const auto& c : m.tp) {
    std::int64_t tpa = 0, fna = 0, fpa = 0;
    for (const auto& k : m.tp) {
      const bool p = related(k.pr, c.pr, m.pr_tracks, lineage);
      const bool g = related(k.gt, c.gt, m.gt_tracks, lineage);
      if (p && g) ++tpa;
      if (!p && g) ++fna;
      if (p && !g) ++fpa;
    }
    for (const auto& k : m.fn) {
      if (related(k.gt, c.gt, m.gt_tracks, lineage)) ++fna;
    }
    for (const auto& k : m.fp) {
      if (related(k.pr, c.pr, m.pr_tracks, lineage)) ++fpa;
    }
    if (tpa > 0) sum += static_cast<double>(tpa) / static_cast<double>(tpa + fna + fpa);
  }
  return MetricValue::of(std::sqrt(sum / static_cast<double>(n)));
}

}  // namespace ctm
