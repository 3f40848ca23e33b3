#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ctm/matched.hpp"
#include "ctm/metric_report.hpp"
#include "ctm/options.hpp"

namespace ctm {

struct GraphEdge {
  Occurrence from;
  Occurrence to;
  bool parent = false;  // false: same-id link edge

  friend auto operator<=>(const GraphEdge&, const GraphEdge&) = default;
};

/// Acyclic oriented graph of one side: a vertex per instance, link edges
/// between consecutive instances of one id, parent edges from a parent's
/// last instance to each daughter's first instance.
struct TrackingGraph {
  std::vector<Occurrence> vertices;  // sorted
  std::vector<GraphEdge> edges;      // sorted
};

TrackingGraph build_graph(std::span<const Occurrence> vertices, const TrackTable& tracks);
TrackingGraph gt_graph(const MatchedSequence& m);
TrackingGraph pr_graph(const MatchedSequence& m);

struct EditCounts {
  std::int64_t ns = 0;  // vertex splits
  std::int64_t fn = 0;
  std::int64_t fp = 0;
  std::int64_t ed = 0;  // edges to delete
  std::int64_t ea = 0;  // edges to add
  std::int64_t ec = 0;  // edges with wrong semantics

  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

EditCounts count_edits(const MatchedSequence& m);

double aogm(const EditCounts& c, const AogmWeights& w = {}) noexcept;
/// Cost of building the ground-truth graph from nothing.
double aogm_zero(const TrackingGraph& gt, const AogmWeights& w = {}) noexcept;

/// Weights with the edge terms zeroed (DET) or the vertex terms zeroed (LNK).
AogmWeights detection_weights(const AogmWeights& w) noexcept;
AogmWeights linking_weights(const AogmWeights& w) noexcept;

/// 1 - min(cost, baseline) / baseline; undefined when baseline is 0.
MetricValue normalized_aogm(double cost, double baseline);

MetricValue tra(const MatchedSequence& m, const AogmWeights& w = {});
MetricValue det(const MatchedSequence& m, const AogmWeights& w = {});
MetricValue lnk(const MatchedSequence& m, const AogmWeights& w = {});

}  // namespace ctm
