#include "ctm/graph_metrics.hpp"

#include <algorithm>
#include <map>

namespace ctm {

TrackingGraph build_graph(std::span<const Occurrence> vertices, const TrackTable& tracks) {
  TrackingGraph g;
  g.vertices.assign(vertices.begin(), vertices.end());
  std::sort(g.vertices.begin(), g.vertices.end());
  g.vertices.erase(std::unique(g.vertices.begin(), g.vertices.end()), g.vertices.end());

  std::map<TrackId, std::vector<Frame>> frames;
  for (const auto& v : g.vertices) frames[v.id].push_back(v.frame);

  for (const auto& [id, fs] : frames) {
    for (std::size_t k = 1; k < fs.size(); ++k) g.edges.push_back({{fs[k - 1], id}, {fs[k], id}, false});
  }
  for (const auto& r : tracks.records()) {
    if (r.parent == kNoTrack) continue;
    auto d = frames.find(r.id);
    auto p = frames.find(r.parent);
    if (d == frames.end() || p == frames.end()) continue;
    if (p->second.back() >= d->second.front()) continue;
    g.edges.push_back({{p->second.back(), r.parent}, {d->second.front(), r.id}, true});
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

TrackingGraph gt_graph(const MatchedSequence& m) {
  std::vector<Occurrence> v;
  v.reserve(m.tp.size() + m.fn.size());
  for (const auto& e : m.tp) v.push_back({e.frame, e.gt});
  for (const auto& e : m.fn) v.push_back({e.frame, e.gt});
  return build_graph(v, m.gt_tracks);
}

TrackingGraph pr_graph(const MatchedSequence& m) {
  std::vector<Occurrence> v;
  v.reserve(m.tp.size() + m.fp.size());
  for (const auto& e : m.tp) v.push_back({e.frame, e.pr});
  for (const auto& e : m.fp) v.push_back({e.frame, e.pr});
  return build_graph(v, m.pr_tracks);
}

EditCounts count_edits(const MatchedSequence& m) {
  EditCounts c;
  c.fn = static_cast<std::int64_t>(m.fn.size());

  // Distinct detections; FP entries never share a detection with TP entries.
  std::map<Occurrence, std::int64_t> per_detection;
  std::map<Occurrence, Occurrence> gt_to_pr;
  std::multimap<Occurrence, Occurrence> pr_to_gt;
  for (const auto& e : m.tp) {
    const Occurrence p{e.frame, e.pr}, g{e.frame, e.gt};
    ++per_detection[p];
    gt_to_pr[g] = p;
    pr_to_gt.emplace(p, g);
  }
  for (const auto& [det, k] : per_detection) c.ns += k - 1;
  c.fp = static_cast<std::int64_t>(m.fp.size());

  const TrackingGraph gt = gt_graph(m);
  const TrackingGraph pr = pr_graph(m);

  auto find_pr_edge = [&](const Occurrence& a, const Occurrence& b) -> const GraphEdge* {
    auto it = std::lower_bound(pr.edges.begin(), pr.edges.end(), GraphEdge{a, b, false});
    if (it != pr.edges.end() && it->from == a && it->to == b) return &*it;
    return nullptr;
  };
  auto has_gt_edge = [&](const Occurrence& a, const Occurrence& b) {
    auto it = std::lower_bound(gt.edges.begin(), gt.edges.end(), GraphEdge{a, b, false});
    return it != gt.edges.end() && it->from == a && it->to == b;
  };

  for (const auto& e : gt.edges) {
    auto a = gt_to_pr.find(e.from);
    auto b = gt_to_pr.find(e.to);
    const GraphEdge* pe = (a != gt_to_pr.end() && b != gt_to_pr.end()) ? find_pr_edge(a->second, b->second) : nullptr;
    if (!pe) {
      ++c.ea;
    } else if (pe->parent != e.parent) {
      ++c.ec;
    }
  }

  for (const auto& e : pr.edges) {
    auto [a0, a1] = pr_to_gt.equal_range(e.from);
    auto [b0, b1] = pr_to_gt.equal_range(e.to);
    if (a0 == a1 || b0 == b1) continue;  // removed together with an FP vertex
    bool counterpart = false;
    for (auto a = a0; a != a1 && !counterpart; ++a) {
      for (auto b = b0; b != b1 && !counterpart; ++b) counterpart = has_gt_edge(a->second, b->second);
    }
    if (!counterpart) ++c.ed;
  }
  return c;
}

double aogm(const EditCounts& c, const AogmWeights& w) noexcept {
  return w.ns * static_cast<double>(c.ns) + w.fn * static_cast<double>(c.fn) + w.fp * static_cast<double>(c.fp) +
         w.ed * static_cast<double>(c.ed) + w.ea * static_cast<double>(c.ea) + w.ec * static_cast<double>(c.ec);
}

double aogm_zero(const TrackingGraph& gt, const AogmWeights& w) noexcept {
  return w.fn * static_cast<double>(gt.vertices.size()) + w.ea * static_cast<double>(gt.edges.size());
}

AogmWeights detection_weights(const AogmWeights& w) noexcept {
  AogmWeights d = w;
  d.ed = d.ea = d.ec = 0.0;
  return d;
}

AogmWeights linking_weights(const AogmWeights& w) noexcept {
  AogmWeights l = w;
  l.ns = l.fn = l.fp = 0.0;
  return l;
}

MetricValue normalized_aogm(double cost, double baseline) {
  if (!(baseline > 0.0)) return MetricValue::undefined("empty ground-truth graph");
  return MetricValue::of(1.0 - std::min(cost, baseline) / baseline);
}

namespace {

MetricValue scored(const MatchedSequence& m, const AogmWeights& w, const char* empty_reason) {
  const double base = aogm_zero(gt_graph(m), w);
  if (!(base > 0.0)) return MetricValue::undefined(empty_reason);
  return normalized_aogm(aogm(count_edits(m), w), base);
}

}  // namespace

MetricValue tra(const MatchedSequence& m, const AogmWeights& w) {
  return scored(m, w, "empty ground-truth graph");
}

MetricValue det(const MatchedSequence& m, const AogmWeights& w) {
  return scored(m, detection_weights(w), "no ground-truth vertices");
}

MetricValue lnk(const MatchedSequence& m, const AogmWeights& w) {
  return scored(m, linking_weights(w), "no ground-truth edges");
}

}  // namespace ctm
