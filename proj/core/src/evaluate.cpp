#include "ctm/evaluate.hpp"

#include <cmath>
#include <stdexcept>

#include "ctm/graph_metrics.hpp"
#include "ctm/higher_order.hpp"
#include "ctm/mot_metrics.hpp"

namespace ctm {

namespace {

double get(const MetricReport& r, const char* key) {
  auto it = r.counters.find(key);
  return it == r.counters.end() ? 0.0 : it->second;
}

MetricValue ratio(double num, double den, const char* reason) {
  if (!(den > 0.0)) return MetricValue::undefined(reason);
  return MetricValue::of(num / den);
}

}  // namespace

void fill_composites(MetricReport& r) {
  const bool strict = r.provenance.bio_strict;
  auto& mv = r.metrics;
  mv[Metric::BIO] = bio(mv[Metric::CT], mv[Metric::BC], mv[Metric::TF], mv[Metric::CCA], strict);
  mv[Metric::OP_CSB] = op_csb(mv[Metric::DET], mv[Metric::SEG], strict);
  mv[Metric::OP_CTB] = op_ctb(mv[Metric::DET], mv[Metric::TRA], strict);
  mv[Metric::OP_CLB] = op_clb(mv[Metric::BIO], mv[Metric::LNK], strict);
}

MetricReport evaluate(const MatchedSequence& m, const EvalOptions& options,
                      const std::optional<SegTotals>& seg_override, std::string sequence) {
  MetricReport r;
  r.sequence = std::move(sequence);
  r.provenance = options;
  r.provenance.matching = m.mode;
  auto& mv = r.metrics;
  auto& c = r.counters;

  c["tp"] = static_cast<double>(m.tp.size());
  c["fp"] = static_cast<double>(m.fp.size());
  c["fn"] = static_cast<double>(m.fn.size());
  c["frames"] = static_cast<double>(m.n_frames);

  // Detection and segmentation.
  if (seg_override) {
    mv[Metric::SEG] = seg_override->value();
    c["seg_jaccard_sum"] = seg_override->jaccard_sum;
    c["seg_annotations"] = static_cast<double>(seg_override->annotations);
  } else {
    mv[Metric::SEG] = seg(m);
    if (mv[Metric::SEG].defined()) {
      double sum = 0.0;
      for (const auto& e : m.tp) sum += e.jaccard;
      c["seg_jaccard_sum"] = sum;
      c["seg_annotations"] = static_cast<double>(m.annotation_count());
    }
  }

  // Graph edit measures.
  const EditCounts edits = count_edits(m);
  const TrackingGraph gt = gt_graph(m);
  const AogmWeights& w = options.weights;
  c["ns"] = static_cast<double>(edits.ns);
  c["ed"] = static_cast<double>(edits.ed);
  c["ea"] = static_cast<double>(edits.ea);
  c["ec"] = static_cast<double>(edits.ec);
  c["gt_vertices"] = static_cast<double>(gt.vertices.size());
  c["gt_edges"] = static_cast<double>(gt.edges.size());
  c["aogm"] = aogm(edits, w);
  c["aogm0"] = aogm_zero(gt, w);
  c["aogm_det"] = aogm(edits, detection_weights(w));
  c["aogm0_det"] = aogm_zero(gt, detection_weights(w));
  c["aogm_lnk"] = aogm(edits, linking_weights(w));
  c["aogm0_lnk"] = aogm_zero(gt, linking_weights(w));
  mv[Metric::TRA] = normalized_aogm(c["aogm"], c["aogm0"]);
  mv[Metric::DET] = normalized_aogm(c["aogm_det"], c["aogm0_det"]);
  mv[Metric::LNK] = normalized_aogm(c["aogm_lnk"], c["aogm0_lnk"]);

  // Biological measures.
  const auto gt_ids = m.gt_ids();
  const auto pr_ids = m.pr_ids();
  mv[Metric::CT] = ct(m);
  if (mv[Metric::CT].defined()) {
    c["ct_complete"] = *mv[Metric::CT] * static_cast<double>(gt_ids.size() + pr_ids.size()) / 2.0;
    c["ct_complete"] = std::round(c["ct_complete"]);
  }
  c["gt_tracks"] = static_cast<double>(gt_ids.size());
  c["pr_tracks"] = static_cast<double>(pr_ids.size());
  mv[Metric::TF] = tf(m, options.tf_mode);
  if (mv[Metric::TF].defined()) c["tf_sum"] = *mv[Metric::TF] * static_cast<double>(gt_ids.size());
  const BranchingCounts branching = branching_counts(m, options.bc_window);
  c["bc_tp"] = static_cast<double>(branching.tp);
  c["bc_fp"] = static_cast<double>(branching.fp);
  c["bc_fn"] = static_cast<double>(branching.fn);
  mv[Metric::BC] = bc(branching);
  mv[Metric::CCA] = cca(m.gt_tracks, m.pr_tracks);

  // Classical multi-object measures.
  c["idsw"] = static_cast<double>(idsw(m));
  c["idtp"] = static_cast<double>(idtp(m));
  mv[Metric::MOTA] = mota(m);
  mv[Metric::IDF1] = idf1(m);
  mv[Metric::Precision] = precision(m);
  mv[Metric::Recall] = recall(m);
  mv[Metric::FAF] = faf(m);
  const TrackCoverage cov = mt_ml(m, options.mt_strict_id);
  c["mt"] = static_cast<double>(cov.mostly_tracked);
  c["ml"] = static_cast<double>(cov.mostly_lost);
  mv[Metric::MT] = cov.mt;
  mv[Metric::ML] = cov.ml;

  // Higher-order measures.
  const HigherOrderScore h = higher_order(m, false);
  const HigherOrderScore ch = higher_order(m, true);
  c["hota_assoc_sum"] = h.association_sum;
  c["chota_assoc_sum"] = ch.association_sum;
  mv[Metric::HOTA] = h.score;
  mv[Metric::CHOTA] = ch.score;
  mv[Metric::DetA] = ch.deta;
  mv[Metric::AssA] = ch.assa;

  fill_composites(r);
  return r;
}

namespace {

void check_provenance(std::span<const MetricReport> reports, bool force) {
  if (force) return;
  for (const auto& r : reports) {
    if (!(r.provenance == reports.front().provenance)) {
      throw std::invalid_argument("reports were produced with different matching or parameters (" +
                                  reports.front().sequence + " vs " + r.sequence + ")");
    }
  }
}

MetricReport macro(std::span<const MetricReport> reports) {
  MetricReport out;
  for (Metric metric : kAllMetrics) {
    double sum = 0.0;
    std::size_t n = 0;
    std::string reason;
    for (const auto& r : reports) {
      auto it = r.metrics.find(metric);
      if (it == r.metrics.end()) continue;
      if (it->second.defined()) {
        sum += *it->second;
        ++n;
      } else if (reason.empty()) {
        reason = it->second.reason;
      }
    }
    out.metrics[metric] = n ? MetricValue::of(sum / static_cast<double>(n))
                            : MetricValue::undefined(reason.empty() ? "no sequence defines this metric" : reason);
  }
  return out;
}

MetricReport pooled(const MetricReport& s) {
  MetricReport out;
  out.provenance = s.provenance;
  out.counters = s.counters;
  auto& mv = out.metrics;
  const double tp = get(s, "tp"), fp = get(s, "fp"), fn = get(s, "fn");

  mv[Metric::SEG] = ratio(get(s, "seg_jaccard_sum"), get(s, "seg_annotations"), "no pixel masks");
  mv[Metric::TRA] = normalized_aogm(get(s, "aogm"), get(s, "aogm0"));
  mv[Metric::DET] = normalized_aogm(get(s, "aogm_det"), get(s, "aogm0_det"));
  mv[Metric::LNK] = normalized_aogm(get(s, "aogm_lnk"), get(s, "aogm0_lnk"));
  mv[Metric::CT] = ratio(2.0 * get(s, "ct_complete"), get(s, "gt_tracks") + get(s, "pr_tracks"), "no tracks");
  mv[Metric::TF] = ratio(get(s, "tf_sum"), get(s, "gt_tracks"), "no ground-truth tracks");
  BranchingCounts b;
  b.tp = static_cast<std::int64_t>(get(s, "bc_tp"));
  b.fp = static_cast<std::int64_t>(get(s, "bc_fp"));
  b.fn = static_cast<std::int64_t>(get(s, "bc_fn"));
  mv[Metric::BC] = bc(b);
  mv[Metric::CCA] = MetricValue::undefined("cycle-length distributions are not pooled");

  if (tp + fn > 0) {
    mv[Metric::MOTA] = MetricValue::of(1.0 - (fn + fp + get(s, "idsw")) / (tp + fn));
  } else {
    mv[Metric::MOTA] = MetricValue::undefined("no annotations");
  }
  mv[Metric::IDF1] = ratio(2.0 * get(s, "idtp"), 2.0 * tp + fn + fp, "no annotations or detections");
  mv[Metric::Precision] = ratio(tp, tp + fp, "no detections");
  mv[Metric::Recall] = ratio(tp, tp + fn, "no annotations");
  mv[Metric::FAF] = ratio(fp, get(s, "frames"), "no frames");
  mv[Metric::MT] = ratio(get(s, "mt"), get(s, "gt_tracks"), "no ground-truth tracks");
  mv[Metric::ML] = ratio(get(s, "ml"), get(s, "gt_tracks"), "no ground-truth tracks");

  const double all = tp + fp + fn;
  if (all > 0) {
    mv[Metric::HOTA] = MetricValue::of(std::sqrt(get(s, "hota_assoc_sum") / all));
    mv[Metric::CHOTA] = MetricValue::of(std::sqrt(get(s, "chota_assoc_sum") / all));
    mv[Metric::DetA] = MetricValue::of(tp / all);
  } else {
    mv[Metric::HOTA] = mv[Metric::CHOTA] = mv[Metric::DetA] = MetricValue::undefined("no annotations or detections");
  }
  mv[Metric::AssA] = ratio(get(s, "chota_assoc_sum"), tp, "no true positives");
  fill_composites(out);
  return out;
}

}  // namespace

MetricReport aggregate(std::span<const MetricReport> reports, Aggregate mode, bool force) {
  if (reports.empty()) throw std::invalid_argument("no reports to aggregate");
  check_provenance(reports, force);
  MetricReport summed;
  summed.provenance = reports.front().provenance;
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.counters) summed.counters[k] += v;
  }
  MetricReport out = reports.size() == 1          ? reports.front()
                     : mode == Aggregate::macro ? macro(reports)
                                                : pooled(summed);
  out.sequence = reports.size() == 1 ? reports.front().sequence : "all";
  out.view = std::string(to_string(mode));
  out.provenance = reports.front().provenance;
  out.counters = summed.counters;
  return out;
}

}  // namespace ctm
