#include "ctm/matched.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

#include "ctm/metric_report.hpp"
#include "ctm/options.hpp"

namespace ctm {

std::string_view to_string(MatchMode mode) noexcept {
  return mode == MatchMode::ctc ? "ctc" : "hungarian";
}

std::string_view to_string(TfMode mode) noexcept {
  return mode == TfMode::contiguous ? "contiguous" : "count";
}

std::string_view to_string(Aggregate mode) noexcept {
  return mode == Aggregate::macro ? "macro" : "pooled";
}

MatchedSequence MatchedSequence::assemble(std::vector<TpEntry> tp, std::vector<FpEntry> fp, std::vector<FnEntry> fn,
                                          TrackTable gt_tracks, TrackTable pr_tracks, Frame n_frames, MatchMode mode,
                                          bool pixel_geometry) {
  MatchedSequence m;
  std::sort(tp.begin(), tp.end(), [](const TpEntry& a, const TpEntry& b) {
    return std::tie(a.frame, a.pr, a.gt) < std::tie(b.frame, b.pr, b.gt);
  });
  std::sort(fp.begin(), fp.end());
  std::sort(fn.begin(), fn.end());
  m.tp = std::move(tp);
  m.fp = std::move(fp);
  m.fn = std::move(fn);
  m.gt_forest = build_lineage_closure(gt_tracks);
  m.pr_forest = build_lineage_closure(pr_tracks);
  m.gt_tracks = std::move(gt_tracks);
  m.pr_tracks = std::move(pr_tracks);
  m.n_frames = n_frames;
  m.mode = mode;
  m.pixel_geometry = pixel_geometry;
  return m;
}

std::vector<TrackId> MatchedSequence::gt_ids() const {
  std::vector<TrackId> ids;
  ids.reserve(tp.size() + fn.size());
  for (const auto& e : tp) ids.push_back(e.gt);
  for (const auto& e : fn) ids.push_back(e.gt);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<TrackId> MatchedSequence::pr_ids() const {
  std::vector<TrackId> ids;
  ids.reserve(tp.size() + fp.size());
  for (const auto& e : tp) ids.push_back(e.pr);
  for (const auto& e : fp) ids.push_back(e.pr);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

namespace {

TrackTable without_parents(const TrackTable& t) {
  std::vector<TrackRecord> rs(t.records().begin(), t.records().end());
  for (auto& r : rs) r.parent = kNoTrack;
  return TrackTable(std::move(rs));
}

}  // namespace

MatchedSequence strip_parents(const MatchedSequence& m) {
  MatchedSequence out = m;
  out.gt_tracks = without_parents(m.gt_tracks);
  out.pr_tracks = without_parents(m.pr_tracks);
  out.gt_forest = identity_forest(out.gt_tracks);
  out.pr_forest = identity_forest(out.pr_tracks);
  return out;
}

std::string_view metric_name(Metric m) noexcept {
  switch (m) {
    case Metric::SEG: return "SEG";
    case Metric::CT: return "CT";
    case Metric::TF: return "TF";
    case Metric::BC: return "BC";
    case Metric::CCA: return "CCA";
    case Metric::BIO: return "BIO";
    case Metric::TRA: return "TRA";
    case Metric::DET: return "DET";
    case Metric::LNK: return "LNK";
    case Metric::OP_CSB: return "OP_CSB";
    case Metric::OP_CTB: return "OP_CTB";
    case Metric::OP_CLB: return "OP_CLB";
    case Metric::MOTA: return "MOTA";
    case Metric::IDF1: return "IDF1";
    case Metric::Precision: return "Precision";
    case Metric::Recall: return "Recall";
    case Metric::FAF: return "FAF";
    case Metric::MT: return "MT";
    case Metric::ML: return "ML";
    case Metric::HOTA: return "HOTA";
    case Metric::CHOTA: return "CHOTA";
    case Metric::DetA: return "DetA";
    case Metric::AssA: return "AssA";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view name) noexcept {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string key = lower(name);
  if (key.starts_with("bc(")) return Metric::BC;
  if (key.starts_with("bio(")) return Metric::BIO;
  for (Metric m : kAllMetrics) {
    if (lower(metric_name(m)) == key) return m;
  }
  return std::nullopt;
}

}  // namespace ctm
