#include "dataset.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "ctm/matching.hpp"

namespace ctmcli {

std::vector<ctm::Occurrence> Sequence::occurrences() const {
  return masks() ? ctm::occurrences_of(frames) : ctm::occurrences_of(boxes);
}

ctm::TrackingData Sequence::tracking_data() const { return {tracks, occurrences(), n_frames}; }

Sequence load_sequence(const fs::path& path, bool strict) {
  Sequence s;
  s.handle = ctm::probe_dataset(path);
  if (s.masks()) {
    s.tracks = ctm::read_ctc_tracks(s.handle.tracks_file);
    s.frames = ctm::read_label_frames(s.handle.frames_dir, s.handle.frame_prefix);
    s.n_frames = static_cast<ctm::Frame>(s.frames.size());
  } else {
    auto mot = ctm::read_mot_boxes(s.handle.tracks_file, {strict});
    s.tracks = std::move(mot.tracks);
    s.boxes = std::move(mot.boxes);
    s.n_frames = mot.n_frames;
    s.warnings = std::move(mot.warnings);
    s.handle.frame_count = s.n_frames;
  }
  return s;
}

std::vector<ctm::Violation> check(const Sequence& s, bool strict) {
  const ctm::ValidationOptions opts{strict};
  if (s.masks()) return ctm::validate(s.tracks, std::span<const ctm::LabelFrame>(s.frames), opts);
  const auto occ = s.occurrences();
  auto vs = ctm::validate(s.tracks, std::span<const ctm::Occurrence>(occ), opts);
  // Box tracks may skip frames (occlusion); strict reads split them instead.
  for (auto& v : vs) {
    if (v.rule == ctm::Rule::no_gap) v.severity = ctm::Severity::warning;
  }
  return vs;
}

namespace {

// Track records for every label seen, so that dirty inputs still match.
ctm::TrackTable complete_tracks(const Sequence& s) {
  std::vector<ctm::TrackRecord> rs(s.tracks.records().begin(), s.tracks.records().end());
  std::map<ctm::TrackId, std::pair<ctm::Frame, ctm::Frame>> extra;
  for (const auto& o : s.occurrences()) {
    if (s.tracks.contains(o.id)) continue;
    auto [it, fresh] = extra.try_emplace(o.id, o.frame, o.frame);
    if (!fresh) it->second.second = std::max(it->second.second, o.frame);
  }
  for (const auto& [id, span] : extra) rs.push_back({id, span.first, span.second, ctm::kNoTrack});
  return ctm::TrackTable(std::move(rs));
}

}  // namespace

ctm::MatchedSequence match_sequences(const Sequence& gt, const Sequence& res, const MatchSettings& settings) {
  if (gt.masks() != res.masks()) throw std::invalid_argument("ground truth and result use different geometries");
  if (gt.masks()) {
    const auto table = ctm::compute_overlaps(gt.frames, res.frames);
    return ctm::match(table, complete_tracks(gt), complete_tracks(res), settings.mode, settings.iou_threshold);
  }
  const ctm::Frame n = std::max(gt.n_frames, res.n_frames);
  if (settings.mode == ctm::MatchMode::ctc) {
    if (!settings.allow_box_ctc) {
      throw std::invalid_argument("majority-overlap matching on boxes needs --allow-box-ctc (or use --match hungarian)");
    }
    const auto table = ctm::rasterize_box_overlaps(gt.boxes, res.boxes, n);
    return ctm::match_ctc(table, complete_tracks(gt), complete_tracks(res));
  }
  const auto table = ctm::compute_box_overlaps(gt.boxes, res.boxes, n);
  return ctm::match_bijective(table, complete_tracks(gt), complete_tracks(res), settings.iou_threshold);
}

namespace {

constexpr int kDiscRadius = 3;

void paint_disc(ctm::LabelFrame& f, int cx, int cy, std::uint32_t label) {
  for (int y = cy - kDiscRadius; y <= cy + kDiscRadius; ++y) {
    for (int x = cx - kDiscRadius; x <= cx + kDiscRadius; ++x) {
      if (x < 0 || y < 0 || x >= f.width || y >= f.height) continue;
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) > kDiscRadius * kDiscRadius) continue;
      auto& px = f.labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(f.width) + static_cast<std::size_t>(x)];
      if (px == 0) px = label;
    }
  }
}

}  // namespace

void export_result(const Sequence& gt, const ctm::MatchedSequence& result, std::uint64_t seed, const fs::path& out) {
  ctm::SplitMix64 rng(seed ^ 0x5eedf00dULL);
  std::map<ctm::Occurrence, ctm::TrackId> relabel;  // gt annotation -> pr id
  for (const auto& e : result.tp) relabel[{e.frame, e.gt}] = e.pr;

  if (gt.masks()) {
    std::vector<ctm::LabelFrame> frames;
    frames.reserve(gt.frames.size());
    for (const auto& g : gt.frames) {
      ctm::LabelFrame f{g.frame, g.width, g.height, std::vector<std::uint32_t>(g.labels.size(), 0)};
      for (std::size_t k = 0; k < g.labels.size(); ++k) {
        if (!g.labels[k]) continue;
        auto it = relabel.find({g.frame, g.labels[k]});
        if (it != relabel.end()) f.labels[k] = it->second;
      }
      frames.push_back(std::move(f));
    }
    for (const auto& e : result.fp) {
      auto& f = frames.at(static_cast<std::size_t>(e.frame));
      if (f.width == 0 || f.height == 0) continue;
      const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(f.width)));
      const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(f.height)));
      paint_disc(f, x, y, e.pr);
    }
    ctm::write_ctc_result(result.pr_tracks, frames, out);
    return;
  }

  std::vector<ctm::BoxDetection> boxes;
  ctm::Milli max_x = 1000, max_y = 1000;
  for (const auto& b : gt.boxes) {
    max_x = std::max(max_x, b.x + b.w);
    max_y = std::max(max_y, b.y + b.h);
    auto it = relabel.find({b.frame, b.id});
    if (it == relabel.end()) continue;
    ctm::BoxDetection d = b;
    d.id = it->second;
    boxes.push_back(d);
  }
  for (const auto& e : result.fp) {
    const auto x = static_cast<ctm::Milli>(rng.below(static_cast<std::uint64_t>(max_x)));
    const auto y = static_cast<ctm::Milli>(rng.below(static_cast<std::uint64_t>(max_y)));
    boxes.push_back({e.frame, e.pr, x, y, 7000, 7000});
  }
  std::sort(boxes.begin(), boxes.end(), [](const auto& a, const auto& b) {
    return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
  });
  fs::create_directories(out.has_parent_path() ? out.parent_path() : fs::path("."));
  ctm::write_mot_boxes(out, boxes);
}

}  // namespace ctmcli
