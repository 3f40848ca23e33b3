#include "ctm/validate.hpp"

#include <algorithm>
#include <tuple>
#include <map>
#include <unordered_set>

namespace ctm {

std::string_view rule_name(Rule rule) noexcept {
  switch (rule) {
    case Rule::invalid_id: return "invalid id";
    case Rule::self_parent: return "self parent";
    case Rule::end_before_begin: return "end < begin";
    case Rule::unknown_parent: return "unknown parent";
    case Rule::parent_overlap: return "parent overlap";
    case Rule::parent_gap: return "parent gap";
    case Rule::parent_cycle: return "parent cycle";
    case Rule::no_gap: return "no-gap rule";
    case Rule::outside_span: return "label outside span";
    case Rule::unknown_label: return "unknown label";
    case Rule::dimension_mismatch: return "dimension mismatch";
  }
  return "unknown";
}

bool has_errors(std::span<const Violation> violations) noexcept {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.severity == Severity::error; });
}

namespace {

std::string track_str(TrackId id) { return "track " + std::to_string(id); }

}  // namespace

std::vector<Violation> validate_tracks(const TrackTable& tracks) {
  std::vector<Violation> out;
  auto add = [&](Severity s, Rule r, TrackId t, std::string msg) {
    out.push_back({s, r, -1, t, std::move(msg)});
  };

  for (const auto& r : tracks.records()) {
    if (r.id < 1) add(Severity::error, Rule::invalid_id, r.id, "track id must be >= 1");
    if (r.begin < 0) add(Severity::error, Rule::end_before_begin, r.id, track_str(r.id) + " begins before frame 0");
    if (r.end < r.begin) {
      add(Severity::error, Rule::end_before_begin, r.id,
          track_str(r.id) + ": end " + std::to_string(r.end) + " < begin " + std::to_string(r.begin));
    }
    if (r.parent == kNoTrack) continue;
    if (r.parent == r.id) {
      add(Severity::error, Rule::self_parent, r.id, track_str(r.id) + " is its own parent");
      continue;
    }
    const TrackRecord* p = tracks.find(r.parent);
    if (!p) {
      add(Severity::error, Rule::unknown_parent, r.id,
          track_str(r.id) + " references unknown parent " + std::to_string(r.parent));
      continue;
    }
    if (p->end >= r.begin) {
      add(Severity::error, Rule::parent_overlap, r.id,
          track_str(r.id) + " begins at " + std::to_string(r.begin) + " but parent " + std::to_string(p->id) +
              " ends at " + std::to_string(p->end));
    } else if (r.begin - p->end > 1) {
      add(Severity::warning, Rule::parent_gap, r.id,
          track_str(r.id) + " begins " + std::to_string(r.begin - p->end) + " frames after parent " +
              std::to_string(p->id) + " ends");
    }
  }

  // Cycle detection by walking parent chains with a step bound.
  std::unordered_set<TrackId> reported;
  for (const auto& r : tracks.records()) {
    TrackId cur = r.parent;
    std::size_t steps = 0;
    while (cur != kNoTrack && steps <= tracks.size()) {
      const TrackRecord* p = tracks.find(cur);
      if (!p || p->parent == p->id) break;
      cur = p->parent;
      ++steps;
    }
    if (steps > tracks.size() && reported.insert(r.id).second) {
      add(Severity::error, Rule::parent_cycle, r.id, track_str(r.id) + " lies on or below a parent cycle");
    }
  }
  return out;
}

std::vector<Violation> validate(const TrackTable& tracks, std::span<const Occurrence> occurrences,
                                const ValidationOptions& options) {
  auto out = validate_tracks(tracks);
  const Severity loose = options.strict ? Severity::error : Severity::warning;

  std::map<TrackId, std::vector<Frame>> seen;
  for (const auto& o : occurrences) seen[o.id].push_back(o.frame);

  for (auto& [id, frames] : seen) {
    std::sort(frames.begin(), frames.end());
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    const TrackRecord* r = tracks.find(id);
    if (!r) {
      out.push_back({loose, Rule::unknown_label, frames.front(), id,
                     "label " + std::to_string(id) + " has no track record"});
      continue;
    }
    for (Frame f : frames) {
      if (!r->alive_at(f)) {
        out.push_back({loose, Rule::outside_span, f, id,
                       "label " + std::to_string(id) + " present in frame " + std::to_string(f) +
                           " outside its span [" + std::to_string(r->begin) + "," + std::to_string(r->end) + "]"});
      }
    }
  }

  for (const auto& r : tracks.records()) {
    if (r.end < r.begin) continue;
    auto it = seen.find(r.id);
    static const std::vector<Frame> kEmpty;
    const auto& frames = it == seen.end() ? kEmpty : it->second;
    for (Frame f = r.begin; f <= r.end; ++f) {
      if (!std::binary_search(frames.begin(), frames.end(), f)) {
        out.push_back({Severity::error, Rule::no_gap, f, r.id,
                       track_str(r.id) + " has no instance in frame " + std::to_string(f)});
      }
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.frame, a.track) < std::tie(b.frame, b.track);
  });
  return out;
}

std::vector<Violation> validate(const TrackTable& tracks, std::span<const LabelFrame> frames,
                                const ValidationOptions& options) {
  std::vector<Violation> dims;
  if (!frames.empty()) {
    const auto w = frames.front().width;
    const auto h = frames.front().height;
    for (const auto& f : frames) {
      if (f.width != w || f.height != h) {
        dims.push_back({Severity::error, Rule::dimension_mismatch, f.frame, kNoTrack,
                        "frame " + std::to_string(f.frame) + " is " + std::to_string(f.width) + "x" +
                            std::to_string(f.height) + ", expected " + std::to_string(w) + "x" + std::to_string(h)});
      }
    }
  }
  auto out = validate(tracks, occurrences_of(frames), options);
  out.insert(out.begin(), dims.begin(), dims.end());
  return out;
}

}  // namespace ctm
