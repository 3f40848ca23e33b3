#include "ctm/types.hpp"

#include <algorithm>

namespace ctm {

TrackTable::TrackTable(std::vector<TrackRecord> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(),
            [](const TrackRecord& a, const TrackRecord& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < records_.size(); ++i) {
    if (records_[i].id == records_[i - 1].id) {
      throw std::invalid_argument("duplicate track id " + std::to_string(records_[i].id));
    }
  }
}

const TrackRecord* TrackTable::find(TrackId id) const noexcept {
  auto it = std::lower_bound(records_.begin(), records_.end(), id,
                             [](const TrackRecord& r, TrackId v) { return r.id < v; });
  return (it != records_.end() && it->id == id) ? &*it : nullptr;
}

std::vector<TrackId> TrackTable::daughters_of(TrackId id) const {
  std::vector<TrackId> out;
  if (id == kNoTrack) return out;
  for (const auto& r : records_) {
    if (r.parent == id) out.push_back(r.id);
  }
  return out;
}

std::size_t TrackTable::parent_link_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records_.begin(), records_.end(), [](const TrackRecord& r) { return r.parent != kNoTrack; }));
}

std::vector<Occurrence> occurrences_of(std::span<const LabelFrame> frames) {
  std::vector<Occurrence> out;
  std::vector<std::uint32_t> seen;
  for (const auto& f : frames) {
    seen.assign(f.labels.begin(), f.labels.end());
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (auto v : seen) {
      if (v != 0) out.push_back({f.frame, v});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Occurrence> occurrences_of(std::span<const BoxDetection> boxes) {
  std::vector<Occurrence> out;
  out.reserve(boxes.size());
  for (const auto& b : boxes) out.push_back({b.frame, b.id});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace ctm
