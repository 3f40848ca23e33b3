#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "ctm/types.hpp"

namespace ctm {

/// Parent map over track ids plus the derived lineage closure l(i):
/// the id itself, all of its ancestors and all of its descendants.
/// Siblings and cousins are not related.
class LineageForest {
 public:
  LineageForest() = default;

  std::span<const TrackId> ids() const noexcept { return ids_; }
  TrackId parent_of(TrackId id) const noexcept;
  bool contains(TrackId id) const noexcept { return index_.count(id) != 0; }

  /// Sorted closure of `id`; empty when `id` is unknown (including 0).
  std::span<const TrackId> closure(TrackId id) const noexcept;

  /// True iff `j` is in l(i). Unknown ids (and 0) are related to nothing.
  bool related(TrackId i, TrackId j) const noexcept;

  friend LineageForest build_lineage_closure(const TrackTable& tracks);
  /// Forest with the same ids and every parent link dropped.
  friend LineageForest identity_forest(const TrackTable& tracks);

 private:
  std::vector<TrackId> ids_;
  std::vector<TrackId> parents_;
  std::vector<std::vector<TrackId>> closures_;
  std::unordered_map<TrackId, std::size_t> index_;
};

/// Throws ValidationError on a parent cycle or a parent id missing from `tracks`.
LineageForest build_lineage_closure(const TrackTable& tracks);
LineageForest identity_forest(const TrackTable& tracks);

inline bool sigma(TrackId i, TrackId j, const LineageForest& forest) noexcept { return forest.related(i, j); }

}  // namespace ctm
