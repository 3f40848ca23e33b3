#include "ctm/lineage.hpp"

#include <algorithm>

namespace ctm {

TrackId LineageForest::parent_of(TrackId id) const noexcept {
  auto it = index_.find(id);
  return it == index_.end() ? kNoTrack : parents_[it->second];
}

std::span<const TrackId> LineageForest::closure(TrackId id) const noexcept {
  auto it = index_.find(id);
  if (it == index_.end()) return {};
  return closures_[it->second];
}

bool LineageForest::related(TrackId i, TrackId j) const noexcept {
  if (i == kNoTrack || j == kNoTrack) return false;
  auto c = closure(i);
  return std::binary_search(c.begin(), c.end(), j);
}

namespace {

void index_tracks(std::vector<TrackId>& ids, std::vector<TrackId>& parents,
                  std::unordered_map<TrackId, std::size_t>& index, const TrackTable& tracks) {
  ids.reserve(tracks.size());
  parents.reserve(tracks.size());
  for (const auto& r : tracks.records()) {
    index.emplace(r.id, ids.size());
    ids.push_back(r.id);
    parents.push_back(r.parent);
  }
}

}  // namespace

LineageForest identity_forest(const TrackTable& tracks) {
  LineageForest forest;
  index_tracks(forest.ids_, forest.parents_, forest.index_, tracks);
  std::fill(forest.parents_.begin(), forest.parents_.end(), kNoTrack);
  forest.closures_.reserve(forest.ids_.size());
  for (TrackId id : forest.ids_) forest.closures_.push_back({id});
  return forest;
}

LineageForest build_lineage_closure(const TrackTable& tracks) {
  LineageForest forest;
  index_tracks(forest.ids_, forest.parents_, forest.index_, tracks);
  const std::size_t n = forest.ids_.size();

  std::vector<std::size_t> parent_idx(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const TrackId p = forest.parents_[k];
    if (p == kNoTrack) continue;
    auto it = forest.index_.find(p);
    if (it == forest.index_.end()) {
      throw ValidationError("track " + std::to_string(forest.ids_[k]) + " references unknown parent " +
                            std::to_string(p));
    }
    if (it->second == k) {
      throw ValidationError("track " + std::to_string(p) + " is its own parent");
    }
    parent_idx[k] = it->second;
  }

  // Ancestor chains; a chain longer than n means a cycle.
  std::vector<std::vector<std::size_t>> ancestors(n);
  std::vector<char> state(n, 0);  // 0 = new, 1 = on stack, 2 = done
  for (std::size_t start = 0; start < n; ++start) {
    std::vector<std::size_t> stack;
    std::size_t cur = start;
    while (cur != n && state[cur] == 0) {
      state[cur] = 1;
      stack.push_back(cur);
      cur = parent_idx[cur];
    }
    if (cur != n && state[cur] == 1) {
      throw ValidationError("parent links of track " + std::to_string(forest.ids_[cur]) + " form a cycle");
    }
    // Unwind: each node's ancestors are its parent plus the parent's ancestors.
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      const std::size_t p = parent_idx[*it];
      if (p != n) {
        ancestors[*it].reserve(ancestors[p].size() + 1);
        ancestors[*it].push_back(p);
        ancestors[*it].insert(ancestors[*it].end(), ancestors[p].begin(), ancestors[p].end());
      }
      state[*it] = 2;
    }
  }

  forest.closures_.assign(n, {});
  for (std::size_t k = 0; k < n; ++k) {
    forest.closures_[k].push_back(forest.ids_[k]);
    for (std::size_t a : ancestors[k]) {
      forest.closures_[k].push_back(forest.ids_[a]);
      forest.closures_[a].push_back(forest.ids_[k]);
    }
  }
  for (auto& c : forest.closures_) std::sort(c.begin(), c.end());
  return forest;
}

}  // namespace ctm
