#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ctm {

/// Dense maximum-weight bipartite matching (Hungarian method, O(n^3)).
/// `weights` is row-major rows x cols. Only entries > 0 may be assigned;
/// returns the column per row or -1.
std::vector<int> max_weight_assignment(std::span<const std::int64_t> weights, std::size_t rows, std::size_t cols);

/// Total weight of an optimal assignment.
std::int64_t max_assignment_value(std::span<const std::int64_t> weights, std::size_t rows, std::size_t cols);

struct WeightedEdge {
  std::size_t row = 0;
  std::size_t col = 0;
  std::int64_t weight = 0;  // must be > 0
};

enum class TieBreak {
  any,            // whatever the solver returns (still deterministic)
  lexicographic,  // smallest (row, col) pair sequence among optimal matchings
};

/// Maximum-weight matching on a sparse bipartite graph. The graph is split
/// into connected components and each is solved densely. Row and column
/// indices should be ranked by id so that `lexicographic` refers to ids.
/// Lexicographic refinement costs an extra O(r*c) solves per component and
/// is skipped (falling back to `any`) for components above 24x24.
std::vector<std::pair<std::size_t, std::size_t>> sparse_max_weight_matching(std::span<const WeightedEdge> edges,
                                                                            TieBreak tie_break = TieBreak::any);

}  // namespace ctm
