#include "ctm/assignment.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ctm {

namespace {

// Minimum-cost assignment of every row (rows <= cols), 1-indexed potentials.
std::vector<int> hungarian_min(const std::vector<std::int64_t>& cost, std::size_t n, std::size_t m) {
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  auto a = [&](std::size_t i, std::size_t j) { return cost[(i - 1) * m + (j - 1)]; };
  std::vector<std::int64_t> u(n + 1, 0), v(m + 1, 0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::int64_t delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j]) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

}  // namespace

std::vector<int> max_weight_assignment(std::span<const std::int64_t> weights, std::size_t rows, std::size_t cols) {
  if (weights.size() != rows * cols) throw std::invalid_argument("weight matrix size mismatch");
  std::vector<int> out(rows, -1);
  if (rows == 0 || cols == 0) return out;
  const bool transpose = rows > cols;
  const std::size_t n = transpose ? cols : rows;
  const std::size_t m = transpose ? rows : cols;
  std::vector<std::int64_t> cost(n * m);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::int64_t w = weights[r * cols + c];
      const std::int64_t entry = w > 0 ? -w : 0;
      if (transpose) {
        cost[c * m + r] = entry;
      } else {
        cost[r * m + c] = entry;
      }
    }
  }
  const auto sol = hungarian_min(cost, n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (sol[i] < 0) continue;
    const std::size_t r = transpose ? static_cast<std::size_t>(sol[i]) : i;
    const std::size_t c = transpose ? i : static_cast<std::size_t>(sol[i]);
    if (weights[r * cols + c] > 0) out[r] = static_cast<int>(c);
  }
  return out;
}

std::int64_t max_assignment_value(std::span<const std::int64_t> weights, std::size_t rows, std::size_t cols) {
  const auto sol = max_weight_assignment(weights, rows, cols);
  std::int64_t total = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (sol[r] >= 0) total += weights[r * cols + static_cast<std::size_t>(sol[r])];
  }
  return total;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

constexpr std::size_t kLexicographicLimit = 24;

// Smallest (row, col) sequence among optimal matchings of one dense component.
std::vector<int> lexicographic_refine(const std::vector<std::int64_t>& w, std::size_t rows, std::size_t cols) {
  const std::int64_t optimum = max_assignment_value(w, rows, cols);
  std::vector<char> row_free(rows, 1), col_free(cols, 1);
  auto remaining_value = [&]() {
    std::vector<std::size_t> rs, cs;
    for (std::size_t r = 0; r < rows; ++r)
      if (row_free[r]) rs.push_back(r);
    for (std::size_t c = 0; c < cols; ++c)
      if (col_free[c]) cs.push_back(c);
    std::vector<std::int64_t> sub(rs.size() * cs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < cs.size(); ++j) sub[i * cs.size() + j] = w[rs[i] * cols + cs[j]];
    return max_assignment_value(sub, rs.size(), cs.size());
  };

  std::vector<int> out(rows, -1);
  std::int64_t taken = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    row_free[r] = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (!col_free[c] || w[r * cols + c] <= 0) continue;
      col_free[c] = 0;
      if (taken + w[r * cols + c] + remaining_value() == optimum) {
        out[r] = static_cast<int>(c);
        taken += w[r * cols + c];
        break;
      }
      col_free[c] = 1;
    }
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> sparse_max_weight_matching(std::span<const WeightedEdge> edges,
                                                                            TieBreak tie_break) {
  std::vector<std::pair<std::size_t, std::size_t>> result;
  if (edges.empty()) return result;

  // Compact row/column index spaces; rows first, columns offset after.
  std::vector<std::size_t> row_keys, col_keys;
  for (const auto& e : edges) {
    if (e.weight <= 0) continue;
    row_keys.push_back(e.row);
    col_keys.push_back(e.col);
  }
  std::sort(row_keys.begin(), row_keys.end());
  row_keys.erase(std::unique(row_keys.begin(), row_keys.end()), row_keys.end());
  std::sort(col_keys.begin(), col_keys.end());
  col_keys.erase(std::unique(col_keys.begin(), col_keys.end()), col_keys.end());
  auto rank = [](const std::vector<std::size_t>& keys, std::size_t k) {
    return static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), k) - keys.begin());
  };

  UnionFind uf(row_keys.size() + col_keys.size());
  for (const auto& e : edges) {
    if (e.weight <= 0) continue;
    uf.unite(rank(row_keys, e.row), row_keys.size() + rank(col_keys, e.col));
  }

  std::map<std::size_t, std::vector<const WeightedEdge*>> components;
  for (const auto& e : edges) {
    if (e.weight <= 0) continue;
    components[uf.find(rank(row_keys, e.row))].push_back(&e);
  }

  for (const auto& [root, comp] : components) {
    std::vector<std::size_t> rs, cs;
    for (const auto* e : comp) {
      rs.push_back(e->row);
      cs.push_back(e->col);
    }
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    if (comp.size() == 1) {
      result.emplace_back(comp.front()->row, comp.front()->col);
      continue;
    }
    std::vector<std::int64_t> w(rs.size() * cs.size(), 0);
    for (const auto* e : comp) {
      auto& cell = w[rank(rs, e->row) * cs.size() + rank(cs, e->col)];
      cell = std::max(cell, e->weight);
    }
    const bool refine = tie_break == TieBreak::lexicographic && rs.size() <= kLexicographicLimit &&
                        cs.size() <= kLexicographicLimit;
    const auto sol = refine ? lexicographic_refine(w, rs.size(), cs.size())
                            : max_weight_assignment(w, rs.size(), cs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (sol[i] >= 0) result.emplace_back(rs[i], cs[static_cast<std::size_t>(sol[i])]);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace ctm
