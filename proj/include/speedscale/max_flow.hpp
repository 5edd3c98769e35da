#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace speedscale::detail {

// Dinic's algorithm over an arbitrary ordered field. With exact rational
// capacities every augmentation is exact, so the returned flow and the
// residual-reachable cut are exact as well.
template <typename Cap>
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adjacency_(nodes), level_(nodes), cursor_(nodes) {}

  // Returns the edge handle used by set_capacity()/flow().
  std::size_t add_edge(std::size_t from, std::size_t to, const Cap& capacity) {
    const std::size_t id = edges_.size();
    edges_.push_back({to, capacity, capacity});
    edges_.push_back({from, Cap(0), Cap(0)});
    adjacency_[from].push_back(id);
    adjacency_[to].push_back(id + 1);
    return id;
  }

  void set_capacity(std::size_t edge, const Cap& capacity) { edges_[edge].original = capacity; }

  // Clears all flow, restoring residual capacities from the originals.
  void reset() {
    for (Edge& e : edges_) e.residual = e.original;
  }

  Cap flow(std::size_t edge) const { return edges_[edge].original - edges_[edge].residual; }

  Cap solve(std::size_t source, std::size_t sink) {
    Cap total(0);
    while (build_levels(source, sink)) {
      std::fill(cursor_.begin(), cursor_.end(), std::size_t{0});
      while (true) {
        Cap pushed = augment(source, sink, Cap(-1));
        if (pushed <= 0) break;
        total += pushed;
      }
    }
    return total;
  }

  // After solve(): nodes reachable from `source` in the residual graph.
  std::vector<bool> source_side(std::size_t source) const {
    std::vector<bool> seen(adjacency_.size(), false);
    std::vector<std::size_t> stack{source};
    seen[source] = true;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t id : adjacency_[u]) {
        const Edge& e = edges_[id];
        if (!seen[e.to] && e.residual > 0) {
          seen[e.to] = true;
          stack.push_back(e.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    std::size_t to;
    Cap residual;
    Cap original;
  };

  static constexpr int kUnreached = std::numeric_limits<int>::max();

  bool build_levels(std::size_t source, std::size_t sink) {
    std::fill(level_.begin(), level_.end(), kUnreached);
    std::queue<std::size_t> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop();
      for (std::size_t id : adjacency_[u]) {
        const Edge& e = edges_[id];
        if (level_[e.to] == kUnreached && e.residual > 0) {
          level_[e.to] = level_[u] + 1;
          queue.push(e.to);
        }
      }
    }
    return level_[sink] != kUnreached;
  }

  // `limit` < 0 means unbounded (only the source call uses it).
  Cap augment(std::size_t u, std::size_t sink, const Cap& limit) {
    if (u == sink) return limit;
    for (std::size_t& k = cursor_[u]; k < adjacency_[u].size(); ++k) {
      const std::size_t id = adjacency_[u][k];
      Edge& e = edges_[id];
      if (e.residual <= 0 || level_[e.to] != level_[u] + 1) continue;
      Cap bound = (limit < 0 || e.residual < limit) ? e.residual : limit;
      Cap pushed = augment(e.to, sink, bound);
      if (pushed > 0) {
        e.residual -= pushed;
        edges_[id ^ 1].residual += pushed;
        return pushed;
      }
    }
    return Cap(0);
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
};

}  // namespace speedscale::detail
