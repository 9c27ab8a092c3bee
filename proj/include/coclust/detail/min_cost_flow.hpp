#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace coclust::detail {

/// Successive-shortest-path min-cost flow with Johnson potentials. Costs are
/// doubles; the initial potentials come from Bellman-Ford so negative edge
/// costs are allowed as long as there is no negative cycle.
class MinCostFlow {
 public:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    long cap;
    double cost;
  };

  explicit MinCostFlow(std::size_t nodes) : graph_(nodes) {}

  /// Returns the index of the forward edge within graph()[from].
  std::size_t add_edge(std::size_t from, std::size_t to, long cap, double cost) {
    graph_[from].push_back({to, graph_[to].size(), cap, cost});
    graph_[to].push_back({from, graph_[from].size() - 1, 0, -cost});
    return graph_[from].size() - 1;
  }

  const std::vector<std::vector<Edge>>& graph() const noexcept { return graph_; }

  /// Pushes up to `limit` units from s to t; returns {flow, cost}.
  std::pair<long, double> solve(std::size_t s, std::size_t t, long limit) {
    const std::size_t n = graph_.size();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> potential(n, 0.0);
    {
      // Bellman-Ford for initial potentials (reachable nodes only).
      std::vector<double> dist(n, kInf);
      dist[s] = 0.0;
      for (std::size_t it = 0; it + 1 < n; ++it) {
        bool changed = false;
        for (std::size_t u = 0; u < n; ++u) {
          if (dist[u] == kInf) continue;
          for (const auto& e : graph_[u])
            if (e.cap > 0 && dist[u] + e.cost < dist[e.to] - 1e-15) {
              dist[e.to] = dist[u] + e.cost;
              changed = true;
            }
        }
        if (!changed) break;
      }
      for (std::size_t u = 0; u < n; ++u) potential[u] = dist[u] == kInf ? 0.0 : dist[u];
    }

    long flow = 0;
    double cost = 0.0;
    std::vector<double> dist(n);
    std::vector<std::size_t> prev_node(n), prev_edge(n);
    using Item = std::pair<double, std::size_t>;
    while (flow < limit) {
      std::fill(dist.begin(), dist.end(), kInf);
      dist[s] = 0.0;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      pq.emplace(0.0, s);
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (std::size_t k = 0; k < graph_[u].size(); ++k) {
          const auto& e = graph_[u][k];
          if (e.cap <= 0) continue;
          const double reduced = std::max(0.0, e.cost + potential[u] - potential[e.to]);
          if (dist[u] + reduced < dist[e.to]) {
            dist[e.to] = dist[u] + reduced;
            prev_node[e.to] = u;
            prev_edge[e.to] = k;
            pq.emplace(dist[e.to], e.to);
          }
        }
      }
      if (dist[t] == kInf) break;
      for (std::size_t u = 0; u < n; ++u)
        if (dist[u] < kInf) potential[u] += dist[u];

      long push = limit - flow;
      for (std::size_t v = t; v != s; v = prev_node[v])
        push = std::min(push, graph_[prev_node[v]][prev_edge[v]].cap);
      for (std::size_t v = t; v != s; v = prev_node[v]) {
        auto& e = graph_[prev_node[v]][prev_edge[v]];
        e.cap -= push;
        graph_[v][e.rev].cap += push;
        cost += static_cast<double>(push) * e.cost;
      }
      flow += push;
    }
    return {flow, cost};
  }

 private:
  std::vector<std::vector<Edge>> graph_;
};

}  // namespace coclust::detail
