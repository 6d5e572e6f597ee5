// Copyright 2026 The revmatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVMATCH_MIN_COST_FLOW_H_
#define REVMATCH_MIN_COST_FLOW_H_

// Successive shortest augmenting paths with node potentials (Dijkstra on
// reduced costs). Integer costs only. Negative arc costs are allowed as
// long as the initial graph has no negative cycle; InitPotentials() must
// then be given valid starting potentials (e.g. DAG shortest paths).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace revmatch {

class MinCostFlow {
 public:
  using Cost = std::int64_t;
  static constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;

  struct Arc {
    int to;
    int rev;  // index of the reverse arc in adjacency[to]
    std::int64_t cap;
    Cost cost;
  };

  explicit MinCostFlow(int nodes) : adjacency_(nodes), potential_(nodes, 0) {}

  int nodes() const { return static_cast<int>(adjacency_.size()); }

  // Returns a handle usable with Flow().
  std::pair<int, int> AddArc(int from, int to, std::int64_t cap, Cost cost) {
    const int fwd = static_cast<int>(adjacency_[from].size());
    const int bwd = static_cast<int>(adjacency_[to].size());
    adjacency_[from].push_back({to, bwd, cap, cost});
    adjacency_[to].push_back({from, fwd, 0, -cost});
    return {from, fwd};
  }

  void InitPotentials(std::vector<Cost> potentials) {
    potential_ = std::move(potentials);
  }

  std::int64_t Flow(std::pair<int, int> handle) const {
    const Arc& arc = adjacency_[handle.first][handle.second];
    return adjacency_[arc.to][arc.rev].cap;
  }

  const std::vector<Cost>& potentials() const { return potential_; }

  // Pushes up to `limit` units from s to t along successive cheapest paths.
  // Returns {flow, cost}. Among equal-cost paths the one reached first by
  // Dijkstra with (distance, node id) ordering is used, so results are
  // reproducible.
  std::pair<std::int64_t, Cost> Run(int s, int t, std::int64_t limit) {
    std::int64_t flow = 0;
    Cost cost = 0;
    const int n = nodes();
    std::vector<Cost> dist(n);
    std::vector<int> prev_node(n), prev_arc(n);
    using Item = std::pair<Cost, int>;
    while (flow < limit) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(prev_node.begin(), prev_node.end(), -1);
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
      dist[s] = 0;
      heap.emplace(0, s);
      while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d != dist[v]) continue;
        for (int k = 0; k < static_cast<int>(adjacency_[v].size()); ++k) {
          const Arc& arc = adjacency_[v][k];
          if (arc.cap <= 0) continue;
          const Cost nd = d + arc.cost + potential_[v] - potential_[arc.to];
          if (nd < dist[arc.to]) {
            dist[arc.to] = nd;
            prev_node[arc.to] = v;
            prev_arc[arc.to] = k;
            heap.emplace(nd, arc.to);
          }
        }
      }
      if (dist[t] >= kInf) break;
      for (int v = 0; v < n; ++v) {
        potential_[v] += std::min(dist[v], dist[t]);
      }
      std::int64_t push = limit - flow;
      for (int v = t; v != s; v = prev_node[v]) {
        push = std::min(push, adjacency_[prev_node[v]][prev_arc[v]].cap);
      }
      for (int v = t; v != s; v = prev_node[v]) {
        Arc& arc = adjacency_[prev_node[v]][prev_arc[v]];
        arc.cap -= push;
        adjacency_[v][arc.rev].cap += push;
        cost += push * arc.cost;
      }
      flow += push;
    }
    return {flow, cost};
  }

 private:
  std::vector<std::vector<Arc>> adjacency_;
  std::vector<Cost> potential_;
};

}  // namespace revmatch

#endif  // REVMATCH_MIN_COST_FLOW_H_
