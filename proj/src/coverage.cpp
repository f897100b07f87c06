// Copyright 2026 The covctl Authors.
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

#include "covctl/coverage.hpp"

#include <algorithm>
#include <limits>

#include "covctl/errors.hpp"

namespace covctl {
namespace {

std::vector<double> decay_table(const DecayFunction& g, int max_distance) {
  std::vector<double> table(static_cast<std::size_t>(max_distance + 1));
  for (int d = 0; d <= max_distance; ++d) table[d] = g(d);
  return table;
}

bool is_whole_graph(const EnvGraph& env, std::span<const NodeId> region) {
  return static_cast<int>(region.size()) == env.node_count();
}

// BFS distances from src restricted to nodes with in_region set.
void masked_bfs(const EnvGraph& env, const std::vector<char>& in_region, NodeId src,
                std::vector<int>& dist, std::vector<NodeId>& queue) {
  std::fill(dist.begin(), dist.end(), -1);
  std::size_t head = 0;
  queue.clear();
  dist[src] = 0;
  queue.push_back(src);
  while (head < queue.size()) {
    const NodeId u = queue[head++];
    for (NodeId v : env.neighbors(u)) {
      if (in_region[v] && dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
}

}  // namespace

std::vector<int> Partition::owner_map(int node_count) const {
  std::vector<int> owner(static_cast<std::size_t>(node_count), -1);
  for (int i = 0; i < static_cast<int>(blocks.size()); ++i) {
    for (NodeId c : blocks[i]) owner[c] = i;
  }
  return owner;
}

std::string_view to_string(Metric metric) {
  return metric == Metric::kInduced ? "induced" : "global";
}

Metric parse_metric(const std::string& name) {
  if (name == "induced") return Metric::kInduced;
  if (name == "global") return Metric::kGlobal;
  throw Error(ErrorCode::kInvalidParams, "unknown metric '" + name + "'");
}

RegionMetric::RegionMetric(const CoverageContext& ctx, std::span<const NodeId> region)
    : nodes_(region.begin(), region.end()) {
  const EnvGraph& env = *ctx.env;
  std::sort(nodes_.begin(), nodes_.end());
  if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
    throw Error(ErrorCode::kInvalidParams, "region lists a node twice");
  }
  if (!nodes_.empty() && (nodes_.front() < 0 || nodes_.back() >= env.node_count())) {
    throw Error(ErrorCode::kInvalidParams, "region node out of range");
  }
  const std::size_t r = nodes_.size();
  dist_.assign(r * r, -1);
  if (ctx.metric == Metric::kGlobal || is_whole_graph(env, nodes_)) {
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = 0; b < r; ++b) dist_[a * r + b] = (*ctx.oracle)(nodes_[a], nodes_[b]);
    }
    return;
  }
  std::vector<char> in_region(static_cast<std::size_t>(env.node_count()), 0);
  for (NodeId c : nodes_) in_region[c] = 1;
  std::vector<int> dist(static_cast<std::size_t>(env.node_count()));
  std::vector<NodeId> queue;
  for (std::size_t a = 0; a < r; ++a) {
    masked_bfs(env, in_region, nodes_[a], dist, queue);
    for (std::size_t b = 0; b < r; ++b) dist_[a * r + b] = dist[nodes_[b]];
  }
}

int RegionMetric::local(NodeId node) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end() || *it != node) return -1;
  return static_cast<int>(it - nodes_.begin());
}

void check_allocation(const EnvGraph& env, std::span<const NodeId> x) {
  std::vector<char> used(static_cast<std::size_t>(env.node_count()), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= env.node_count()) {
      throw Error(ErrorCode::kInvalidParams,
                  "agent " + std::to_string(i) + " placed on missing node " + std::to_string(x[i]));
    }
    if (used[x[i]]++) {
      throw Error(ErrorCode::kInvalidParams,
                  "allocation is not exclusive at node " + std::to_string(x[i]));
    }
  }
}

double objective(const CoverageContext& ctx, std::span<const NodeId> x,
                 std::span<const NodeId> region) {
  if (x.empty()) throw Error(ErrorCode::kEmptyAllocation, "objective needs at least one agent");
  const EnvGraph& env = *ctx.env;
  if (ctx.metric == Metric::kGlobal || is_whole_graph(env, region)) {
    const DistanceOracle& dist = *ctx.oracle;
    double total = 0.0;
    for (NodeId c : region) {
      int best = std::numeric_limits<int>::max();
      for (NodeId xi : x) best = std::min(best, dist(xi, c));
      total += env.weight(c) * (*ctx.decay)(best);
    }
    return total;
  }
  const RegionMetric metric(ctx, region);
  std::vector<int> agents;
  for (NodeId xi : x) {
    const int a = metric.local(xi);
    if (a < 0) {
      throw Error(ErrorCode::kAgentOutsideRegion, "agent node " + std::to_string(xi) + " not in region");
    }
    agents.push_back(a);
  }
  double total = 0.0;
  for (int c = 0; c < metric.size(); ++c) {
    int best = -1;
    for (int a : agents) {
      const int d = metric.dist(a, c);
      if (d >= 0 && (best < 0 || d < best)) best = d;
    }
    if (best >= 0) total += env.weight(metric.nodes()[c]) * (*ctx.decay)(best);
  }
  return total;
}

double objective(const CoverageContext& ctx, std::span<const NodeId> x) {
  std::vector<NodeId> all(static_cast<std::size_t>(ctx.env->node_count()));
  for (NodeId c = 0; c < ctx.env->node_count(); ++c) all[c] = c;
  CoverageContext global = ctx;
  global.metric = Metric::kGlobal;
  return objective(global, x, all);
}

double utility(const CoverageContext& ctx, NodeId xi, std::span<const NodeId> block) {
  if (std::find(block.begin(), block.end(), xi) == block.end()) {
    throw Error(ErrorCode::kAgentOutsideBlock, "agent node " + std::to_string(xi) + " not in its block");
  }
  const EnvGraph& env = *ctx.env;
  double total = 0.0;
  if (ctx.metric == Metric::kGlobal) {
    for (NodeId c : block) total += env.weight(c) * (*ctx.decay)((*ctx.oracle)(xi, c));
    return total;
  }
  std::vector<char> in_block(static_cast<std::size_t>(env.node_count()), 0);
  for (NodeId c : block) in_block[c] = 1;
  std::vector<int> dist(static_cast<std::size_t>(env.node_count()));
  std::vector<NodeId> queue;
  masked_bfs(env, in_block, xi, dist, queue);
  for (NodeId c : block) {
    if (dist[c] >= 0) total += env.weight(c) * (*ctx.decay)(dist[c]);
  }
  return total;
}

std::vector<Block> voronoi(const EnvGraph& env, std::span<const NodeId> x,
                           std::span<const NodeId> region, std::span<const int> subset) {
  const int m = env.node_count();
  std::vector<char> in_region(static_cast<std::size_t>(m), 0);
  for (NodeId c : region) in_region[c] = 1;

  // Sources in ascending agent id so the first layer is ordered.
  std::vector<int> agents(subset.begin(), subset.end());
  std::sort(agents.begin(), agents.end());
  std::vector<int> dist(static_cast<std::size_t>(m), -1);
  std::vector<int> owner(static_cast<std::size_t>(m), -1);
  std::vector<NodeId> frontier, next;
  for (int a : agents) {
    const NodeId xa = x[a];
    if (!in_region[xa]) {
      throw Error(ErrorCode::kAgentOutsideRegion,
                  "agent " + std::to_string(a) + " at node " + std::to_string(xa) + " outside region");
    }
    if (dist[xa] == 0) {
      throw Error(ErrorCode::kInvalidParams, "two agents share node " + std::to_string(xa));
    }
    dist[xa] = 0;
    owner[xa] = a;
    frontier.push_back(xa);
  }
  // Layered BFS: a node takes the smallest owner among its predecessors in
  // the previous layer, which realises the lowest-id tie rule.
  for (int d = 0; !frontier.empty(); ++d) {
    next.clear();
    for (NodeId u : frontier) {
      for (NodeId v : env.neighbors(u)) {
        if (!in_region[v]) continue;
        if (dist[v] < 0) {
          dist[v] = d + 1;
          owner[v] = owner[u];
          next.push_back(v);
        } else if (dist[v] == d + 1 && owner[u] < owner[v]) {
          owner[v] = owner[u];
        }
      }
    }
    frontier.swap(next);
  }

  std::vector<Block> blocks(subset.size());
  std::vector<int> slot(static_cast<std::size_t>(x.size()), -1);
  for (std::size_t s = 0; s < subset.size(); ++s) slot[subset[s]] = static_cast<int>(s);
  std::vector<NodeId> sorted(region.begin(), region.end());
  std::sort(sorted.begin(), sorted.end());
  for (NodeId c : sorted) {
    if (owner[c] >= 0) blocks[slot[owner[c]]].push_back(c);
  }
  return blocks;
}

Partition voronoi(const EnvGraph& env, std::span<const NodeId> x) {
  std::vector<NodeId> all(static_cast<std::size_t>(env.node_count()));
  for (NodeId c = 0; c < env.node_count(); ++c) all[c] = c;
  std::vector<int> subset(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) subset[i] = static_cast<int>(i);
  return Partition{voronoi(env, x, all, subset)};
}

AgentAdjacency agent_adjacency(const EnvGraph& env, const Partition& partition) {
  const std::vector<int> owner = partition.owner_map(env.node_count());
  AgentAdjacency adjacency(partition.blocks.size());
  for (auto [a, b] : env.edges()) {
    const int oa = owner[a], ob = owner[b];
    if (oa >= 0 && ob >= 0 && oa != ob) {
      adjacency[oa].push_back(ob);
      adjacency[ob].push_back(oa);
    }
  }
  for (auto& row : adjacency) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adjacency;
}

std::vector<std::pair<int, int>> adjacency_edges(const AgentAdjacency& adjacency) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < static_cast<int>(adjacency.size()); ++i) {
    for (int j : adjacency[i]) {
      if (i < j) edges.emplace_back(i, j);
    }
  }
  return edges;
}

std::string partition_defect(const EnvGraph& env, std::span<const NodeId> x,
                             const Partition& partition, std::span<const NodeId> region) {
  const int m = env.node_count();
  if (partition.blocks.size() != x.size()) return "block count differs from agent count";
  std::vector<char> in_region(static_cast<std::size_t>(m), 0);
  for (NodeId c : region) in_region[c] = 1;
  std::vector<int> owner(static_cast<std::size_t>(m), -1);
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    const Block& block = partition.blocks[i];
    if (block.empty()) return "block " + std::to_string(i) + " is empty";
    for (NodeId c : block) {
      if (c < 0 || c >= m || !in_region[c]) return "block " + std::to_string(i) + " leaves the region";
      if (owner[c] >= 0) {
        return "node " + std::to_string(c) + " in blocks " + std::to_string(owner[c]) + " and " +
               std::to_string(i);
      }
      owner[c] = i;
    }
    if (owner[x[i]] != i) return "agent " + std::to_string(i) + " is outside its block";
  }
  for (NodeId c : region) {
    if (owner[c] < 0) return "node " + std::to_string(c) + " is not covered";
  }
  std::vector<char> in_block(static_cast<std::size_t>(m), 0);
  std::vector<int> dist(static_cast<std::size_t>(m));
  std::vector<NodeId> queue;
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    for (NodeId c : partition.blocks[i]) in_block[c] = 1;
    masked_bfs(env, in_block, x[i], dist, queue);
    const bool connected = queue.size() == partition.blocks[i].size();
    for (NodeId c : partition.blocks[i]) in_block[c] = 0;
    if (!connected) return "block " + std::to_string(i) + " is not connected";
  }
  return {};
}

Placement best_placement(const CoverageContext& ctx, std::span<const NodeId> fixed,
                         std::span<const NodeId> region, int k) {
  return best_placement(ctx, RegionMetric(ctx, region), fixed, k);
}

Placement best_placement(const CoverageContext& ctx, const RegionMetric& metric,
                         std::span<const NodeId> fixed, int k) {
  const EnvGraph& env = *ctx.env;
  const int r = metric.size();
  if (k < 0) throw Error(ErrorCode::kInvalidParams, "k must be non-negative");
  if (r == 0) throw Error(ErrorCode::kRegionTooSmall, "region is empty");

  std::vector<char> taken(static_cast<std::size_t>(r), 0);
  for (NodeId f : fixed) {
    const int a = metric.local(f);
    if (a < 0) throw Error(ErrorCode::kAgentOutsideRegion, "fixed agent node " + std::to_string(f) + " not in region");
    taken[a] = 1;
  }
  std::vector<int> candidates;
  for (int a = 0; a < r; ++a) {
    if (!taken[a]) candidates.push_back(a);
  }
  if (static_cast<int>(candidates.size()) < k) {
    throw Error(ErrorCode::kRegionTooSmall, "cannot place " + std::to_string(k) + " agents on " +
                                                std::to_string(candidates.size()) + " free nodes");
  }
  Placement result;
  if (k == 0) return result;

  int max_d = 0;
  for (int a = 0; a < r; ++a) {
    for (int c = 0; c < r; ++c) max_d = std::max(max_d, metric.dist(a, c));
  }
  const std::vector<double> g = decay_table(*ctx.decay, max_d);
  auto value = [&](int a, int c) {
    const int d = metric.dist(a, c);
    return d < 0 ? 0.0 : env.weight(metric.nodes()[c]) * g[d];
  };

  std::vector<double> base(static_cast<std::size_t>(r), 0.0);
  for (NodeId f : fixed) {
    const int a = metric.local(f);
    for (int c = 0; c < r; ++c) base[c] = std::max(base[c], value(a, c));
  }
  double base_total = 0.0;
  for (double b : base) base_total += b;

  const int nc = static_cast<int>(candidates.size());
  std::vector<double> table(static_cast<std::size_t>(nc) * r);
  for (int s = 0; s < nc; ++s) {
    for (int c = 0; c < r; ++c) table[static_cast<std::size_t>(s) * r + c] = value(candidates[s], c);
  }

  // levels[l] holds the per-node coverage after choosing l candidates.
  std::vector<std::vector<double>> levels(static_cast<std::size_t>(k), base);
  std::vector<int> pick(static_cast<std::size_t>(k), 0);
  std::vector<int> best_pick;
  double best_total = -std::numeric_limits<double>::infinity();

  // Iterative enumeration of k-subsets of candidate slots in lexicographic order.
  int level = 0;
  pick[0] = 0;
  while (level >= 0) {
    if (pick[level] > nc - (k - level)) {
      --level;
      if (level >= 0) ++pick[level];
      continue;
    }
    const double* row = &table[static_cast<std::size_t>(pick[level]) * r];
    const std::vector<double>& cur = levels[level];
    if (level == k - 1) {
      double total = 0.0;
      for (int c = 0; c < r; ++c) total += std::max(cur[c], row[c]);
      ++result.evaluated;
      if (total > best_total + 1e-12) {
        best_total = total;
        best_pick.assign(pick.begin(), pick.end());
      }
      ++pick[level];
    } else {
      std::vector<double>& next = levels[level + 1];
      for (int c = 0; c < r; ++c) next[c] = std::max(cur[c], row[c]);
      pick[level + 1] = pick[level] + 1;
      ++level;
    }
  }

  result.gain = best_total - base_total;
  for (int s : best_pick) result.nodes.push_back(metric.nodes()[candidates[s]]);
  return result;
}

}  // namespace covctl
