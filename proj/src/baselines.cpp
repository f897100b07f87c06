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

#include "covctl/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>

#include "covctl/errors.hpp"

namespace covctl {
namespace {

constexpr double kStrict = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<NodeId> all_nodes(const EnvGraph& env) {
  std::vector<NodeId> all(static_cast<std::size_t>(env.node_count()));
  for (NodeId c = 0; c < env.node_count(); ++c) all[c] = c;
  return all;
}

CoverageContext global_of(const CoverageContext& ctx) {
  CoverageContext global = ctx;
  global.metric = Metric::kGlobal;
  return global;
}

AlgorithmResult finish(const CoverageContext& ctx, std::string name, Allocation x,
                       std::int64_t iterations, bool converged, Clock::time_point start) {
  AlgorithmResult r;
  r.name = std::move(name);
  r.G = objective(ctx, x);
  r.allocation = std::move(x);
  r.iterations = iterations;
  r.converged = converged;
  r.wallclock = seconds_since(start);
  return r;
}

// Utility of an agent standing on each node of its cell, in node order.
std::vector<double> cell_utilities(const CoverageContext& ctx, const Block& cell) {
  const RegionMetric metric(ctx, cell);
  const DecayFunction& g = *ctx.decay;
  std::vector<double> out(cell.size(), 0.0);
  for (int a = 0; a < metric.size(); ++a) {
    double total = 0.0;
    for (int c = 0; c < metric.size(); ++c) {
      const int d = metric.dist(a, c);
      if (d >= 0) total += ctx.env->weight(metric.nodes()[c]) * g(d);
    }
    out[a] = total;
  }
  return out;
}

double welfare(const CoverageContext& ctx, const Allocation& x, const Partition& partition,
               const std::vector<int>& agents) {
  double total = 0.0;
  for (int a : agents) total += utility(ctx, x[a], partition.blocks[a]);
  return total;
}

// Agents other than i ordered by hop distance from i in the adjacency graph,
// ascending id within a hop.
std::vector<int> partners_by_hops(const AgentAdjacency& adjacency, int i) {
  std::vector<int> order;
  std::vector<char> seen(adjacency.size(), 0);
  std::deque<int> queue{i};
  seen[i] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u != i) order.push_back(u);
    for (int v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return order;
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t t = 1; t <= k; ++t) {
    r = r * (n - k + t) / t;
    if (r > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(r);
}

AlgorithmResult vvp_run(const CoverageContext& ctx, const VvpConfig& config, const Allocation& initial) {
  const auto start = Clock::now();
  const EnvGraph& env = *ctx.env;
  check_allocation(env, initial);
  Allocation x = initial;
  const int n = static_cast<int>(x.size());
  int passes = 0;
  bool changed = true;
  while (changed && passes < config.max_passes) {
    changed = false;
    ++passes;
    for (int i = 0; i < n; ++i) {
      const Partition partition = voronoi(env, x);
      const Block& cell = partition.blocks[i];
      const std::vector<double> values = cell_utilities(ctx, cell);
      const auto here = std::lower_bound(cell.begin(), cell.end(), x[i]) - cell.begin();
      std::size_t best = static_cast<std::size_t>(here);
      for (std::size_t k = 0; k < cell.size(); ++k) {
        if (values[k] > values[best] + kStrict) best = k;
      }
      // Among equally good nodes, the lowest id wins unless staying is as good.
      if (best != static_cast<std::size_t>(here)) {
        for (std::size_t k = 0; k < best; ++k) {
          if (values[k] >= values[best] - kStrict) {
            best = k;
            break;
          }
        }
        x[i] = cell[best];
        changed = true;
      }
    }
  }
  return finish(ctx, "VVP", std::move(x), passes, !changed, start);
}

AlgorithmResult sota_run(const CoverageContext& ctx, const SotaConfig& config, const Allocation& initial) {
  const auto start = Clock::now();
  const EnvGraph& env = *ctx.env;
  check_allocation(env, initial);
  Allocation x = initial;
  const int n = static_cast<int>(x.size());
  std::vector<int> order = config.order;
  if (order.empty()) {
    for (int i = 0; i < n; ++i) order.push_back(i);
  }
  std::int64_t moves = 0;
  const bool converged = true;

  for (int i : order) {
    int local_moves = 0;
    for (;;) {
      if (local_moves >= config.max_moves_per_activation) break;
      const Partition partition = voronoi(env, x);
      const AgentAdjacency adjacency = agent_adjacency(env, partition);
      const Block cell = partition.blocks[i];

      // Individual move: local welfare of i and its neighbours.
      std::vector<int> local{i};
      local.insert(local.end(), adjacency[i].begin(), adjacency[i].end());
      const double current = welfare(ctx, x, partition, local);
      double best_value = current;
      NodeId best_node = -1;
      for (NodeId c : cell) {
        if (c == x[i]) continue;
        Allocation trial = x;
        trial[i] = c;
        const double value = welfare(ctx, trial, voronoi(env, trial), local);
        if (value > best_value + kStrict) {
          best_value = value;
          best_node = c;
        }
      }
      if (best_node >= 0) {
        x[i] = best_node;
        ++moves;
        ++local_moves;
        continue;
      }

      // Pair move: i relocates inside its cell, the partner takes i's node.
      bool moved = false;
      for (int j : partners_by_hops(adjacency, i)) {
        const std::vector<int> pair{i, j};
        const double pair_now = welfare(ctx, x, partition, pair);
        double pair_best = pair_now;
        NodeId target = -1;
        for (NodeId c : cell) {
          if (c == x[i]) continue;
          Allocation trial = x;
          trial[j] = x[i];
          trial[i] = c;
          const double value = welfare(ctx, trial, voronoi(env, trial), pair);
          if (value > pair_best + kStrict) {
            pair_best = value;
            target = c;
          }
        }
        if (target >= 0) {
          x[j] = x[i];
          x[i] = target;
          moved = true;
          break;
        }
      }
      if (!moved) break;
      ++moves;
      ++local_moves;
    }
  }
  return finish(ctx, "SOTA", std::move(x), moves, converged, start);
}

AlgorithmResult cgr_run(const CoverageContext& ctx, int n) {
  const auto start = Clock::now();
  const EnvGraph& env = *ctx.env;
  if (n < 1 || n > env.node_count()) {
    throw Error(ErrorCode::kTooManyAgents, std::to_string(n) + " agents on " +
                                               std::to_string(env.node_count()) + " nodes");
  }
  const CoverageContext global = global_of(ctx);
  const std::vector<NodeId> all = all_nodes(env);
  const RegionMetric metric(global, all);
  Allocation x;
  for (int round = 0; round < n; ++round) {
    const Placement next = best_placement(global, metric, x, 1);
    x.push_back(next.nodes[0]);
  }
  return finish(ctx, "CGR", std::move(x), n, true, start);
}

AlgorithmResult opt_bruteforce(const CoverageContext& ctx, int n, const OptConfig& config) {
  const auto start = Clock::now();
  const EnvGraph& env = *ctx.env;
  if (n < 1 || n > env.node_count()) {
    throw Error(ErrorCode::kTooManyAgents, std::to_string(n) + " agents on " +
                                               std::to_string(env.node_count()) + " nodes");
  }
  const std::uint64_t count = binomial(static_cast<std::uint64_t>(env.node_count()), static_cast<std::uint64_t>(n));
  if (count > config.budget) {
    throw Error(ErrorCode::kBudgetExceeded, std::to_string(count) + " allocations exceed budget " +
                                                std::to_string(config.budget));
  }
  const CoverageContext global = global_of(ctx);
  const Placement best = best_placement(global, {}, all_nodes(env), n);
  return finish(ctx, "OPT", best.nodes, static_cast<std::int64_t>(best.evaluated), true, start);
}

}  // namespace covctl
