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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covctl/env_graph.hpp"

namespace covctl {

// Agent i sits on positions[i]. Positions are pairwise distinct.
using Allocation = std::vector<NodeId>;
// Node set in ascending order.
using Block = std::vector<NodeId>;

struct Partition {
  std::vector<Block> blocks;  // indexed by agent id

  // owner[c] is the agent whose block contains c, or -1.
  std::vector<int> owner_map(int node_count) const;
};

// Distances used when evaluating a quantity restricted to a node set.
enum class Metric {
  kInduced,  // shortest paths inside the induced subgraph of the set
  kGlobal,   // shortest paths in the whole environment
};

std::string_view to_string(Metric metric);
Metric parse_metric(const std::string& name);

// Read-only view of everything a coverage evaluation needs.
struct CoverageContext {
  const EnvGraph* env = nullptr;
  const DistanceOracle* oracle = nullptr;
  const DecayFunction* decay = nullptr;
  Metric metric = Metric::kInduced;
};

// Pairwise distances among the nodes of a region under a metric. Nodes that
// are unreachable within an induced region get distance -1.
class RegionMetric {
 public:
  RegionMetric(const CoverageContext& ctx, std::span<const NodeId> region);

  const std::vector<NodeId>& nodes() const { return nodes_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  // Position of a node in nodes(), or -1.
  int local(NodeId node) const;
  int dist(int a, int b) const { return dist_[static_cast<std::size_t>(a) * nodes_.size() + b]; }

 private:
  std::vector<NodeId> nodes_;
  std::vector<int> dist_;
};

// Throws InvalidParams unless x is exclusive and inside the graph.
void check_allocation(const EnvGraph& env, std::span<const NodeId> x);

// G(x; region) = sum over c in region of v_c g(min_i dist(x_i, c)). Under the
// induced metric all of x must lie in the region unless the region is the
// whole graph.
double objective(const CoverageContext& ctx, std::span<const NodeId> x,
                 std::span<const NodeId> region);
// G(x; C) over every node with the global metric.
double objective(const CoverageContext& ctx, std::span<const NodeId> x);

// u_i = sum over c in block of v_c g(dist(x_i, c)).
double utility(const CoverageContext& ctx, NodeId xi, std::span<const NodeId> block);

// Geodesic Voronoi split of region among the agents listed in subset, using
// distances inside the induced subgraph of region. Ties go to the lowest
// agent id. Returns one block per entry of subset.
std::vector<Block> voronoi(const EnvGraph& env, std::span<const NodeId> x,
                           std::span<const NodeId> region, std::span<const int> subset);
// Whole-graph partition among all agents.
Partition voronoi(const EnvGraph& env, std::span<const NodeId> x);

// Sorted neighbour lists over agent ids.
using AgentAdjacency = std::vector<std::vector<int>>;
AgentAdjacency agent_adjacency(const EnvGraph& env, const Partition& partition);
std::vector<std::pair<int, int>> adjacency_edges(const AgentAdjacency& adjacency);

// Returns an empty string when the partition is valid for x over region:
// disjoint, covering, each block connected and holding its agent.
std::string partition_defect(const EnvGraph& env, std::span<const NodeId> x,
                             const Partition& partition, std::span<const NodeId> region);

struct Placement {
  double gain = 0.0;            // M_k
  std::vector<NodeId> nodes;    // B_k, ascending
  std::uint64_t evaluated = 0;  // candidate subsets visited
};

// Exhaustive search over k-subsets of free region nodes for the largest gain
// G(y, fixed; region) - G(fixed; region). The first maximizer in
// lexicographic order wins; a later one must be larger by more than 1e-12.
Placement best_placement(const CoverageContext& ctx, std::span<const NodeId> fixed,
                         std::span<const NodeId> region, int k);
// Same search against a precomputed metric.
Placement best_placement(const CoverageContext& ctx, const RegionMetric& metric,
                         std::span<const NodeId> fixed, int k);

inline double marginal_gain(const CoverageContext& ctx, std::span<const NodeId> fixed,
                            std::span<const NodeId> region, int k) {
  return best_placement(ctx, fixed, region, k).gain;
}

}  // namespace covctl
