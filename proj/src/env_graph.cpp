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

#include "covctl/env_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "covctl/errors.hpp"

namespace covctl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::kInvalidEdge: return "InvalidEdge";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEmptyAllocation: return "EmptyAllocation";
    case ErrorCode::kAgentOutsideBlock: return "AgentOutsideBlock";
    case ErrorCode::kAgentOutsideRegion: return "AgentOutsideRegion";
    case ErrorCode::kRegionTooSmall: return "RegionTooSmall";
    case ErrorCode::kDisconnectedAdjacency: return "DisconnectedAdjacency";
    case ErrorCode::kPreconditionViolated: return "PreconditionViolated";
    case ErrorCode::kIterationCapExceeded: return "IterationCapExceeded";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kTooManyAgents: return "TooManyAgents";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

bool is_connected(int node_count, std::span<const std::vector<NodeId>> adjacency) {
  if (node_count == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(node_count), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == node_count;
}

EnvGraph EnvGraph::build(int node_count, std::span<const Edge> edges,
                         std::vector<double> weights) {
  if (node_count <= 0) {
    throw Error(ErrorCode::kInvalidParams, "graph needs at least one node");
  }
  if (static_cast<int>(weights.size()) != node_count) {
    throw Error(ErrorCode::kInvalidParams,
                "weights length " + std::to_string(weights.size()) +
                    " does not match node count " + std::to_string(node_count));
  }
  for (int c = 0; c < node_count; ++c) {
    if (!(weights[c] >= 0.0) || !std::isfinite(weights[c])) {
      throw Error(ErrorCode::kNegativeWeight,
                  "node " + std::to_string(c) + " has weight " + std::to_string(weights[c]));
    }
  }

  EnvGraph env;
  env.adjacency_.resize(static_cast<std::size_t>(node_count));
  env.edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
      throw Error(ErrorCode::kInvalidEdge,
                  "edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
    }
    if (a == b) {
      throw Error(ErrorCode::kInvalidEdge, "self-loop at node " + std::to_string(a));
    }
    env.edges_.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(env.edges_.begin(), env.edges_.end());
  if (auto dup = std::adjacent_find(env.edges_.begin(), env.edges_.end()); dup != env.edges_.end()) {
    throw Error(ErrorCode::kInvalidEdge, "duplicate edge (" + std::to_string(dup->first) + "," +
                                             std::to_string(dup->second) + ")");
  }
  for (auto [a, b] : env.edges_) {
    env.adjacency_[a].push_back(b);
    env.adjacency_[b].push_back(a);
  }
  for (auto& row : env.adjacency_) std::sort(row.begin(), row.end());

  if (!is_connected(node_count, env.adjacency_)) {
    throw Error(ErrorCode::kDisconnectedGraph,
                "graph with " + std::to_string(node_count) + " nodes is not connected");
  }

  env.weights_ = std::move(weights);
  for (int c = 0; c < node_count; ++c) {
    if (env.weights_[c] == 1.0) env.valued_.push_back(c);
  }
  return env;
}

bool EnvGraph::has_edge(NodeId a, NodeId b) const {
  const auto& row = adjacency_[a];
  return std::binary_search(row.begin(), row.end(), b);
}

double EnvGraph::total_weight() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total;
}

void EnvGraph::set_labels(std::vector<NodeLabel> labels) {
  if (!labels.empty() && static_cast<int>(labels.size()) != node_count()) {
    throw Error(ErrorCode::kInvalidParams, "label count does not match node count");
  }
  labels_ = std::move(labels);
}

// Iterative Hopcroft-Tarjan low-link.
std::vector<NodeId> articulation_points(const EnvGraph& env) {
  const int m = env.node_count();
  std::vector<int> order(m, -1), low(m, 0), parent(m, -1);
  std::vector<std::size_t> next_child(m, 0);
  std::vector<char> is_cut(m, 0);
  int counter = 0;
  for (int root = 0; root < m; ++root) {
    if (order[root] >= 0) continue;
    int root_children = 0;
    std::vector<NodeId> stack{root};
    order[root] = low[root] = counter++;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      const auto nbrs = env.neighbors(u);
      if (next_child[u] < nbrs.size()) {
        const NodeId v = nbrs[next_child[u]++];
        if (order[v] < 0) {
          parent[v] = u;
          order[v] = low[v] = counter++;
          if (u == root) ++root_children;
          stack.push_back(v);
        } else if (v != parent[u]) {
          low[u] = std::min(low[u], order[v]);
        }
      } else {
        stack.pop_back();
        const NodeId p = parent[u];
        if (p >= 0) {
          low[p] = std::min(low[p], low[u]);
          if (p != root && low[u] >= order[p]) is_cut[p] = 1;
        }
      }
    }
    if (root_children > 1) is_cut[root] = 1;
  }
  std::vector<NodeId> cuts;
  for (int c = 0; c < m; ++c) {
    if (is_cut[c]) cuts.push_back(c);
  }
  return cuts;
}

DistanceOracle::DistanceOracle(const EnvGraph& env) : m_(env.node_count()) {
  const auto m = static_cast<std::size_t>(m_);
  dist_.assign(m * m, -1);
  std::vector<NodeId> queue(m);
  for (NodeId src = 0; src < m_; ++src) {
    std::int32_t* row = dist_.data() + static_cast<std::size_t>(src) * m;
    std::size_t head = 0, tail = 0;
    row[src] = 0;
    queue[tail++] = src;
    while (head < tail) {
      const NodeId u = queue[head++];
      for (NodeId v : env.neighbors(u)) {
        if (row[v] < 0) {
          row[v] = row[u] + 1;
          queue[tail++] = v;
        }
      }
    }
    for (std::size_t c = 0; c < m; ++c) diameter_ = std::max(diameter_, static_cast<int>(row[c]));
  }
}

DecayFunction DecayFunction::inverse_linear() {
  return DecayFunction("inv1p", [](int d) { return 1.0 / (1.0 + d); });
}

DecayFunction DecayFunction::exponential(double rate) {
  if (!(rate > 0.0)) throw Error(ErrorCode::kInvalidParams, "exponential decay rate must be positive");
  return DecayFunction("exp:" + std::to_string(rate), [rate](int d) { return std::exp(-rate * d); });
}

DecayFunction DecayFunction::parse(const std::string& id) {
  if (id == "inv1p") return inverse_linear();
  if (id.rfind("exp:", 0) == 0) {
    try {
      return exponential(std::stod(id.substr(4)));
    } catch (const std::logic_error&) {
      // fall through to the error below
    }
  }
  throw Error(ErrorCode::kInvalidParams, "unknown decay function '" + id + "'");
}

nlohmann::json to_json(const EnvGraph& env) {
  nlohmann::json nodes = nlohmann::json::array();
  for (int c = 0; c < env.node_count(); ++c) {
    nlohmann::json node{{"id", c}, {"weight", env.weight(c)}};
    if (!env.labels().empty()) {
      const auto& l = env.labels()[c];
      node["label"] = {l.x, l.y, l.z};
    }
    nodes.push_back(std::move(node));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (auto [a, b] : env.edges()) edges.push_back({a, b});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"meta", env.meta()}};
}

EnvGraph graph_from_json(const nlohmann::json& doc) {
  try {
    const auto& nodes = doc.at("nodes");
    const int m = static_cast<int>(nodes.size());
    std::vector<double> weights(static_cast<std::size_t>(m), 0.0);
    std::vector<NodeLabel> labels;
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    for (const auto& node : nodes) {
      const int id = node.at("id").get<int>();
      if (id < 0 || id >= m || seen[id]) {
        throw Error(ErrorCode::kParseError, "node ids must be a permutation of 0..m-1");
      }
      seen[id] = 1;
      weights[id] = node.at("weight").get<double>();
      if (node.contains("label")) {
        if (labels.empty()) labels.resize(static_cast<std::size_t>(m));
        const auto& l = node["label"];
        labels[id] = {l.at(0).get<double>(), l.at(1).get<double>(), l.at(2).get<double>()};
      }
    }
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    EnvGraph env = EnvGraph::build(m, edges, std::move(weights));
    if (!labels.empty()) env.set_labels(std::move(labels));
    if (doc.contains("meta")) env.set_meta(doc["meta"]);
    return env;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("graph JSON: ") + e.what());
  }
}

}  // namespace covctl
