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

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace covctl {

using NodeId = int;
using Edge = std::pair<NodeId, NodeId>;

// Weight given to nodes outside the set of points of interest.
inline constexpr double kDefaultEpsWeight = 1e-3;

struct NodeLabel {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Connected node-weighted graph with unit-length edges. Immutable once built;
// the only way to obtain one is through build(), which validates it.
class EnvGraph {
 public:
  static EnvGraph build(int node_count, std::span<const Edge> edges,
                        std::vector<double> weights);

  int node_count() const { return static_cast<int>(adjacency_.size()); }
  std::size_t edge_count() const { return edges_.size(); }

  // Normalized (low, high) pairs in ascending order.
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const NodeId> neighbors(NodeId node) const { return adjacency_[node]; }
  bool has_edge(NodeId a, NodeId b) const;

  double weight(NodeId node) const { return weights_[node]; }
  const std::vector<double>& weights() const { return weights_; }
  // Nodes with weight exactly 1, ascending.
  const std::vector<NodeId>& valued_nodes() const { return valued_; }
  double total_weight() const;

  const std::vector<NodeLabel>& labels() const { return labels_; }
  void set_labels(std::vector<NodeLabel> labels);

  // Free-form provenance: {generator, seed, params}.
  const nlohmann::json& meta() const { return meta_; }
  void set_meta(nlohmann::json meta) { meta_ = std::move(meta); }

 private:
  EnvGraph() = default;

  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
  std::vector<NodeId> valued_;
  std::vector<NodeLabel> labels_;
  nlohmann::json meta_ = nlohmann::json::object();
};

bool is_connected(int node_count, std::span<const std::vector<NodeId>> adjacency);
std::vector<NodeId> articulation_points(const EnvGraph& env);

// All-pairs hop distances by BFS from every node.
class DistanceOracle {
 public:
  explicit DistanceOracle(const EnvGraph& env);

  int operator()(NodeId a, NodeId b) const {
    return dist_[static_cast<std::size_t>(a) * static_cast<std::size_t>(m_) +
                 static_cast<std::size_t>(b)];
  }
  int diameter() const { return diameter_; }
  int node_count() const { return m_; }

 private:
  int m_ = 0;
  int diameter_ = 0;
  std::vector<std::int32_t> dist_;
};

// Non-increasing map from hop distance to coverage quality.
class DecayFunction {
 public:
  // g(d) = 1 / (1 + d)
  static DecayFunction inverse_linear();
  // g(d) = exp(-rate * d)
  static DecayFunction exponential(double rate);
  // "inv1p" or "exp:<rate>".
  static DecayFunction parse(const std::string& id);

  double operator()(int distance) const { return fn_(distance); }
  const std::string& id() const { return id_; }

 private:
  DecayFunction(std::string id, std::function<double(int)> fn)
      : id_(std::move(id)), fn_(std::move(fn)) {}

  std::string id_;
  std::function<double(int)> fn_;
};

// ---- generators ---------------------------------------------------------
// Every generator is a pure function of its arguments. Valued nodes (weight
// 1) are drawn uniformly without replacement; all other nodes get eps.

EnvGraph gen_chain(int length, int n_valued, std::uint64_t seed,
                   double eps = kDefaultEpsWeight);
EnvGraph gen_star(int branches, int branch_len, int n_valued, std::uint64_t seed,
                  double eps = kDefaultEpsWeight);
// Uniformly random labelled tree (Pruefer sequence).
EnvGraph gen_tree(int m, int n_valued, std::uint64_t seed, double eps = kDefaultEpsWeight);

struct MazeTemplate {
  int side = 0;       // L = 3(w+1) - 1
  int tail = 0;       // S = 2w + 4
  int node_count = 0;
};
MazeTemplate maze_template(int width_param);
// Corridor template with random node removals that keep the graph connected.
// target_nodes defaults to 80% of the template, rounded.
EnvGraph gen_random_maze(int width_param, int n_valued, std::uint64_t seed,
                         double eps = kDefaultEpsWeight,
                         std::optional<int> target_nodes = std::nullopt);
EnvGraph gen_lattice3d(std::array<int, 3> dims, int n_valued, std::uint64_t seed,
                       double eps = kDefaultEpsWeight);
// Authored layouts. n_valued < 0 marks every node as valued.
EnvGraph gen_bridge(int n_valued = -1, std::uint64_t seed = 0, double eps = kDefaultEpsWeight);
EnvGraph gen_indoor(int n_valued = -1, std::uint64_t seed = 0, double eps = kDefaultEpsWeight);
EnvGraph gen_layout(const std::string& name, int n_valued, std::uint64_t seed, double eps);
std::vector<std::string> layout_names();

struct OrlibOptions {
  // Chain length of an edge is max(1, round(cost * cost_scale)).
  double cost_scale = 1.0;
  // Valued nodes drawn among the original vertices; < 0 means all of them.
  int n_valued = -1;
  std::uint64_t seed = 0;
  double eps = kDefaultEpsWeight;
};
EnvGraph parse_orlib(std::istream& in, const OrlibOptions& options = {});
EnvGraph load_orlib(const std::string& path, const OrlibOptions& options = {});

// ---- serialization ------------------------------------------------------
nlohmann::json to_json(const EnvGraph& env);
EnvGraph graph_from_json(const nlohmann::json& doc);

}  // namespace covctl
