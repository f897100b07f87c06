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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "covctl/coverage.hpp"
#include "covctl/rng.hpp"
#include "json.hpp"

namespace covctl {

enum class StateClass { kZ1, kZ2, kZ3, kZ4 };
std::string_view to_string(StateClass cls);

enum class PickMode {
  kRoundRobin,     // smallest-id agent whose done flag is unset
  kProbabilistic,  // uniform draw from the seeded generator
};

// Which agent pairs the Z3/Z4 tests range over.
enum class EdgeScope {
  kTree,       // the n-1 communication tree edges
  kAdjacency,  // every edge of the agent adjacency graph
};

struct NboConfig {
  double eps_weight = kDefaultEpsWeight;
  Metric metric = Metric::kInduced;
  PickMode pick = PickMode::kRoundRobin;
  EdgeScope edge_scope = EdgeScope::kTree;
  std::uint64_t seed = 0;
  // Defaults to n (phi_upper - phi_0) / eps_conv when unset.
  std::optional<std::int64_t> iteration_cap;
  double tol = 1e-9;
  // Re-validate the partition after every step.
  bool check_partition = true;
  // Test hook: report a potential drop at this iteration.
  std::optional<std::int64_t> inject_breach_at;
  // Where to write the state dump when an invariant breaks; empty disables.
  std::string dump_path;
};

struct CommTree {
  int root = 0;
  std::vector<int> parent;                 // -1 at the root
  std::vector<std::vector<int>> children;  // ascending
  std::int64_t messages = 0;               // adjacency edges touched

  std::vector<std::pair<int, int>> edges() const;  // (child, parent)
};

struct GlobalInfo {
  double u_min = 0.0;
  int i_min = 0;
  NodeId x_imin = 0;
  int i_max_plus = 0;
  double V = 0.0;
  std::int64_t message_count_delta = 0;
};

// Quantities of the pair region P_ij = P_i u P_j.
struct PairStats {
  double m2 = 0.0;
  double m3 = 0.0;  // equals m2 when P_ij has fewer than three nodes
  bool has_m3 = false;
  std::vector<NodeId> b2;
  std::vector<NodeId> b3;
  std::size_t region_size = 0;
};

struct TraceRecord {
  std::int64_t t = 0;
  StateClass cls = StateClass::kZ1;
  double phi = 0.0;
  double G = 0.0;
  double u_min = 0.0;
  double V = 0.0;
  int i = -1;
  int j = -1;
  char step = 'a';
  std::int64_t messages_total = 0;
  std::int64_t messages_delta = 0;
  std::size_t pair_region = 0;
};

nlohmann::json to_json(const TraceRecord& record);

// Residuals of the terminal optimality conditions.
struct Certificate {
  double pair_residual = 0.0;  // max |u_i + u_j - M2| over checked edges
  double third_gap = 0.0;      // max (M3 - M2 - u_min) over checked edges
  double m1_gap = 0.0;         // max_i M1(x_i; P_i) - u_min
  std::size_t edges_checked = 0;
};

class NboSolver {
 public:
  NboSolver(const CoverageContext& ctx, NboConfig config, Allocation initial);

  // Runs until Z4. Throws IterationCapExceeded or InvariantViolation.
  void run();

  // Single pieces of the loop, exposed for tests.
  CommTree build_comm_tree();
  // With a tree, ties on V prefer shallower agents.
  GlobalInfo global_info(const CommTree* tree = nullptr);
  StateClass classify(const CommTree& tree, const GlobalInfo& info);
  std::pair<int, int> select_agent(const CommTree& tree, const GlobalInfo& info, StateClass cls);
  bool step_condition_a(int i, int j, const GlobalInfo& info);
  void step_a(int i, int j);
  // Returns the agent that absorbed the vacated block.
  int step_b(int i, int j, const CommTree& tree, const GlobalInfo& info);
  double potential();
  Certificate certificate(EdgeScope scope);

  double utility_of(int agent);
  double m1_of(int agent);
  const PairStats& pair_stats(int i, int j);

  const Allocation& allocation() const { return x_; }
  const Partition& partition() const { return partition_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  std::int64_t iterations() const { return iteration_; }
  std::int64_t messages() const { return messages_; }
  std::int64_t iteration_cap() const { return cap_; }
  StateClass final_class() const { return final_class_; }
  const CommTree& final_tree() const { return final_tree_; }
  double objective_value() const;
  int agent_count() const { return static_cast<int>(x_.size()); }

  nlohmann::json dump_state() const;

 private:
  void set_block(int agent, NodeId position, Block block);
  std::vector<std::pair<int, int>> scope_pairs(const CommTree& tree, EdgeScope scope) const;
  [[noreturn]] void breach(const std::string& what);

  CoverageContext ctx_;
  NboConfig config_;
  Allocation x_;
  Partition partition_;
  Rng rng_;

  std::vector<std::uint64_t> version_;
  std::uint64_t next_version_ = 1;
  std::vector<std::uint64_t> utility_version_, m1_version_;
  std::vector<double> utility_cache_, m1_cache_;
  std::map<std::tuple<int, int, std::uint64_t, std::uint64_t>, PairStats> pair_cache_;

  std::vector<char> done_;
  std::vector<TraceRecord> trace_;
  std::int64_t iteration_ = 0;
  std::int64_t messages_ = 0;
  std::int64_t cap_ = 0;
  StateClass final_class_ = StateClass::kZ1;
  CommTree final_tree_;
};

struct NboResult {
  Allocation allocation;
  Partition partition;
  double G = 0.0;
  std::int64_t iterations = 0;
  std::int64_t messages = 0;
  StateClass final_class = StateClass::kZ1;
  Certificate certificate;
  std::vector<TraceRecord> trace;
};

NboResult run_nbo(const CoverageContext& ctx, const NboConfig& config, const Allocation& initial);

}  // namespace covctl
