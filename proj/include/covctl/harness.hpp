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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "covctl/baselines.hpp"
#include "covctl/coverage.hpp"
#include "covctl/env_graph.hpp"
#include "covctl/nbo.hpp"
#include "json.hpp"

namespace covctl {

// Shape id plus generator parameters. Recognised shapes and their params:
//   chain      {m, valued}
//   star       {branches, branch_len, valued}
//   tree       {m, valued}
//   maze       {w, valued, target_nodes?}
//   lattice3d  {dims: [x, y, z], valued}
//   grid       {dims: [x, y], valued}        (lattice3d with z = 1)
//   bridge     {valued}                      (valued < 0 marks every node)
//   indoor     {valued}
//   orlib      {path, cost_scale?, valued}
//   file       {path}                        (graph JSON as written by generate)
struct ShapeSpec {
  std::string shape;
  nlohmann::json params = nlohmann::json::object();
};

EnvGraph make_env(const ShapeSpec& spec, std::uint64_t seed, double eps_weight);

// n distinct start nodes drawn uniformly from all nodes.
Allocation initial_allocation(const EnvGraph& env, int n, std::uint64_t seed);

enum class Algorithm { kNbo, kVvp, kSota, kCgr, kOpt };
std::string_view to_string(Algorithm alg);
Algorithm parse_algorithm(const std::string& name);
std::vector<Algorithm> all_algorithms();

struct TrialConfig {
  std::string shape_id;  // row key in sweeps; defaults to shape.shape
  ShapeSpec shape;
  int n = 1;
  std::uint64_t seed = 0;
  int trial_index = 0;
  double eps_weight = kDefaultEpsWeight;
  std::string decay = "inv1p";
  Metric metric = Metric::kInduced;
  EdgeScope edge_scope = EdgeScope::kTree;
  PickMode pick = PickMode::kRoundRobin;
  std::vector<Algorithm> algorithms = all_algorithms();
  std::optional<std::int64_t> nbo_iteration_cap;
  int vvp_max_passes = 500;
  std::uint64_t opt_budget = 10'000'000;
  // Keep the full NBO trace in the record (the phi series is always kept).
  bool full_trace = false;
  std::optional<std::int64_t> inject_breach_at;
  std::string dump_path;
};

nlohmann::json to_json(const TrialConfig& config);
// Throws ConfigError on unknown keys or bad values.
TrialConfig trial_config_from_json(const nlohmann::json& doc);

// Runs every requested algorithm from one seeded environment and start
// allocation. Algorithm failures are recorded in "errors" and the trial goes
// on, except invariant breaches which propagate.
nlohmann::json run_trial(const TrialConfig& config);

// Record with every "wallclock" field removed, for reproducibility checks.
nlohmann::json strip_wallclock(const nlohmann::json& record);

// Post-hoc checks: exclusivity, G recomputed from the regenerated
// environment within 1e-9, phi series non-decreasing within 1e-9.
std::vector<std::string> validate_record(const nlohmann::json& record);

struct SweepEntry {
  std::string label;  // human-readable row name
  TrialConfig base;   // seed and trial_index are filled per trial
};

struct SweepConfig {
  std::uint64_t master_seed = 0;
  int trials = 32;
  int parallelism = 1;
  std::vector<SweepEntry> entries;
};

SweepConfig sweep_config_from_json(const nlohmann::json& doc);

std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& shape_id, int trial_index);

struct SweepSummaryRow {
  std::string shape_id;
  std::string label;
  std::string algorithm;
  std::string denominator;  // "CGR" or "OPT"
  double mean = 0.0;
  double std = 0.0;   // sample standard deviation
  double ci95 = 0.0;  // 1.96 std / sqrt(count)
  int count = 0;
};

struct SweepOutcome {
  std::vector<nlohmann::json> records;  // in (entry, trial) order
  std::vector<std::string> failures;    // trials that aborted
  bool invariant_breach = false;        // some trial aborted on a breach
};

// Runs trials on a bounded worker pool; each finished record is handed to
// sink from a single writer in (entry, trial) order.
SweepOutcome run_sweep(const SweepConfig& config,
                       const std::function<void(const nlohmann::json&)>& sink = {});

std::vector<SweepSummaryRow> summarize(const std::vector<nlohmann::json>& records,
                                       const std::vector<SweepEntry>& entries = {});

// summary.csv, table1.csv, ratios.csv, traces/*.csv and report.md.
void write_report(const std::vector<SweepSummaryRow>& rows,
                  const std::vector<nlohmann::json>& records, const std::string& out_dir);

std::vector<nlohmann::json> read_jsonl(const std::string& path);

struct ScalabilityConfig {
  std::uint64_t master_seed = 0;
  int seeds = 5;
  int fixed_n = 20;
  std::vector<std::array<int, 2>> sizes{{8, 6}, {12, 8}, {16, 12}};
  std::array<int, 2> fixed_size{16, 12};
  std::vector<int> n_grid{10, 20, 40};
  double eps_weight = kDefaultEpsWeight;
  std::string decay = "inv1p";
};

ScalabilityConfig scalability_config_from_json(const nlohmann::json& doc);

struct ScalabilityCell {
  std::string sweep;  // "size" or "agents"
  int nodes = 0;
  int n = 0;
  std::vector<double> runtimes;
  std::vector<std::int64_t> iterations;
  double median_runtime = 0.0;
  double median_iterations = 0.0;
};

struct ScalabilityTable {
  std::vector<ScalabilityCell> cells;
  bool runtime_nondecreasing_in_size = false;
  bool runtime_nonincreasing_in_n = false;
};

ScalabilityTable scalability_sweep(const ScalabilityConfig& config);
nlohmann::json to_json(const ScalabilityTable& table);
void write_scalability(const ScalabilityTable& table, const std::string& out_dir);

}  // namespace covctl
