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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "covctl/baselines.hpp"
#include "covctl/harness.hpp"
#include "covctl/nbo.hpp"
#include "covctl/rng.hpp"
#include "fixtures.hpp"

using namespace covctl;
using namespace covctl::testing;
using nlohmann::json;

namespace {

constexpr double kTol = 1e-9;

int failures = 0;
std::map<int, std::string> lines;  // printed in criterion order at the end

void report(int id, bool ok, const std::string& title, const std::string& detail) {
  char head[96];
  std::snprintf(head, sizeof head, "%s criterion %2d  %-38s ", ok ? "PASS" : "FAIL", id, title.c_str());
  lines[id] = head + detail;
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Running checks shared by several criteria.
struct Tally {
  long phi_steps = 0;
  long phi_violations = 0;
  long runs = 0;
  long certificate_failures = 0;

  void phi_series(const std::vector<double>& phi) {
    for (std::size_t t = 1; t < phi.size(); ++t) {
      ++phi_steps;
      if (phi[t] < phi[t - 1] - kTol) ++phi_violations;
    }
  }
  void certificate(const Certificate& c, StateClass cls, int n) {
    ++runs;
    const bool ok = cls == StateClass::kZ4 && c.pair_residual <= kTol && c.third_gap <= kTol &&
                    c.m1_gap <= kTol && static_cast<int>(c.edges_checked) == n - 1;
    if (!ok) ++certificate_failures;
  }
};

std::vector<double> phi_of(const std::vector<TraceRecord>& trace) {
  std::vector<double> phi;
  for (const auto& r : trace) phi.push_back(r.phi);
  return phi;
}

struct Instance {
  EnvGraph env;
  int n;
};

std::vector<Instance> brute_forceable_instances() {
  std::vector<Instance> out;
  Rng rng(20220101);
  for (int k = 0; k < 200; ++k) {
    const std::uint64_t seed = mix_seed(99, static_cast<std::uint64_t>(k));
    switch (k % 3) {
      case 0: {
        const int m = 10 + static_cast<int>(rng.below(11));
        out.push_back({gen_chain(m, m / 2, seed), 2 + static_cast<int>(rng.below(4))});
        break;
      }
      case 1: {
        const int m = 12 + static_cast<int>(rng.below(7));
        out.push_back({gen_random_maze(1, m / 2, seed, kDefaultEpsWeight, m), 2 + static_cast<int>(rng.below(3))});
        break;
      }
      default: {
        const int m = 10 + static_cast<int>(rng.below(9));
        out.push_back({gen_tree(m, m / 2, seed), 2 + static_cast<int>(rng.below(3))});
        break;
      }
    }
  }
  return out;
}

SweepConfig table1_config() {
  std::ifstream in(std::string(COVCTL_CONFIG_DIR) + "/table1.json");
  SweepConfig sc = sweep_config_from_json(json::parse(in));
  sc.parallelism = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (auto& e : sc.entries) {
    auto& params = e.base.shape.params;
    if (params.contains("path")) params["path"] = std::string(COVCTL_CONFIG_DIR) + "/" + params["path"].get<std::string>();
  }
  return sc;
}

struct Stats {
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  s.count = static_cast<int>(v.size());
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= s.count;
  if (s.count > 1) {
    double sq = 0.0;
    for (double x : v) sq += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(sq / (s.count - 1));
  }
  return s;
}

std::vector<double> ratios(const std::vector<json>& records, const std::string& shape, const std::string& alg,
                           const std::string& denominator) {
  std::vector<double> v;
  for (const auto& r : records) {
    if (r["shape_id"] != shape) continue;
    const auto& ratio = r["ratios"];
    if (ratio.contains(alg) && ratio[alg].contains(denominator)) v.push_back(ratio[alg][denominator].get<double>());
  }
  return v;
}

}  // namespace

int main() {
  const auto started = std::chrono::steady_clock::now();
  Tally tally;

  // Criteria 1 and 8 share the brute-forceable instances.
  {
    const auto instances = brute_forceable_instances();
    int approx_violations = 0, cgr_violations = 0;
    double worst_nbo = 1.0, worst_cgr = 1.0;
    const double greedy = 1.0 - 1.0 / std::exp(1.0);
    for (std::size_t k = 0; k < instances.size(); ++k) {
      const World w(instances[k].env);
      const int n = instances[k].n;
      Rng rng(mix_seed(7, k));
      const Allocation start = rng.sample(w.env.node_count(), n);
      NboConfig cfg;
      cfg.seed = k;
      const NboResult nbo = run_nbo(w.ctx(), cfg, start);
      const double opt = opt_bruteforce(w.ctx(), n).G;
      const double cgr = cgr_run(w.ctx(), n).G;
      tally.phi_series(phi_of(nbo.trace));
      tally.certificate(nbo.certificate, nbo.final_class, n);
      if (nbo.G < 0.5 * opt) ++approx_violations;
      if (cgr < (greedy - kTol) * opt) ++cgr_violations;
      worst_nbo = std::min(worst_nbo, nbo.G / opt);
      worst_cgr = std::min(worst_cgr, cgr / opt);
    }
    report(1, approx_violations == 0, "NBO >= OPT/2 on 200 instances",
           std::to_string(approx_violations) + " violations, worst NBO/OPT " + fmt("%.4f", worst_nbo));
    report(8, cgr_violations == 0, "CGR >= (1-1/e) OPT on 200 instances",
           std::to_string(cgr_violations) + " violations, worst CGR/OPT " + fmt("%.4f", worst_cgr));
  }

  // Criteria 2 and 3 come from the Table-1 sweep.
  const SweepConfig table1 = table1_config();
  const SweepOutcome sweep = run_sweep(table1);
  for (const auto& rec : sweep.records) {
    if (!rec["results"].contains("NBO")) continue;
    const auto& r = rec["results"]["NBO"];
    tally.phi_series(r["phi"].get<std::vector<double>>());
    Certificate c;
    c.pair_residual = r["certificate"]["pair_residual"];
    c.third_gap = r["certificate"]["third_gap"];
    c.m1_gap = r["certificate"]["m1_gap"];
    c.edges_checked = r["certificate"]["edges_checked"];
    tally.certificate(c, r["final_class"] == "Z4" ? StateClass::kZ4 : StateClass::kZ1,
                      rec["config"]["n"].get<int>());
  }
  {
    const Stats nbo_opt = stats_of(ratios(sweep.records, "chain", "NBO", "OPT"));
    const Stats vvp = stats_of(ratios(sweep.records, "chain", "VVP", "CGR"));
    const Stats sota = stats_of(ratios(sweep.records, "chain", "SOTA", "CGR"));
    const bool ok = sweep.failures.empty() && nbo_opt.count == 32 && nbo_opt.mean >= 0.84 && nbo_opt.mean <= 0.96 &&
                    vvp.mean >= 0.41 && vvp.mean <= 0.62 && sota.mean >= 0.55 && sota.mean <= 0.80;
    report(2, ok, "1D chain efficiency bands",
           "NBO/OPT " + fmt("%.3f", nbo_opt.mean) + " (want 0.84-0.96), VVP/CGR " + fmt("%.3f", vvp.mean) +
               " (want 0.41-0.62), SOTA/CGR " + fmt("%.3f", sota.mean) + " (want 0.55-0.80)");
  }
  {
    bool ok = sweep.failures.empty();
    std::string detail;
    for (const char* shape : {"chain", "star", "tree", "maze_w1", "maze_w2", "bridge", "lattice3d"}) {
      const Stats nbo = stats_of(ratios(sweep.records, shape, "NBO", "CGR"));
      const Stats sota = stats_of(ratios(sweep.records, shape, "SOTA", "CGR"));
      const Stats vvp = stats_of(ratios(sweep.records, shape, "VVP", "CGR"));
      bool row = nbo.count == 32 && nbo.mean >= sota.mean && sota.mean >= vvp.mean;
      if (std::string(shape) == "chain") {
        // Paired NBO - SOTA differences must clear zero at the 95% level.
        const auto a = ratios(sweep.records, shape, "NBO", "CGR");
        const auto b = ratios(sweep.records, shape, "SOTA", "CGR");
        std::vector<double> diff;
        for (std::size_t k = 0; k < a.size() && k < b.size(); ++k) diff.push_back(a[k] - b[k]);
        const Stats d = stats_of(diff);
        row = row && d.mean - 1.96 * d.std / std::sqrt(static_cast<double>(d.count)) > 0.0;
      }
      ok = ok && row;
      if (!row) detail += std::string(shape) + " out of order; ";
    }
    report(3, ok, "NBO >= SOTA >= VVP on generated shapes",
           detail.empty() ? "7 shapes ordered, chain gap clears the 95% CI" : detail);
  }

  // Criterion 6: one agent per valued node.
  {
    int exceptions = 0;
    for (int k = 0; k < 50; ++k) {
      const std::uint64_t seed = mix_seed(600, static_cast<std::uint64_t>(k));
      const int valued = 3 + k % 4;
      const World w(k % 2 ? gen_random_maze(1 + (k / 2) % 2, valued, seed) : gen_chain(12 + k % 9, valued, seed));
      Rng rng(seed);
      NboConfig cfg;
      cfg.seed = seed;
      const NboResult r = run_nbo(w.ctx(), cfg, rng.sample(w.env.node_count(), valued));
      tally.phi_series(phi_of(r.trace));
      tally.certificate(r.certificate, r.final_class, valued);
      const std::set<NodeId> distinct(r.allocation.begin(), r.allocation.end());
      bool all_valued = distinct.size() == r.allocation.size();
      for (NodeId p : r.allocation) all_valued = all_valued && w.env.weight(p) == 1.0;
      if (!all_valued) ++exceptions;
    }
    report(6, exceptions == 0, "N = |C+| puts agents on valued nodes",
           std::to_string(exceptions) + " exceptions in 50 instances");
  }

  report(4, tally.phi_violations == 0, "potential never decreases",
         std::to_string(tally.phi_violations) + " violations over " + std::to_string(tally.phi_steps) + " steps");
  report(5, tally.certificate_failures == 0, "Z4 with neighbourhood certificates",
         std::to_string(tally.certificate_failures) + " failures over " + std::to_string(tally.runs) + " runs");

  // Criterion 7: the 12-node path.
  {
    const World w(path_graph(12));
    const double opt = opt_bruteforce(w.ctx(), 2).G;
    const double nbo = run_nbo(w.ctx(), {}, {0, 1}).G;
    const double nbo_switched = run_nbo(w.ctx(), {}, {1, 0}).G;
    const double sota_b = sota_run(w.ctx(), {}, {0, 1}).G;
    const double sota_e = sota_run(w.ctx(), {}, {1, 0}).G;
    const bool ok = std::abs(nbo - opt) <= kTol && std::abs(nbo_switched - opt) <= kTol && sota_b < opt - kTol &&
                    sota_e > sota_b + kTol && sota_e < opt - kTol;
    report(7, ok, "12-node path fixture",
           "OPT " + fmt("%.4f", opt) + ", NBO " + fmt("%.4f", nbo) + "/" + fmt("%.4f", nbo_switched) + ", SOTA " +
               fmt("%.4f", sota_b) + " then " + fmt("%.4f", sota_e) + " switched");
  }

  // Criterion 9: the worked example grid.
  {
    const World w(example1::graph());
    NboSolver s(w.ctx(), NboConfig{}, example1::agents());
    const std::vector<double> want{1.0, 1.5, 3.2, 4.2, 5.0, 1.5};
    bool ok = std::abs(objective(w.ctx(), example1::agents()) - 16.4) <= 0.05;
    for (int i = 0; i < 6; ++i) ok = ok && std::abs(s.utility_of(i) - want[i]) <= 0.05;
    const AgentAdjacency adj = agent_adjacency(w.env, s.partition());
    ok = ok && adj[example1::e] == std::vector<int>{example1::c, example1::d, example1::f};
    const CommTree tree = s.build_comm_tree();
    const GlobalInfo info = s.global_info(&tree);
    ok = ok && s.classify(tree, info) == StateClass::kZ1 && std::abs(info.V - 1.5) <= 0.05 &&
         std::abs(info.u_min - 1.0) <= kTol && std::abs(s.m1_of(example1::e) - 1.5) <= 0.05;
    report(9, ok, "worked example grid",
           "G " + fmt("%.3f", objective(w.ctx(), example1::agents())) + ", V " + fmt("%.3f", info.V) + ", M1(e) " +
               fmt("%.3f", s.m1_of(example1::e)));
  }

  // Criterion 10: runtime trends.
  {
    std::ifstream in(std::string(COVCTL_CONFIG_DIR) + "/scalability.json");
    const ScalabilityTable t = scalability_sweep(scalability_config_from_json(json::parse(in)));
    std::string detail;
    for (const auto& c : t.cells) {
      detail += c.sweep + "(" + std::to_string(c.nodes) + "," + std::to_string(c.n) + ")=" +
                fmt("%.4fs", c.median_runtime) + " ";
    }
    report(10, t.runtime_nondecreasing_in_size && t.runtime_nonincreasing_in_n, "runtime trends", detail);
  }

  // Criterion 11: determinism and message accounting.
  {
    bool identical = true;
    long over_bound = 0, steps = 0;
    for (int k = 0; k < 20; ++k) {
      const World w(k % 2 ? gen_random_maze(2, 30, k) : gen_tree(60, 30, k));
      Rng rng(static_cast<std::uint64_t>(k));
      const int n = 4 + k % 10;
      const Allocation start = rng.sample(w.env.node_count(), n);
      NboConfig cfg;
      cfg.seed = static_cast<std::uint64_t>(k);
      cfg.pick = k % 4 < 2 ? PickMode::kRoundRobin : PickMode::kProbabilistic;
      const NboResult a = run_nbo(w.ctx(), cfg, start);
      const NboResult b = run_nbo(w.ctx(), cfg, start);
      identical = identical && a.trace.size() == b.trace.size() && a.allocation == b.allocation;
      for (std::size_t t = 0; identical && t < a.trace.size(); ++t) {
        identical = to_json(a.trace[t]) == to_json(b.trace[t]);
      }
      for (const auto& r : a.trace) {
        ++steps;
        const std::int64_t bound = static_cast<std::int64_t>(n) * (n - 1) / 2 + 2 * (n - 1) + r.pair_region;
        if (r.messages_delta > bound) ++over_bound;
      }
    }
    TrialConfig tc;
    tc.shape_id = "chain";
    tc.shape = {"chain", {{"m", 20}, {"valued", 10}}};
    tc.n = 5;
    tc.seed = 4;
    tc.full_trace = true;
    identical = identical && strip_wallclock(run_trial(tc)).dump() == strip_wallclock(run_trial(tc)).dump();
    report(11, identical && over_bound == 0, "determinism and message bound",
           std::string(identical ? "traces identical" : "traces differ") + ", " + std::to_string(over_bound) +
               " of " + std::to_string(steps) + " steps over the bound");
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%d criteria failed, %.1f s\n", failures, seconds);
  return failures == 0 ? 0 : 1;
}
