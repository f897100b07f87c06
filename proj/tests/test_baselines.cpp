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

#include <cmath>
#include <set>

#include "covctl/baselines.hpp"
#include "covctl/env_graph.hpp"
#include "covctl/nbo.hpp"
#include "covctl/rng.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace covctl;
using namespace covctl::testing;
using doctest::Approx;

namespace {

const double kGreedyBound = 1.0 - 1.0 / std::exp(1.0) - 1e-9;

bool exclusive(const Allocation& x) { return std::set<NodeId>(x.begin(), x.end()).size() == x.size(); }

double objective_of(const World& w, const Allocation& x) {
  return naive_objective(w.env, floyd_warshall(w.env), w.decay, x, all_nodes_of(w.env));
}

}  // namespace

TEST_CASE("12-node path fixture: order-dependent SOTA, optimal NBO") {
  const World w(path_graph(12));
  const double opt = naive_opt(w.env, w.decay, 2);
  CHECK(opt == Approx(35.0 / 6.0).epsilon(1e-12));

  // Agent 0 on the end node is blocked; agent 1 settles alone.
  const AlgorithmResult b = sota_run(w.ctx(), {}, {0, 1});
  CHECK(b.allocation == Allocation{0, 7});
  CHECK(b.G == Approx(5.45).epsilon(1e-12));
  CHECK(b.G < opt - 1e-9);

  const AlgorithmResult e = sota_run(w.ctx(), {}, {1, 0});
  CHECK(e.allocation == Allocation{7, 2});
  CHECK(e.G == Approx(5.0 + 47.0 / 60.0).epsilon(1e-12));
  CHECK(e.G > b.G + 1e-9);
  CHECK(e.G < opt - 1e-9);

  CHECK(run_nbo(w.ctx(), {}, {0, 1}).G == Approx(opt).epsilon(1e-12));
  CHECK(run_nbo(w.ctx(), {}, {1, 0}).G == Approx(opt).epsilon(1e-12));

  // The explicit order reproduces the switched outcome without relabelling.
  SotaConfig reversed;
  reversed.order = {1, 0};
  CHECK(sota_run(w.ctx(), reversed, {0, 1}).G == Approx(e.G).epsilon(1e-12));
}

TEST_CASE("VVP on the path fixture and at fixed points") {
  const World w(path_graph(12));
  const AlgorithmResult r = vvp_run(w.ctx(), {}, {0, 1});
  CHECK(r.converged);
  CHECK(r.G == Approx(objective_of(w, r.allocation)).epsilon(1e-12));
  // Rerunning from the result is a single pass with no change.
  const AlgorithmResult again = vvp_run(w.ctx(), {}, r.allocation);
  CHECK(again.allocation == r.allocation);
  CHECK(again.iterations == 1);

  const AlgorithmResult single = vvp_run(w.ctx(), {}, {0});
  CHECK(single.G == Approx(naive_opt(w.env, w.decay, 1)).epsilon(1e-12));

  VvpConfig capped;
  capped.max_passes = 1;
  CHECK_FALSE(vvp_run(w.ctx(), capped, {0, 1}).converged);
}

TEST_CASE("CGR: greedy rounds, bound against the optimum, saturation") {
  const World w(path_graph(12));
  const AlgorithmResult one = cgr_run(w.ctx(), 1);
  CHECK(one.G == Approx(naive_opt(w.env, w.decay, 1)).epsilon(1e-12));
  const AlgorithmResult two = cgr_run(w.ctx(), 2);
  CHECK(two.allocation == Allocation{5, 9});
  CHECK(two.G >= kGreedyBound * naive_opt(w.env, w.decay, 2));
  CHECK(two.G >= one.G);

  const World small(path_graph(5));
  const AlgorithmResult full = cgr_run(small.ctx(), 5);
  CHECK(full.G == Approx(5.0).epsilon(1e-12));
  CHECK(error_code_of([&] { cgr_run(small.ctx(), 6); }) == ErrorCode::kTooManyAgents);
}

TEST_CASE("OPT: enumeration count, budget and agent limits") {
  const World w(gen_chain(20, 10, 1));
  const AlgorithmResult r = opt_bruteforce(w.ctx(), 5);
  CHECK(r.iterations == 15504);
  CHECK(binomial(20, 5) == 15504);
  CHECK(r.G == Approx(naive_opt(w.env, w.decay, 5)).epsilon(1e-12));

  OptConfig tight;
  tight.budget = 15503;
  CHECK(error_code_of([&] { opt_bruteforce(w.ctx(), 5, tight); }) == ErrorCode::kBudgetExceeded);
  CHECK(error_code_of([&] { opt_bruteforce(w.ctx(), 21); }) == ErrorCode::kTooManyAgents);

  const AlgorithmResult one = opt_bruteforce(w.ctx(), 1);
  CHECK(one.iterations == 20);
  CHECK(binomial(5, 0) == 1);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(200, 100) == UINT64_MAX);
}

TEST_CASE("OPT dominates, CGR keeps its guarantee, every result is exclusive") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int kind = trial % 3;
    const World w(kind == 0   ? gen_chain(16, 8, trial)
                  : kind == 1 ? gen_tree(15, 7, trial)
                              : gen_random_maze(1, 8, trial));
    const int n = 2 + trial % 3;
    const Allocation start = rng.sample(w.env.node_count(), n);
    const AlgorithmResult opt = opt_bruteforce(w.ctx(), n);
    CHECK(opt.G == Approx(naive_opt(w.env, w.decay, n)).epsilon(1e-12));
    const AlgorithmResult cgr = cgr_run(w.ctx(), n);
    CHECK(cgr.G >= kGreedyBound * opt.G);
    const AlgorithmResult runs[] = {vvp_run(w.ctx(), {}, start), sota_run(w.ctx(), {}, start), cgr,
                                    [&] {
                                      const NboResult nbo = run_nbo(w.ctx(), {}, start);
                                      AlgorithmResult r;
                                      r.allocation = nbo.allocation;
                                      r.G = nbo.G;
                                      return r;
                                    }()};
    for (const auto& r : runs) {
      CHECK(exclusive(r.allocation));
      CHECK(static_cast<int>(r.allocation.size()) == n);
      CHECK(r.G <= opt.G + 1e-9);
      CHECK(r.G == Approx(objective_of(w, r.allocation)).epsilon(1e-12));
    }
  }
}

TEST_CASE("SOTA never lowers the objective for a single agent") {
  const World w(gen_tree(20, 10, 2));
  for (NodeId start = 0; start < w.env.node_count(); ++start) {
    const AlgorithmResult r = sota_run(w.ctx(), {}, {start});
    CHECK(r.G >= objective_of(w, {start}) - 1e-12);
  }
}
