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
#include <string>

#include "covctl/coverage.hpp"

namespace covctl {

struct AlgorithmResult {
  std::string name;
  Allocation allocation;
  double G = 0.0;  // recomputed from the final allocation
  std::int64_t iterations = 0;
  bool converged = true;
  double wallclock = 0.0;  // seconds
};

struct VvpConfig {
  int max_passes = 500;
};

struct SotaConfig {
  // Moves one activation may apply. The default applies the first strict
  // improvement and deactivates the agent.
  int max_moves_per_activation = 1;
  // Agents in activation order; empty means ascending id.
  std::vector<int> order;
};

struct OptConfig {
  std::uint64_t budget = 10'000'000;  // candidate allocations
};

// Voronoi best response: each agent in turn moves to the node of its own cell
// with the highest utility, until a full pass changes nothing.
AlgorithmResult vvp_run(const CoverageContext& ctx, const VvpConfig& config, const Allocation& initial);

// One activation per agent. Within an activation the agent first tries moves
// inside its cell that raise the summed utility of itself and its neighbours;
// failing that it tries swaps in which it moves inside its cell and a partner
// takes its old node. Partners are tried in hop order over the adjacency
// graph and the first strict improvement is applied.
AlgorithmResult sota_run(const CoverageContext& ctx, const SotaConfig& config, const Allocation& initial);

// Centralized greedy: n rounds of the largest marginal gain.
AlgorithmResult cgr_run(const CoverageContext& ctx, int n);

// Exhaustive optimum over all exclusive allocations.
AlgorithmResult opt_bruteforce(const CoverageContext& ctx, int n, const OptConfig& config = {});

// n choose k, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

}  // namespace covctl
