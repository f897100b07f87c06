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

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "covctl/coverage.hpp"
#include "covctl/env_graph.hpp"
#include "covctl/errors.hpp"

namespace covctl::testing {

// Code of the covctl::Error thrown by fn, or nullopt if it returns.
inline std::optional<ErrorCode> error_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// Owns everything a CoverageContext points at.
struct World {
  EnvGraph env;
  std::unique_ptr<DistanceOracle> oracle;
  DecayFunction decay = DecayFunction::inverse_linear();
  Metric metric = Metric::kInduced;

  explicit World(EnvGraph e, DecayFunction g = DecayFunction::inverse_linear(), Metric m = Metric::kInduced)
      : env(std::move(e)), oracle(std::make_unique<DistanceOracle>(env)), decay(std::move(g)), metric(m) {}

  CoverageContext ctx() const { return CoverageContext{&env, oracle.get(), &decay, metric}; }
};

inline EnvGraph grid_graph(int w, int h, std::vector<double> weights) {
  std::vector<Edge> edges;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int id = y * w + x;
      if (x + 1 < w) edges.emplace_back(id, id + 1);
      if (y + 1 < h) edges.emplace_back(id, id + w);
    }
  }
  return EnvGraph::build(w * h, edges, std::move(weights));
}

inline EnvGraph path_graph(int m, double weight = 1.0) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
  return EnvGraph::build(m, edges, std::vector<double>(static_cast<std::size_t>(m), weight));
}

// Worked example: 9x6 grid, node id = y * 9 + x, unit weight on the circled
// nodes and the six agent nodes, zero elsewhere.
namespace example1 {

inline constexpr int kWidth = 9;
inline constexpr int kHeight = 6;
inline constexpr int id(int x, int y) { return y * kWidth + x; }

enum Agent { a, b, c, d, e, f };

inline Allocation agents() { return {id(0, 0), id(1, 0), id(4, 0), id(4, 3), id(7, 2), id(8, 1)}; }

inline std::vector<int> valued_nodes() {
  std::vector<int> v{id(2, 0), id(3, 0), id(5, 0), id(6, 0), id(7, 0), id(8, 0), id(4, 1), id(5, 1), id(6, 1),
                     id(7, 1), id(4, 2), id(5, 2), id(6, 2), id(8, 2), id(5, 3), id(7, 3), id(8, 3)};
  for (int y = 4; y < 6; ++y) {
    for (int x = 4; x < 9; ++x) v.push_back(id(x, y));
  }
  for (int p : agents()) v.push_back(p);
  return v;
}

inline EnvGraph graph() {
  std::vector<double> w(kWidth * kHeight, 0.0);
  for (int c : valued_nodes()) w[c] = 1.0;
  return grid_graph(kWidth, kHeight, std::move(w));
}

}  // namespace example1

}  // namespace covctl::testing
