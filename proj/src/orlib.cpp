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
#include <fstream>
#include <map>
#include <sstream>

#include "covctl/env_graph.hpp"
#include "covctl/errors.hpp"
#include "covctl/rng.hpp"

namespace covctl {
namespace {

std::vector<long long> read_ints(const std::string& line, int line_no, std::size_t expected) {
  std::istringstream in(line);
  std::vector<long long> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(token, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != token.size()) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": '" + token + "' is not an integer");
    }
    values.push_back(v);
  }
  if (values.size() != expected) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": expected " +
                                            std::to_string(expected) + " integers, got " +
                                            std::to_string(values.size()));
  }
  return values;
}

}  // namespace

EnvGraph parse_orlib(std::istream& in, const OrlibOptions& options) {
  if (!(options.cost_scale > 0.0)) throw Error(ErrorCode::kInvalidParams, "cost_scale must be positive");
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw Error(ErrorCode::kParseError, "empty input");
  const auto header = read_ints(line, line_no, 3);
  const long long m = header[0], e = header[1], p = header[2];
  if (m <= 0 || e < 0 || p < 0) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": bad header");
  }

  // Later lines override earlier ones for the same pair, as the p-median
  // instances list some edges twice.
  std::map<Edge, long long> cost;
  for (long long k = 0; k < e; ++k) {
    if (!next_line()) {
      throw Error(ErrorCode::kParseError, "expected " + std::to_string(e) + " edge lines, got " +
                                              std::to_string(k));
    }
    const auto v = read_ints(line, line_no, 3);
    if (v[0] < 1 || v[0] > m || v[1] < 1 || v[1] > m || v[0] == v[1] || v[2] < 0) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": invalid edge");
    }
    const int a = static_cast<int>(std::min(v[0], v[1]) - 1);
    const int b = static_cast<int>(std::max(v[0], v[1]) - 1);
    cost[{a, b}] = v[2];
  }

  int node_count = static_cast<int>(m);
  std::vector<Edge> edges;
  for (const auto& [pair, c] : cost) {
    const long long hops = std::max(1LL, std::llround(static_cast<double>(c) * options.cost_scale));
    int prev = pair.first;
    for (long long h = 1; h < hops; ++h) {
      edges.emplace_back(prev, node_count);
      prev = node_count++;
    }
    edges.emplace_back(prev, pair.second);
  }

  std::vector<double> weights(static_cast<std::size_t>(node_count), options.eps);
  if (options.n_valued < 0) {
    for (int c = 0; c < m; ++c) weights[c] = 1.0;
  } else {
    if (options.n_valued > m) throw Error(ErrorCode::kInvalidParams, "more valued nodes than vertices");
    Rng rng(options.seed);
    for (int c : rng.sample(static_cast<int>(m), options.n_valued)) weights[c] = 1.0;
  }
  EnvGraph env = EnvGraph::build(node_count, edges, std::move(weights));
  env.set_meta({{"generator", "orlib"},
                {"seed", options.seed},
                {"params", {{"vertices", m}, {"edges", e}, {"p", p},
                            {"cost_scale", options.cost_scale}, {"valued", options.n_valued},
                            {"eps", options.eps}}}});
  return env;
}

EnvGraph load_orlib(const std::string& path, const OrlibOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  EnvGraph env = parse_orlib(in, options);
  auto meta = env.meta();
  meta["params"]["path"] = path;
  env.set_meta(std::move(meta));
  return env;
}

}  // namespace covctl
