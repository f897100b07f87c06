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

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

#include "covctl/env_graph.hpp"
#include "covctl/rng.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace covctl;
using namespace covctl::testing;

namespace {

int valued_count(const EnvGraph& env) {
  return static_cast<int>(env.valued_nodes().size());
}

// Components of env after deleting `removed`, by plain BFS.
std::vector<int> component_sizes_without(const EnvGraph& env, const std::set<int>& removed) {
  std::vector<int> sizes;
  std::vector<char> seen(env.node_count(), 0);
  for (int s = 0; s < env.node_count(); ++s) {
    if (seen[s] || removed.count(s)) continue;
    int size = 0;
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      ++size;
      for (int v : env.neighbors(u)) {
        if (!seen[v] && !removed.count(v)) {
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    sizes.push_back(size);
  }
  return sizes;
}

void check_generator_contract(const EnvGraph& env, int requested_valued, double eps) {
  CHECK(component_sizes_without(env, {}).size() == 1);
  for (int c = 0; c < env.node_count(); ++c) {
    const double w = env.weight(c);
    CHECK((w == 1.0 || w == eps));
  }
  if (requested_valued >= 0) CHECK(valued_count(env) == requested_valued);
}

void check_oracle_against_reference(const EnvGraph& env, std::uint64_t seed) {
  const DistanceOracle oracle(env);
  const auto d = floyd_warshall(env);
  Rng rng(seed);
  int diameter = 0;
  for (int a = 0; a < env.node_count(); ++a) {
    for (int b = 0; b < env.node_count(); ++b) diameter = std::max(diameter, d[a][b]);
  }
  CHECK(oracle.diameter() == diameter);
  for (int k = 0; k < 100; ++k) {
    const int a = static_cast<int>(rng.below(env.node_count()));
    const int b = static_cast<int>(rng.below(env.node_count()));
    CHECK(oracle(a, b) == d[a][b]);
  }
}

}  // namespace

TEST_CASE("build accepts a minimal path and rejects malformed graphs") {
  const std::vector<Edge> path{{0, 1}, {1, 2}};
  const EnvGraph env = EnvGraph::build(3, path, {1, 1, 1});
  CHECK(env.node_count() == 3);
  CHECK(env.edge_count() == 2);
  CHECK(valued_count(env) == 3);

  CHECK(error_code_of([] { EnvGraph::build(2, {}, {1, 1}); }) == ErrorCode::kDisconnectedGraph);
  CHECK(error_code_of([] {
          const std::vector<Edge> e{{0, 3}};
          EnvGraph::build(2, e, {1, 1});
        }) == ErrorCode::kInvalidEdge);
  CHECK(error_code_of([] {
          const std::vector<Edge> e{{0, 1}, {1, 1}};
          EnvGraph::build(2, e, {1, 1});
        }) == ErrorCode::kInvalidEdge);
  CHECK(error_code_of([] {
          const std::vector<Edge> e{{0, 1}, {1, 0}};
          EnvGraph::build(2, e, {1, 1});
        }) == ErrorCode::kInvalidEdge);
  CHECK(error_code_of([] {
          const std::vector<Edge> e{{0, 1}};
          EnvGraph::build(2, e, {1, -0.5});
        }) == ErrorCode::kNegativeWeight);
}

TEST_CASE("worked-example grid") {
  const EnvGraph env = example1::graph();
  CHECK(env.node_count() == 54);
  // 27 circled nodes plus the 6 agent nodes; see the decisions ledger on 33 vs 34.
  CHECK(valued_count(env) == 33);
  const DistanceOracle oracle(env);
  using example1::id;
  CHECK(oracle(id(7, 2), id(8, 4)) == 3);
  CHECK(oracle(id(0, 0), id(8, 5)) == 13);
  CHECK(oracle.diameter() == 13);
}

TEST_CASE("distance oracle on a path") {
  const EnvGraph env = path_graph(3);
  const DistanceOracle oracle(env);
  CHECK(oracle(0, 2) == 2);
  CHECK(oracle(2, 0) == 2);
  CHECK(oracle(1, 1) == 0);
  CHECK(oracle.diameter() == 2);
}

TEST_CASE("distance oracle matches Floyd-Warshall on a random maze, all pairs") {
  const EnvGraph env = gen_random_maze(1, 10, 5);
  const DistanceOracle oracle(env);
  const auto d = floyd_warshall(env);
  for (int a = 0; a < env.node_count(); ++a) {
    for (int b = 0; b < env.node_count(); ++b) {
      REQUIRE(oracle(a, b) == d[a][b]);
      REQUIRE(oracle(a, b) == oracle(b, a));
    }
  }
}

TEST_CASE("chain generator") {
  const EnvGraph env = gen_chain(20, 10, 0);
  CHECK(env.node_count() == 20);
  CHECK(env.edge_count() == 19);
  CHECK(valued_count(env) == 10);
  check_generator_contract(env, 10, kDefaultEpsWeight);

  const EnvGraph full = gen_chain(12, 12, 99);
  for (int c = 0; c < 12; ++c) CHECK(full.weight(c) == 1.0);

  const EnvGraph empty = gen_chain(5, 0, 3);
  for (int c = 0; c < 5; ++c) CHECK(empty.weight(c) == kDefaultEpsWeight);

  CHECK(gen_chain(20, 10, 7).weights() == gen_chain(20, 10, 7).weights());
  CHECK(gen_chain(20, 10, 7).weights() != gen_chain(20, 10, 8).weights());
  CHECK(error_code_of([] { gen_chain(5, 6, 0); }) == ErrorCode::kInvalidParams);
}

TEST_CASE("star and tree generators") {
  const EnvGraph star = gen_star(4, 3, 4, 1);
  CHECK(star.node_count() == 13);
  CHECK(star.neighbors(0).size() == 4);
  check_generator_contract(star, 4, kDefaultEpsWeight);

  const EnvGraph tree = gen_tree(30, 10, 2);
  CHECK(tree.node_count() == 30);
  CHECK(tree.edge_count() == 29);
  check_generator_contract(tree, 10, kDefaultEpsWeight);
  CHECK(error_code_of([] { gen_star(0, 3, 0, 0); }) == ErrorCode::kInvalidParams);
}

TEST_CASE("maze template sizes and generator") {
  CHECK(maze_template(1).side == 5);
  CHECK(maze_template(1).tail == 6);
  CHECK(maze_template(2).side == 8);
  CHECK(maze_template(2).tail == 8);
  CHECK(error_code_of([] { gen_random_maze(3, 1, 0); }) == ErrorCode::kInvalidParams);
  for (int w : {1, 2}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const EnvGraph env = gen_random_maze(w, 5, seed);
      check_generator_contract(env, 5, kDefaultEpsWeight);
      CHECK(env.node_count() == static_cast<int>(std::lround(0.8 * maze_template(w).node_count)));
    }
  }
  const EnvGraph small = gen_random_maze(1, 4, 3, kDefaultEpsWeight, 18);
  CHECK(small.node_count() == 18);
}

TEST_CASE("bridge layout: one cut-vertex path joining two wide regions") {
  const EnvGraph env = gen_bridge();
  check_generator_contract(env, env.node_count(), kDefaultEpsWeight);
  const auto cut = articulation_points(env);
  REQUIRE(!cut.empty());
  const std::set<int> cut_set(cut.begin(), cut.end());
  // The cut vertices form a simple path.
  int ends = 0;
  for (int c : cut) {
    int inside = 0;
    for (int v : env.neighbors(c)) inside += cut_set.count(v) ? 1 : 0;
    CHECK(inside <= 2);
    ends += inside == 1 ? 1 : 0;
  }
  CHECK(ends == 2);
  auto sizes = component_sizes_without(env, cut_set);
  REQUIRE(sizes.size() == 2);
  // Each side holds a node of degree 4, so it is at least two nodes wide.
  for (int side = 0; side < 2; ++side) CHECK(sizes[side] >= 4);
  int degree4 = 0;
  for (int c = 0; c < env.node_count(); ++c) degree4 += env.neighbors(c).size() == 4 ? 1 : 0;
  CHECK(degree4 >= 2);
}

TEST_CASE("indoor layout and lattice") {
  const EnvGraph indoor = gen_indoor();
  check_generator_contract(indoor, indoor.node_count(), kDefaultEpsWeight);
  CHECK(articulation_points(indoor).size() >= 2);

  const EnvGraph lattice = gen_lattice3d({5, 5, 3}, 18, 4);
  CHECK(lattice.node_count() == 75);
  check_generator_contract(lattice, 18, kDefaultEpsWeight);
  std::size_t max_degree = 0;
  for (int c = 0; c < lattice.node_count(); ++c) max_degree = std::max(max_degree, lattice.neighbors(c).size());
  CHECK(max_degree == 6);
  CHECK(lattice.edge_count() == static_cast<std::size_t>(4 * 5 * 3 * 2 + 5 * 5 * 2));
}

TEST_CASE("every generator honours the contract and the oracle agrees with Floyd-Warshall") {
  std::uint64_t s = 100;
  check_oracle_against_reference(gen_chain(20, 10, s), s);
  check_oracle_against_reference(gen_star(4, 8, 16, s), s);
  check_oracle_against_reference(gen_tree(40, 20, s), s);
  check_oracle_against_reference(gen_random_maze(1, 11, s), s);
  check_oracle_against_reference(gen_random_maze(2, 30, s), s);
  check_oracle_against_reference(gen_lattice3d({5, 5, 3}, 38, s), s);
  check_oracle_against_reference(gen_bridge(27, s), s);
  check_oracle_against_reference(gen_indoor(60, s), s);
  check_generator_contract(gen_bridge(27, s, 0.01), 27, 0.01);
  check_generator_contract(gen_indoor(60, s), 60, kDefaultEpsWeight);
  check_generator_contract(gen_lattice3d({3, 4, 2}, 0, s), 0, kDefaultEpsWeight);
}

TEST_CASE("orlib parser") {
  // 100 vertices, 200 unit-cost edges: a spanning path plus random chords.
  std::ostringstream text;
  text << "100 200 5\n";
  std::set<std::pair<int, int>> edges;
  for (int v = 1; v < 100; ++v) edges.insert({v, v + 1});
  Rng rng(11);
  while (edges.size() < 200) {
    int a = 1 + static_cast<int>(rng.below(100));
    int b = 1 + static_cast<int>(rng.below(100));
    if (a == b) continue;
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  for (const auto& [a, b] : edges) text << a << ' ' << b << " 1\n";
  std::istringstream in(text.str());
  const EnvGraph env = parse_orlib(in);
  CHECK(env.node_count() == 100);
  CHECK(env.edge_count() == 200);
  CHECK(valued_count(env) == 100);

  std::istringstream bad("3 2 1\n1 2 1\n1 x 3\n");
  try {
    parse_orlib(bad);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  // A cost-3 edge becomes a chain with two eps-weight interior nodes.
  std::istringstream chain("2 1 1\n1 2 3\n");
  OrlibOptions options;
  options.eps = 0.01;
  const EnvGraph expanded = parse_orlib(chain, options);
  CHECK(expanded.node_count() == 4);
  CHECK(DistanceOracle(expanded)(0, 1) == 3);
  CHECK(valued_count(expanded) == 2);
  CHECK(expanded.weight(2) == 0.01);

  std::istringstream split("3 1 1\n1 2 1\n");
  CHECK(error_code_of([&] { parse_orlib(split); }) == ErrorCode::kDisconnectedGraph);
}

TEST_CASE("synthetic p-median instances load connected") {
  for (const char* name : {"synth1.txt", "synth2.txt"}) {
    const EnvGraph env = load_orlib(std::string(COVCTL_DATA_DIR) + "/orlib/" + name);
    CHECK(component_sizes_without(env, {}).size() == 1);
  }
  CHECK(error_code_of([] { load_orlib("/nonexistent/pmed1.txt"); }) == ErrorCode::kIoError);
}

TEST_CASE("decay functions") {
  const DecayFunction inv = DecayFunction::inverse_linear();
  CHECK(inv(0) == 1.0);
  CHECK(inv(1) == 0.5);
  CHECK(inv(3) == 0.25);
  const DecayFunction ex = DecayFunction::parse("exp:2");
  CHECK(ex(0) == 1.0);
  CHECK(ex(1) == doctest::Approx(std::exp(-2.0)));
  for (const auto& g : {inv, ex, DecayFunction::parse("inv1p")}) {
    for (int d = 0; d < 50; ++d) CHECK(g(d) >= g(d + 1));
  }
  CHECK(error_code_of([] { DecayFunction::parse("cubic"); }) == ErrorCode::kInvalidParams);
  CHECK(error_code_of([] { DecayFunction::parse("exp:-1"); }) == ErrorCode::kInvalidParams);
}

TEST_CASE("graph JSON round trip") {
  const EnvGraph env = gen_random_maze(2, 30, 9);
  const nlohmann::json doc = to_json(env);
  const EnvGraph back = graph_from_json(doc);
  CHECK(back.node_count() == env.node_count());
  CHECK(back.edges() == env.edges());
  CHECK(back.weights() == env.weights());
  CHECK(to_json(back) == doc);
  CHECK(doc["meta"]["generator"] == "maze");
  CHECK(doc["meta"]["seed"] == 9);
  CHECK(error_code_of([] { graph_from_json(nlohmann::json{{"nodes", 3}}); }) == ErrorCode::kParseError);
}
