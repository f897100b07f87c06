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
#include <map>
#include <sstream>
#include <string_view>

#include "covctl/env_graph.hpp"
#include "covctl/errors.hpp"
#include "covctl/rng.hpp"

namespace covctl {
namespace detail {
const std::map<std::string, std::string_view>& embedded_layouts();
}  // namespace detail

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidParams, what);
}

std::vector<double> draw_weights(int m, int n_valued, double eps, Rng& rng) {
  require(eps >= 0.0, "eps weight must be non-negative");
  if (n_valued < 0) return std::vector<double>(static_cast<std::size_t>(m), 1.0);
  require(n_valued <= m, "valued count " + std::to_string(n_valued) + " exceeds node count " +
                             std::to_string(m));
  std::vector<double> weights(static_cast<std::size_t>(m), eps);
  for (int c : rng.sample(m, n_valued)) weights[c] = 1.0;
  return weights;
}

EnvGraph finish(int m, const std::vector<Edge>& edges, std::vector<double> weights,
                std::vector<NodeLabel> labels, nlohmann::json meta) {
  EnvGraph env = EnvGraph::build(m, edges, std::move(weights));
  env.set_labels(std::move(labels));
  env.set_meta(std::move(meta));
  return env;
}

// Nodes on a grid given as a boolean mask; returns the node index per cell
// (-1 for holes) and the 4-neighbour edge list.
struct GridGraph {
  std::vector<int> index;
  std::vector<Edge> edges;
  std::vector<NodeLabel> labels;
  int count = 0;
};

GridGraph grid_from_mask(int width, int height, const std::vector<char>& mask) {
  GridGraph g;
  g.index.assign(mask.size(), -1);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (mask[y * width + x]) {
        g.index[y * width + x] = g.count++;
        g.labels.push_back({static_cast<double>(x), static_cast<double>(y), 0.0});
      }
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int a = g.index[y * width + x];
      if (a < 0) continue;
      if (x + 1 < width && g.index[y * width + x + 1] >= 0) g.edges.emplace_back(a, g.index[y * width + x + 1]);
      if (y + 1 < height && g.index[(y + 1) * width + x] >= 0) g.edges.emplace_back(a, g.index[(y + 1) * width + x]);
    }
  }
  return g;
}

bool mask_connected(int width, int height, const std::vector<char>& mask) {
  const GridGraph g = grid_from_mask(width, height, mask);
  if (g.count == 0) return false;
  std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(g.count));
  for (auto [a, b] : g.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return is_connected(g.count, adj);
}

}  // namespace

EnvGraph gen_chain(int length, int n_valued, std::uint64_t seed, double eps) {
  require(length >= 1, "chain length must be positive");
  require(n_valued >= 0, "valued count must be non-negative");
  Rng rng(seed);
  auto weights = draw_weights(length, n_valued, eps, rng);
  std::vector<Edge> edges;
  std::vector<NodeLabel> labels;
  for (int c = 0; c < length; ++c) {
    labels.push_back({static_cast<double>(c), 0.0, 0.0});
    if (c + 1 < length) edges.emplace_back(c, c + 1);
  }
  return finish(length, edges, std::move(weights), std::move(labels),
                {{"generator", "chain"}, {"seed", seed},
                 {"params", {{"m", length}, {"valued", n_valued}, {"eps", eps}}}});
}

EnvGraph gen_star(int branches, int branch_len, int n_valued, std::uint64_t seed, double eps) {
  require(branches >= 1 && branch_len >= 1, "star needs positive branch count and length");
  require(n_valued >= 0, "valued count must be non-negative");
  const int m = 1 + branches * branch_len;
  Rng rng(seed);
  auto weights = draw_weights(m, n_valued, eps, rng);
  std::vector<Edge> edges;
  std::vector<NodeLabel> labels{{0.0, 0.0, 0.0}};
  for (int b = 0; b < branches; ++b) {
    const double angle = 2.0 * M_PI * b / branches;
    for (int k = 0; k < branch_len; ++k) {
      const int node = 1 + b * branch_len + k;
      edges.emplace_back(k == 0 ? 0 : node - 1, node);
      labels.push_back({(k + 1) * std::cos(angle), (k + 1) * std::sin(angle), 0.0});
    }
  }
  return finish(m, edges, std::move(weights), std::move(labels),
                {{"generator", "star"}, {"seed", seed},
                 {"params", {{"branches", branches}, {"branch_len", branch_len},
                             {"valued", n_valued}, {"eps", eps}}}});
}

EnvGraph gen_tree(int m, int n_valued, std::uint64_t seed, double eps) {
  require(m >= 1, "tree needs at least one node");
  require(n_valued >= 0, "valued count must be non-negative");
  Rng rng(seed);
  std::vector<Edge> edges;
  if (m == 2) {
    edges.emplace_back(0, 1);
  } else if (m > 2) {
    std::vector<int> pruefer(static_cast<std::size_t>(m - 2));
    for (auto& p : pruefer) p = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    std::vector<int> degree(static_cast<std::size_t>(m), 1);
    for (int p : pruefer) ++degree[p];
    for (int p : pruefer) {
      const int leaf = static_cast<int>(std::find(degree.begin(), degree.end(), 1) - degree.begin());
      edges.emplace_back(leaf, p);
      --degree[leaf];
      --degree[p];
    }
    int u = -1;
    for (int c = 0; c < m; ++c) {
      if (degree[c] == 1) {
        if (u < 0) {
          u = c;
        } else {
          edges.emplace_back(u, c);
          break;
        }
      }
    }
  }
  auto weights = draw_weights(m, n_valued, eps, rng);
  return finish(m, edges, std::move(weights), {},
                {{"generator", "tree"}, {"seed", seed},
                 {"params", {{"m", m}, {"valued", n_valued}, {"eps", eps}}}});
}

MazeTemplate maze_template(int width_param) {
  require(width_param == 1 || width_param == 2, "maze corridor width must be 1 or 2");
  MazeTemplate t;
  t.side = 3 * (width_param + 1) - 1;
  t.tail = 2 * width_param + 4;
  t.node_count = t.side * t.side - 4 + t.tail * width_param;
  return t;
}

EnvGraph gen_random_maze(int width_param, int n_valued, std::uint64_t seed, double eps,
                         std::optional<int> target_nodes) {
  const MazeTemplate t = maze_template(width_param);
  require(n_valued >= 0, "valued count must be non-negative");
  const int w = width_param;
  const int width = t.side + t.tail;
  const int height = t.side;
  // Three corridors of width w per axis separated by single-cell walls; the
  // wall crossings are the only holes. The tail leaves from the first corridor.
  std::vector<char> mask(static_cast<std::size_t>(width * height), 0);
  auto is_wall = [w](int v) { return v == w || v == 2 * w + 1; };
  for (int y = 0; y < t.side; ++y) {
    for (int x = 0; x < t.side; ++x) mask[y * width + x] = !(is_wall(x) && is_wall(y));
  }
  for (int y = 0; y < w; ++y) {
    for (int x = t.side; x < width; ++x) mask[y * width + x] = 1;
  }

  const int target = target_nodes.value_or(static_cast<int>(std::lround(0.8 * t.node_count)));
  require(target >= 1 && target <= t.node_count,
          "maze target size must be within [1, " + std::to_string(t.node_count) + "]");

  Rng rng(seed);
  int count = t.node_count;
  bool progress = true;
  while (count > target && progress) {
    progress = false;
    std::vector<int> cells;
    for (int i = 0; i < width * height; ++i) {
      if (mask[i]) cells.push_back(i);
    }
    rng.shuffle(cells);
    for (int cell : cells) {
      if (count <= target) break;
      mask[cell] = 0;
      if (mask_connected(width, height, mask)) {
        --count;
        progress = true;
      } else {
        mask[cell] = 1;
      }
    }
  }
  require(count == target, "cannot shrink maze to " + std::to_string(target) + " nodes");

  GridGraph g = grid_from_mask(width, height, mask);
  auto weights = draw_weights(g.count, n_valued, eps, rng);
  return finish(g.count, g.edges, std::move(weights), std::move(g.labels),
                {{"generator", "maze"}, {"seed", seed},
                 {"params", {{"w", w}, {"valued", n_valued}, {"eps", eps},
                             {"target_nodes", target}, {"L", t.side}, {"S", t.tail}}}});
}

EnvGraph gen_lattice3d(std::array<int, 3> dims, int n_valued, std::uint64_t seed, double eps) {
  const auto [nx, ny, nz] = dims;
  require(nx >= 1 && ny >= 1 && nz >= 1, "lattice dimensions must be positive");
  require(n_valued >= 0, "valued count must be non-negative");
  const int m = nx * ny * nz;
  auto id = [&](int x, int y, int z) { return x + nx * (y + ny * z); };
  std::vector<Edge> edges;
  std::vector<NodeLabel> labels(static_cast<std::size_t>(m));
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        labels[id(x, y, z)] = {static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
        if (x + 1 < nx) edges.emplace_back(id(x, y, z), id(x + 1, y, z));
        if (y + 1 < ny) edges.emplace_back(id(x, y, z), id(x, y + 1, z));
        if (z + 1 < nz) edges.emplace_back(id(x, y, z), id(x, y, z + 1));
      }
    }
  }
  Rng rng(seed);
  auto weights = draw_weights(m, n_valued, eps, rng);
  return finish(m, edges, std::move(weights), std::move(labels),
                {{"generator", "lattice3d"}, {"seed", seed},
                 {"params", {{"dims", {nx, ny, nz}}, {"valued", n_valued}, {"eps", eps}}}});
}

std::vector<std::string> layout_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::embedded_layouts()) names.push_back(name);
  return names;
}

EnvGraph gen_layout(const std::string& name, int n_valued, std::uint64_t seed, double eps) {
  const auto& layouts = detail::embedded_layouts();
  const auto it = layouts.find(name);
  require(it != layouts.end(), "unknown layout '" + name + "'");

  std::vector<std::string> rows;
  std::istringstream in{std::string(it->second)};
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == ';') continue;
    rows.push_back(line);
  }
  const int height = static_cast<int>(rows.size());
  int width = 0;
  for (const auto& r : rows) width = std::max(width, static_cast<int>(r.size()));
  std::vector<char> mask(static_cast<std::size_t>(width * height), 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < static_cast<int>(rows[y].size()); ++x) mask[y * width + x] = rows[y][x] == '.';
  }
  GridGraph g = grid_from_mask(width, height, mask);
  Rng rng(seed);
  auto weights = draw_weights(g.count, n_valued, eps, rng);
  return finish(g.count, g.edges, std::move(weights), std::move(g.labels),
                {{"generator", name}, {"seed", seed},
                 {"params", {{"layout", name + ".v1"}, {"valued", n_valued}, {"eps", eps}}}});
}

EnvGraph gen_bridge(int n_valued, std::uint64_t seed, double eps) {
  return gen_layout("bridge", n_valued, seed, eps);
}

EnvGraph gen_indoor(int n_valued, std::uint64_t seed, double eps) {
  return gen_layout("indoor", n_valued, seed, eps);
}

}  // namespace covctl
