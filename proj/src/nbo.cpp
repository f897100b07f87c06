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

#include "covctl/nbo.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include "covctl/errors.hpp"

namespace covctl {
namespace {

Block merge_blocks(const Block& a, const Block& b) {
  Block out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool touches(const EnvGraph& env, const Block& block, const std::vector<int>& owner, int agent) {
  for (NodeId c : block) {
    for (NodeId v : env.neighbors(c)) {
      if (owner[v] == agent) return true;
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(StateClass cls) {
  switch (cls) {
    case StateClass::kZ1: return "Z1";
    case StateClass::kZ2: return "Z2";
    case StateClass::kZ3: return "Z3";
    case StateClass::kZ4: return "Z4";
  }
  return "?";
}

std::vector<std::pair<int, int>> CommTree::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < static_cast<int>(parent.size()); ++a) {
    if (parent[a] >= 0) out.emplace_back(a, parent[a]);
  }
  return out;
}

nlohmann::json to_json(const TraceRecord& r) {
  nlohmann::json selected = nlohmann::json::array();
  if (r.i >= 0) selected.push_back(r.i);
  if (r.j >= 0) selected.push_back(r.j);
  return {{"t", r.t},
          {"class", std::string(to_string(r.cls))},
          {"phi", r.phi},
          {"G", r.G},
          {"u_min", r.u_min},
          {"V", r.V},
          {"selected", selected},
          {"step", r.step == 'a' ? "a" : r.step == 'b' ? "b" : "none"},
          {"messages_total", r.messages_total}};
}

NboSolver::NboSolver(const CoverageContext& ctx, NboConfig config, Allocation initial)
    : ctx_(ctx), config_(std::move(config)), x_(std::move(initial)), rng_(config_.seed) {
  if (x_.empty()) throw Error(ErrorCode::kEmptyAllocation, "NBO needs at least one agent");
  check_allocation(*ctx_.env, x_);
  const int n = agent_count();
  partition_ = voronoi(*ctx_.env, x_);
  version_.resize(n);
  for (int a = 0; a < n; ++a) version_[a] = next_version_++;
  utility_version_.assign(n, 0);
  m1_version_.assign(n, 0);
  utility_cache_.assign(n, 0.0);
  m1_cache_.assign(n, 0.0);
  done_.assign(n, 0);

  if (config_.iteration_cap) {
    cap_ = *config_.iteration_cap;
  } else {
    const DecayFunction& g = *ctx_.decay;
    double phi_upper = 0.0;
    for (double v : ctx_.env->weights()) phi_upper += v * g(0);
    const double eps_conv = config_.eps_weight * g(ctx_.oracle->diameter());
    const double phi0 = potential();
    const double span = std::max(phi_upper - phi0, 0.0);
    const double bound = n * span / eps_conv + 2.0 * n + 2.0;
    cap_ = bound > 1e12 ? static_cast<std::int64_t>(1e12) : static_cast<std::int64_t>(std::ceil(bound));
  }
}

void NboSolver::set_block(int agent, NodeId position, Block block) {
  if (x_[agent] == position && partition_.blocks[agent] == block) return;
  x_[agent] = position;
  partition_.blocks[agent] = std::move(block);
  version_[agent] = next_version_++;
}

double NboSolver::utility_of(int agent) {
  if (utility_version_[agent] != version_[agent]) {
    utility_cache_[agent] = utility(ctx_, x_[agent], partition_.blocks[agent]);
    utility_version_[agent] = version_[agent];
  }
  return utility_cache_[agent];
}

double NboSolver::m1_of(int agent) {
  if (m1_version_[agent] != version_[agent]) {
    const Block& block = partition_.blocks[agent];
    const NodeId fixed[] = {x_[agent]};
    m1_cache_[agent] = block.size() < 2 ? 0.0 : best_placement(ctx_, fixed, block, 1).gain;
    m1_version_[agent] = version_[agent];
  }
  return m1_cache_[agent];
}

const PairStats& NboSolver::pair_stats(int i, int j) {
  if (i > j) std::swap(i, j);
  const auto key = std::make_tuple(i, j, version_[i], version_[j]);
  if (auto it = pair_cache_.find(key); it != pair_cache_.end()) return it->second;

  const int n = agent_count();
  if (pair_cache_.size() > static_cast<std::size_t>(16 * n + 256)) {
    for (auto it = pair_cache_.begin(); it != pair_cache_.end();) {
      const auto& [a, b, va, vb] = it->first;
      if (version_[a] != va || version_[b] != vb) {
        it = pair_cache_.erase(it);
      } else {
        ++it;
      }
    }
  }

  const Block region = merge_blocks(partition_.blocks[i], partition_.blocks[j]);
  const RegionMetric metric(ctx_, region);
  PairStats stats;
  stats.region_size = region.size();
  Placement two = best_placement(ctx_, metric, {}, 2);
  stats.m2 = two.gain;
  stats.b2 = std::move(two.nodes);
  if (region.size() >= 3) {
    Placement three = best_placement(ctx_, metric, {}, 3);
    stats.m3 = three.gain;
    stats.b3 = std::move(three.nodes);
    stats.has_m3 = true;
  } else {
    stats.m3 = stats.m2;
  }
  return pair_cache_.emplace(key, std::move(stats)).first->second;
}

CommTree NboSolver::build_comm_tree() {
  const int n = agent_count();
  int root = 0;
  double u_min = utility_of(0);
  for (int a = 1; a < n; ++a) {
    const double u = utility_of(a);
    if (u < u_min - config_.tol) {
      u_min = u;
      root = a;
    }
  }
  const AgentAdjacency adjacency = agent_adjacency(*ctx_.env, partition_);
  CommTree tree;
  tree.root = root;
  tree.parent.assign(n, -1);
  tree.children.assign(n, {});
  for (const auto& row : adjacency) tree.messages += static_cast<std::int64_t>(row.size());
  tree.messages /= 2;

  std::vector<char> seen(n, 0);
  std::deque<int> queue{root};
  seen[root] = 1;
  int reached = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        tree.parent[v] = u;
        tree.children[u].push_back(v);
        queue.push_back(v);
      }
    }
  }
  if (reached != n) {
    throw Error(ErrorCode::kDisconnectedAdjacency,
                "agent adjacency reaches " + std::to_string(reached) + " of " + std::to_string(n) + " agents");
  }
  return tree;
}

GlobalInfo NboSolver::global_info(const CommTree* tree) {
  const int n = agent_count();
  GlobalInfo info;
  info.u_min = utility_of(0);
  info.i_min = 0;
  info.V = m1_of(0);
  for (int a = 1; a < n; ++a) {
    const double u = utility_of(a);
    if (u < info.u_min - config_.tol) {
      info.u_min = u;
      info.i_min = a;
    }
    info.V = std::max(info.V, m1_of(a));
  }
  // Ties on V go to the agent nearest the root, then to the lowest id, so a
  // vacated block keeps travelling toward the minimum-utility agent.
  std::vector<int> depth(static_cast<std::size_t>(n), 0);
  if (tree != nullptr) {
    for (int a = 0; a < n; ++a) {
      for (int k = a; tree->parent[k] >= 0; k = tree->parent[k]) ++depth[a];
    }
  }
  info.i_max_plus = -1;
  for (int a = 0; a < n; ++a) {
    if (m1_of(a) < info.V - config_.tol) continue;
    if (info.i_max_plus < 0 || depth[a] < depth[info.i_max_plus]) info.i_max_plus = a;
  }
  info.x_imin = x_[info.i_min];
  info.message_count_delta = 2 * static_cast<std::int64_t>(n - 1);
  return info;
}

std::vector<std::pair<int, int>> NboSolver::scope_pairs(const CommTree& tree, EdgeScope scope) const {
  return scope == EdgeScope::kTree ? tree.edges()
                                   : adjacency_edges(agent_adjacency(*ctx_.env, partition_));
}

StateClass NboSolver::classify(const CommTree& tree, const GlobalInfo& info) {
  if (agent_count() >= 2 && info.V > info.u_min + config_.tol) return StateClass::kZ1;
  const auto pairs = scope_pairs(tree, config_.edge_scope);
  bool z3 = true, z4 = true;
  for (auto [i, j] : pairs) {
    const PairStats& ps = pair_stats(i, j);
    if (ps.m3 - ps.m2 > info.u_min + config_.tol) z3 = false;
    if (std::abs(utility_of(i) + utility_of(j) - ps.m2) > config_.tol) z4 = false;
  }
  if (!z3) return StateClass::kZ2;
  if (!z4) return StateClass::kZ3;
  return StateClass::kZ4;
}

std::pair<int, int> NboSolver::select_agent(const CommTree& tree, const GlobalInfo& info,
                                            StateClass cls) {
  const int n = agent_count();
  int i = 0;
  if (cls == StateClass::kZ1) {
    i = info.i_max_plus;
  } else if (config_.pick == PickMode::kProbabilistic) {
    i = static_cast<int>(rng_.below(static_cast<std::uint64_t>(n)));
  } else {
    auto it = std::find(done_.begin(), done_.end(), 0);
    if (it == done_.end()) {
      std::fill(done_.begin(), done_.end(), 0);
      it = done_.begin();
    }
    i = static_cast<int>(it - done_.begin());
    done_[i] = 1;
  }
  int j = tree.parent[i];
  if (j < 0 && !tree.children[i].empty()) j = tree.children[i].front();
  if (cls != StateClass::kZ1 && config_.edge_scope == EdgeScope::kAdjacency) {
    // First neighbour, by id, whose pair still fails a Z-test.
    const AgentAdjacency adjacency = agent_adjacency(*ctx_.env, partition_);
    for (int k : adjacency[i]) {
      const PairStats& ps = pair_stats(i, k);
      if (ps.m3 - ps.m2 > info.u_min + config_.tol ||
          std::abs(utility_of(i) + utility_of(k) - ps.m2) > config_.tol) {
        j = k;
        break;
      }
    }
  }
  return {i, j};
}

bool NboSolver::step_condition_a(int i, int j, const GlobalInfo& info) {
  if (info.i_min == i || info.i_min == j) return true;
  const PairStats& ps = pair_stats(i, j);
  return ps.m3 - ps.m2 <= info.u_min + config_.tol;
}

void NboSolver::step_a(int i, int j) {
  const EnvGraph& env = *ctx_.env;
  const int n = agent_count();
  if (i == j || i < 0 || j < 0 || i >= n || j >= n ||
      !touches(env, partition_.blocks[i], partition_.owner_map(env.node_count()), j)) {
    throw Error(ErrorCode::kPreconditionViolated, "step a needs two neighbouring agents");
  }
  const PairStats ps = pair_stats(i, j);
  // Already jointly optimal: keep the current placement.
  if (utility_of(i) + utility_of(j) >= ps.m2 - config_.tol) return;

  const Block region = merge_blocks(partition_.blocks[i], partition_.blocks[j]);
  const DistanceOracle& dist = *ctx_.oracle;
  NodeId p = ps.b2[0], q = ps.b2[1];
  const int keep = dist(x_[i], p) + dist(x_[j], q);
  const int swap = dist(x_[i], q) + dist(x_[j], p);
  if (swap < keep) std::swap(p, q);

  Allocation moved = x_;
  moved[i] = p;
  moved[j] = q;
  const int subset[] = {i, j};
  std::vector<Block> blocks = voronoi(env, moved, region, subset);
  set_block(i, p, std::move(blocks[0]));
  set_block(j, q, std::move(blocks[1]));
}

int NboSolver::step_b(int i, int j, const CommTree& tree, const GlobalInfo& info) {
  (void)tree;
  const EnvGraph& env = *ctx_.env;
  const DistanceOracle& dist = *ctx_.oracle;
  if (info.i_min == i || info.i_min == j) {
    throw Error(ErrorCode::kPreconditionViolated, "step b with the minimum-utility agent in the pair");
  }
  const PairStats ps = pair_stats(i, j);
  if (!ps.has_m3 || ps.m3 - ps.m2 <= info.u_min + config_.tol) {
    throw Error(ErrorCode::kPreconditionViolated, "pair region cannot host a third agent");
  }
  const Block region = merge_blocks(partition_.blocks[i], partition_.blocks[j]);
  const std::vector<NodeId>& b3 = ps.b3;
  const int three[] = {0, 1, 2};
  const std::vector<Block> split = voronoi(env, b3, region, three);

  // Proxy for i_min among the agents bordering the pair.
  const AgentAdjacency adjacency = agent_adjacency(env, partition_);
  int proxy = -1;
  for (int k : adjacency[i]) {
    if (k == j) continue;
    if (proxy < 0 || dist(x_[k], info.x_imin) < dist(x_[proxy], info.x_imin) ||
        (dist(x_[k], info.x_imin) == dist(x_[proxy], info.x_imin) && k < proxy)) {
      proxy = k;
    }
  }
  for (int k : adjacency[j]) {
    if (k == i) continue;
    if (proxy < 0 || dist(x_[k], info.x_imin) < dist(x_[proxy], info.x_imin) ||
        (dist(x_[k], info.x_imin) == dist(x_[proxy], info.x_imin) && k < proxy)) {
      proxy = k;
    }
  }
  if (proxy < 0) throw Error(ErrorCode::kPreconditionViolated, "pair has no outside neighbour");

  const std::vector<int> owner = partition_.owner_map(env.node_count());
  auto pick_nearest = [&](bool require_adjacent) {
    int best = -1;
    for (int k = 0; k < 3; ++k) {
      if (require_adjacent && !touches(env, split[k], owner, proxy)) continue;
      if (best < 0 || dist(b3[k], x_[proxy]) < dist(b3[best], x_[proxy])) best = k;
    }
    return best;
  };
  int l = pick_nearest(true);
  if (l < 0) l = pick_nearest(false);

  int p = -1, q = -1;
  for (int k = 0; k < 3; ++k) {
    if (k == l) continue;
    (p < 0 ? p : q) = k;
  }
  const int keep = dist(x_[i], b3[p]) + dist(x_[j], b3[q]);
  const int swap = dist(x_[i], b3[q]) + dist(x_[j], b3[p]);
  if (swap < keep || (swap == keep && b3[q] < b3[p])) std::swap(p, q);

  // The vacated block joins whichever of i, j borders it with the nearer
  // position.
  std::vector<int> split_owner(static_cast<std::size_t>(env.node_count()), -1);
  for (NodeId c : split[p]) split_owner[c] = i;
  for (NodeId c : split[q]) split_owner[c] = j;
  int absorber = -1;
  for (int k : {i, j}) {
    if (!touches(env, split[l], split_owner, k)) continue;
    const NodeId xk = k == i ? b3[p] : b3[q];
    if (absorber < 0) {
      absorber = k;
      continue;
    }
    const NodeId xa = absorber == i ? b3[p] : b3[q];
    if (dist(xk, b3[l]) < dist(xa, b3[l]) || (dist(xk, b3[l]) == dist(xa, b3[l]) && k < absorber)) {
      absorber = k;
    }
  }
  if (absorber < 0) breach("vacated block borders neither agent of the pair");

  Block block_i = split[p], block_j = split[q];
  (absorber == i ? block_i : block_j) = merge_blocks(absorber == i ? block_i : block_j, split[l]);
  set_block(i, b3[p], std::move(block_i));
  set_block(j, b3[q], std::move(block_j));
  return absorber;
}

double NboSolver::potential() {
  const int n = agent_count();
  double sum = 0.0, u_min = std::numeric_limits<double>::infinity(), V = 0.0;
  for (int a = 0; a < n; ++a) {
    const double u = utility_of(a);
    sum += u;
    u_min = std::min(u_min, u);
    V = std::max(V, m1_of(a));
  }
  return sum + std::max(0.0, V - u_min);
}

double NboSolver::objective_value() const { return objective(ctx_, x_); }

Certificate NboSolver::certificate(EdgeScope scope) {
  Certificate cert;
  const CommTree tree = build_comm_tree();
  const GlobalInfo info = global_info(&tree);
  const auto pairs = scope_pairs(tree, scope);
  cert.m1_gap = info.V - info.u_min;
  cert.third_gap = -std::numeric_limits<double>::infinity();
  for (auto [i, j] : pairs) {
    const PairStats& ps = pair_stats(i, j);
    cert.pair_residual = std::max(cert.pair_residual, std::abs(utility_of(i) + utility_of(j) - ps.m2));
    cert.third_gap = std::max(cert.third_gap, ps.m3 - ps.m2 - info.u_min);
  }
  if (pairs.empty()) cert.third_gap = 0.0;
  cert.edges_checked = pairs.size();
  return cert;
}

nlohmann::json NboSolver::dump_state() const {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : partition_.blocks) blocks.push_back(b);
  nlohmann::json recent = nlohmann::json::array();
  const std::size_t from = trace_.size() > 10 ? trace_.size() - 10 : 0;
  for (std::size_t k = from; k < trace_.size(); ++k) recent.push_back(to_json(trace_[k]));
  return {{"iteration", iteration_}, {"positions", x_}, {"blocks", blocks},
          {"messages", messages_}, {"recent_trace", recent}};
}

void NboSolver::breach(const std::string& what) {
  std::string message = what + " at iteration " + std::to_string(iteration_);
  if (!config_.dump_path.empty()) {
    std::ofstream out(config_.dump_path);
    out << dump_state().dump(2) << '\n';
    message += "; state dumped to " + config_.dump_path;
  }
  throw Error(ErrorCode::kInvariantViolation, message);
}

void NboSolver::run() {
  const EnvGraph& env = *ctx_.env;
  std::vector<NodeId> all(static_cast<std::size_t>(env.node_count()));
  for (NodeId c = 0; c < env.node_count(); ++c) all[c] = c;

  const int n = agent_count();
  double phi_prev = -std::numeric_limits<double>::infinity();
  std::int64_t idle = 0;
  std::vector<int> picks_while_idle(static_cast<std::size_t>(n), 0);

  if (n == 1) {
    // A lone agent has no pair to work with; it takes the best single spot.
    const double phi = potential();
    CoverageContext global = ctx_;
    global.metric = Metric::kGlobal;
    const Placement best = best_placement(global, {}, all, 1);
    TraceRecord r;
    r.t = iteration_;
    r.cls = StateClass::kZ1;
    r.phi = phi;
    r.G = objective_value();
    r.u_min = utility_of(0);
    r.V = m1_of(0);
    r.i = 0;
    r.messages_delta = static_cast<std::int64_t>(all.size());
    messages_ += r.messages_delta;
    r.messages_total = messages_;
    r.pair_region = all.size();
    trace_.push_back(r);
    set_block(0, best.nodes[0], all);
    ++iteration_;
    phi_prev = phi;
  }

  for (;;) {
    if (iteration_ >= cap_) {
      throw Error(ErrorCode::kIterationCapExceeded,
                  "no neighborhood optimum after " + std::to_string(cap_) + " iterations");
    }
    TraceRecord r;
    r.t = iteration_;
    const CommTree tree = build_comm_tree();
    const GlobalInfo info = global_info(&tree);
    r.messages_delta = tree.messages + info.message_count_delta;
    r.cls = classify(tree, info);
    r.phi = potential();
    r.G = objective_value();
    r.u_min = info.u_min;
    r.V = info.V;
    if (config_.inject_breach_at && *config_.inject_breach_at == iteration_) {
      breach("potential dropped (injected test breach)");
    }
    if (r.phi < phi_prev - config_.tol) {
      breach("potential dropped from " + std::to_string(phi_prev) + " to " + std::to_string(r.phi));
    }
    phi_prev = r.phi;

    if (r.cls == StateClass::kZ4) {
      r.step = '-';
      messages_ += r.messages_delta;
      r.messages_total = messages_;
      trace_.push_back(r);
      final_class_ = r.cls;
      final_tree_ = tree;
      return;
    }

    const auto [i, j] = select_agent(tree, info, r.cls);
    r.i = i;
    r.j = j;
    r.pair_region = partition_.blocks[i].size() + partition_.blocks[j].size();
    r.messages_delta += static_cast<std::int64_t>(r.pair_region);
    const std::uint64_t before = next_version_;
    if (step_condition_a(i, j, info)) {
      r.step = 'a';
      step_a(i, j);
    } else {
      r.step = 'b';
      step_b(i, j, tree, info);
    }
    if (next_version_ == before) {
      ++idle;
      ++picks_while_idle[i];
    } else {
      idle = 0;
      std::fill(picks_while_idle.begin(), picks_while_idle.end(), 0);
    }

    if (config_.check_partition) {
      const std::string defect = partition_defect(env, x_, partition_, all);
      if (!defect.empty()) breach("partition invalid: " + defect);
    }
    messages_ += r.messages_delta;
    r.messages_total = messages_;
    trace_.push_back(r);
    ++iteration_;

    // Random picks are only stuck once every agent has had two idle turns.
    const bool random_pick = config_.pick == PickMode::kProbabilistic && r.cls != StateClass::kZ1;
    const bool stuck = random_pick
                           ? idle > 0 && *std::min_element(picks_while_idle.begin(), picks_while_idle.end()) >= 2
                           : idle > 2 * n + 2;
    if (stuck) {
      throw Error(ErrorCode::kIterationCapExceeded,
                  "no state change over " + std::to_string(idle) + " consecutive steps in " +
                      std::string(to_string(r.cls)));
    }
  }
}

NboResult run_nbo(const CoverageContext& ctx, const NboConfig& config, const Allocation& initial) {
  NboSolver solver(ctx, config, initial);
  solver.run();
  NboResult result;
  result.allocation = solver.allocation();
  result.partition = solver.partition();
  result.G = solver.objective_value();
  result.iterations = solver.iterations();
  result.messages = solver.messages();
  result.final_class = solver.final_class();
  result.certificate = solver.certificate(config.edge_scope);
  result.trace = solver.trace();
  return result;
}

}  // namespace covctl
