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

#include "covctl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "covctl/errors.hpp"
#include "covctl/rng.hpp"

namespace covctl {
namespace {

constexpr std::uint64_t kStartStream = 0x5354415254ULL;  // "START"

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfigError, what); }

const nlohmann::json& require_key(const nlohmann::json& obj, const std::string& key,
                                  const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) config_error(where + ": missing '" + key + "'");
  return obj.at(key);
}

template <class T>
T get_as(const nlohmann::json& value, const std::string& what) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    config_error("'" + what + "' has the wrong type");
  }
}

int param_int(const ShapeSpec& spec, const std::string& key) {
  return get_as<int>(require_key(spec.params, key, spec.shape), key);
}

int param_int_or(const ShapeSpec& spec, const std::string& key, int fallback) {
  if (!spec.params.contains(key) || spec.params.at(key).is_null()) return fallback;
  return get_as<int>(spec.params.at(key), key);
}

void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) config_error(where + ": unknown key '" + key + "'");
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string_view to_string(PickMode mode) {
  return mode == PickMode::kRoundRobin ? "round_robin" : "probabilistic";
}

std::string_view to_string(EdgeScope scope) {
  return scope == EdgeScope::kTree ? "tree" : "adjacency";
}

nlohmann::json certificate_json(const Certificate& c) {
  return {{"pair_residual", c.pair_residual},
          {"third_gap", c.third_gap},
          {"m1_gap", c.m1_gap},
          {"edges_checked", c.edges_checked}};
}

nlohmann::json algorithm_json(const AlgorithmResult& r) {
  return {{"G", r.G},
          {"allocation", r.allocation},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"wallclock", r.wallclock}};
}

}  // namespace

EnvGraph make_env(const ShapeSpec& spec, std::uint64_t seed, double eps) {
  const std::string& s = spec.shape;
  if (s == "chain") return gen_chain(param_int(spec, "m"), param_int(spec, "valued"), seed, eps);
  if (s == "star") {
    return gen_star(param_int(spec, "branches"), param_int(spec, "branch_len"),
                    param_int(spec, "valued"), seed, eps);
  }
  if (s == "tree") return gen_tree(param_int(spec, "m"), param_int(spec, "valued"), seed, eps);
  if (s == "maze") {
    std::optional<int> target;
    if (spec.params.contains("target_nodes") && !spec.params["target_nodes"].is_null()) {
      target = param_int(spec, "target_nodes");
    }
    return gen_random_maze(param_int(spec, "w"), param_int(spec, "valued"), seed, eps, target);
  }
  if (s == "lattice3d" || s == "grid") {
    const auto dims = get_as<std::vector<int>>(require_key(spec.params, "dims", s), "dims");
    const std::size_t want = s == "grid" ? 2 : 3;
    if (dims.size() != want) config_error(s + ": dims needs " + std::to_string(want) + " entries");
    const std::array<int, 3> d{dims[0], dims[1], s == "grid" ? 1 : dims[2]};
    const int m = d[0] * d[1] * d[2];
    const int valued = param_int_or(spec, "valued", -1);
    return gen_lattice3d(d, valued < 0 ? m : valued, seed, eps);
  }
  if (s == "bridge" || s == "indoor") return gen_layout(s, param_int_or(spec, "valued", -1), seed, eps);
  if (s == "orlib") {
    OrlibOptions options;
    options.cost_scale = spec.params.value("cost_scale", 1.0);
    options.n_valued = param_int_or(spec, "valued", -1);
    options.seed = seed;
    options.eps = eps;
    return load_orlib(get_as<std::string>(require_key(spec.params, "path", s), "path"), options);
  }
  if (s == "file") {
    const auto path = get_as<std::string>(require_key(spec.params, "path", s), "path");
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
    try {
      return graph_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path + ": " + e.what());
    }
  }
  config_error("unknown shape '" + s + "'");
}

Allocation initial_allocation(const EnvGraph& env, int n, std::uint64_t seed) {
  if (n < 1 || n > env.node_count()) {
    throw Error(ErrorCode::kTooManyAgents,
                std::to_string(n) + " agents on " + std::to_string(env.node_count()) + " nodes");
  }
  Rng rng(mix_seed(seed, kStartStream));
  return rng.sample(env.node_count(), n);
}

std::string_view to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::kNbo: return "NBO";
    case Algorithm::kVvp: return "VVP";
    case Algorithm::kSota: return "SOTA";
    case Algorithm::kCgr: return "CGR";
    case Algorithm::kOpt: return "OPT";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (Algorithm a : all_algorithms()) {
    if (to_string(a) == upper) return a;
  }
  throw Error(ErrorCode::kConfigError, "unknown algorithm '" + name + "'");
}

std::vector<Algorithm> all_algorithms() {
  return {Algorithm::kNbo, Algorithm::kVvp, Algorithm::kSota, Algorithm::kCgr, Algorithm::kOpt};
}

nlohmann::json to_json(const TrialConfig& c) {
  nlohmann::json algs = nlohmann::json::array();
  for (Algorithm a : c.algorithms) algs.push_back(std::string(to_string(a)));
  nlohmann::json doc{{"shape_id", c.shape_id.empty() ? c.shape.shape : c.shape_id},
                     {"shape", c.shape.shape},
                     {"params", c.shape.params},
                     {"n", c.n},
                     {"seed", c.seed},
                     {"trial_index", c.trial_index},
                     {"eps_weight", c.eps_weight},
                     {"decay", c.decay},
                     {"metric", std::string(to_string(c.metric))},
                     {"edge_scope", std::string(to_string(c.edge_scope))},
                     {"pick", std::string(to_string(c.pick))},
                     {"algorithms", algs},
                     {"nbo_iteration_cap", nullptr},
                     {"vvp_max_passes", c.vvp_max_passes},
                     {"opt_budget", c.opt_budget},
                     {"full_trace", c.full_trace}};
  if (c.nbo_iteration_cap) doc["nbo_iteration_cap"] = *c.nbo_iteration_cap;
  return doc;
}

TrialConfig trial_config_from_json(const nlohmann::json& doc) {
  static const std::set<std::string> keys{
      "shape_id", "shape", "params", "n", "seed", "trial_index", "eps_weight", "decay", "metric",
      "edge_scope", "pick", "algorithms", "nbo_iteration_cap", "vvp_max_passes", "opt_budget",
      "full_trace", "label"};
  check_keys(doc, keys, "trial config");
  TrialConfig c;
  c.shape.shape = get_as<std::string>(require_key(doc, "shape", "trial config"), "shape");
  if (doc.contains("params")) {
    c.shape.params = doc["params"];
    if (!c.shape.params.is_object()) config_error("'params' must be an object");
  }
  c.shape_id = doc.value("shape_id", c.shape.shape);
  c.n = get_as<int>(require_key(doc, "n", "trial config"), "n");
  if (c.n < 1) config_error("'n' must be positive");
  if (doc.contains("seed")) c.seed = get_as<std::uint64_t>(doc["seed"], "seed");
  if (doc.contains("trial_index")) c.trial_index = get_as<int>(doc["trial_index"], "trial_index");
  if (doc.contains("eps_weight")) c.eps_weight = get_as<double>(doc["eps_weight"], "eps_weight");
  if (!(c.eps_weight >= 0.0)) config_error("'eps_weight' must be non-negative");
  if (doc.contains("decay")) c.decay = get_as<std::string>(doc["decay"], "decay");
  try {
    DecayFunction::parse(c.decay);
    if (doc.contains("metric")) c.metric = parse_metric(get_as<std::string>(doc["metric"], "metric"));
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (doc.contains("edge_scope")) {
    const auto v = get_as<std::string>(doc["edge_scope"], "edge_scope");
    if (v == "tree") c.edge_scope = EdgeScope::kTree;
    else if (v == "adjacency") c.edge_scope = EdgeScope::kAdjacency;
    else config_error("unknown edge_scope '" + v + "'");
  }
  if (doc.contains("pick")) {
    const auto v = get_as<std::string>(doc["pick"], "pick");
    if (v == "round_robin") c.pick = PickMode::kRoundRobin;
    else if (v == "probabilistic") c.pick = PickMode::kProbabilistic;
    else config_error("unknown pick '" + v + "'");
  }
  if (doc.contains("algorithms")) {
    c.algorithms.clear();
    for (const auto& a : doc["algorithms"]) c.algorithms.push_back(parse_algorithm(get_as<std::string>(a, "algorithms")));
  }
  if (doc.contains("nbo_iteration_cap") && !doc["nbo_iteration_cap"].is_null()) {
    c.nbo_iteration_cap = get_as<std::int64_t>(doc["nbo_iteration_cap"], "nbo_iteration_cap");
  }
  if (doc.contains("vvp_max_passes")) c.vvp_max_passes = get_as<int>(doc["vvp_max_passes"], "vvp_max_passes");
  if (doc.contains("opt_budget")) c.opt_budget = get_as<std::uint64_t>(doc["opt_budget"], "opt_budget");
  if (doc.contains("full_trace")) c.full_trace = get_as<bool>(doc["full_trace"], "full_trace");
  return c;
}

nlohmann::json run_trial(const TrialConfig& config) {
  const EnvGraph env = make_env(config.shape, config.seed, config.eps_weight);
  const DistanceOracle oracle(env);
  const DecayFunction decay = DecayFunction::parse(config.decay);
  const CoverageContext ctx{&env, &oracle, &decay, config.metric};
  const Allocation start = initial_allocation(env, config.n, config.seed);

  nlohmann::json record{{"shape_id", config.shape_id.empty() ? config.shape.shape : config.shape_id},
                        {"trial_index", config.trial_index},
                        {"seed", config.seed},
                        {"config", to_json(config)},
                        {"graph", {{"nodes", env.node_count()},
                                   {"edges", env.edge_count()},
                                   {"valued", env.valued_nodes().size()},
                                   {"diameter", oracle.diameter()}}},
                        {"initial", start}};
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json errors = nlohmann::json::object();

  for (Algorithm alg : config.algorithms) {
    const std::string name(to_string(alg));
    try {
      switch (alg) {
        case Algorithm::kNbo: {
          NboConfig nc;
          nc.eps_weight = config.eps_weight;
          nc.metric = config.metric;
          nc.pick = config.pick;
          nc.edge_scope = config.edge_scope;
          nc.seed = mix_seed(config.seed, hash_string("nbo"));
          nc.iteration_cap = config.nbo_iteration_cap;
          nc.inject_breach_at = config.inject_breach_at;
          nc.dump_path = config.dump_path;
          const auto t0 = std::chrono::steady_clock::now();
          const NboResult r = run_nbo(ctx, nc, start);
          const double elapsed = seconds_since(t0);
          nlohmann::json phi = nlohmann::json::array();
          nlohmann::json msgs = nlohmann::json::array();
          std::size_t max_region = 0;
          for (const auto& t : r.trace) {
            phi.push_back(t.phi);
            msgs.push_back(t.messages_total);
            max_region = std::max(max_region, t.pair_region);
          }
          nlohmann::json out{{"G", objective(ctx, r.allocation)},
                             {"allocation", r.allocation},
                             {"iterations", r.iterations},
                             {"converged", true},
                             {"messages", r.messages},
                             {"final_class", std::string(to_string(r.final_class))},
                             {"certificate", certificate_json(r.certificate)},
                             {"phi", phi},
                             {"messages_total", msgs},
                             {"max_pair_region", max_region},
                             {"wallclock", elapsed}};
          if (config.full_trace) {
            nlohmann::json trace = nlohmann::json::array();
            for (const auto& t : r.trace) trace.push_back(to_json(t));
            out["trace"] = std::move(trace);
          }
          results[name] = std::move(out);
          break;
        }
        case Algorithm::kVvp:
          results[name] = algorithm_json(vvp_run(ctx, VvpConfig{config.vvp_max_passes}, start));
          break;
        case Algorithm::kSota:
          results[name] = algorithm_json(sota_run(ctx, SotaConfig{}, start));
          break;
        case Algorithm::kCgr:
          results[name] = algorithm_json(cgr_run(ctx, config.n));
          break;
        case Algorithm::kOpt:
          results[name] = algorithm_json(opt_bruteforce(ctx, config.n, OptConfig{config.opt_budget}));
          break;
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvariantViolation) throw;
      errors[name] = e.what();
    }
  }

  nlohmann::json ratios = nlohmann::json::object();
  for (const auto& [name, res] : results.items()) {
    nlohmann::json r = nlohmann::json::object();
    for (const char* den : {"CGR", "OPT"}) {
      if (results.contains(den) && results[den]["G"].get<double>() > 0.0) {
        r[den] = res["G"].get<double>() / results[den]["G"].get<double>();
      }
    }
    ratios[name] = std::move(r);
  }
  record["results"] = std::move(results);
  record["ratios"] = std::move(ratios);
  record["errors"] = std::move(errors);
  return record;
}

nlohmann::json strip_wallclock(const nlohmann::json& record) {
  if (record.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : record.items()) {
      if (key != "wallclock") out[key] = strip_wallclock(value);
    }
    return out;
  }
  if (record.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& value : record) out.push_back(strip_wallclock(value));
    return out;
  }
  return record;
}

std::vector<std::string> validate_record(const nlohmann::json& record) {
  std::vector<std::string> problems;
  std::string id = "record";
  try {
    id = record.at("shape_id").get<std::string>() + "#" + std::to_string(record.at("trial_index").get<int>());
    const TrialConfig config = trial_config_from_json(record.at("config"));
    const EnvGraph env = make_env(config.shape, config.seed, config.eps_weight);
    const DistanceOracle oracle(env);
    const DecayFunction decay = DecayFunction::parse(config.decay);
    const CoverageContext ctx{&env, &oracle, &decay, config.metric};
    for (const auto& [name, res] : record.at("results").items()) {
      const auto x = res.at("allocation").get<Allocation>();
      try {
        check_allocation(env, x);
      } catch (const Error& e) {
        problems.push_back(id + " " + name + ": " + e.what());
        continue;
      }
      if (name != "CGR" && name != "OPT" && static_cast<int>(x.size()) != config.n) {
        problems.push_back(id + " " + name + ": allocation has " + std::to_string(x.size()) + " agents");
      }
      const double recorded = res.at("G").get<double>();
      const double recomputed = objective(ctx, x);
      if (!(std::abs(recorded - recomputed) <= 1e-9)) {
        problems.push_back(id + " " + name + ": recorded G " + std::to_string(recorded) +
                           " but allocation gives " + std::to_string(recomputed));
      }
      if (res.contains("phi")) {
        const auto phi = res["phi"].get<std::vector<double>>();
        for (std::size_t t = 1; t < phi.size(); ++t) {
          if (phi[t] < phi[t - 1] - 1e-9) {
            problems.push_back(id + " " + name + ": phi drops at iteration " + std::to_string(t));
            break;
          }
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(id + ": malformed record (" + e.what() + ")");
  } catch (const Error& e) {
    problems.push_back(id + ": " + e.what());
  }
  return problems;
}

SweepConfig sweep_config_from_json(const nlohmann::json& doc) {
  check_keys(doc, {"master_seed", "trials", "parallelism", "defaults", "entries", "description"}, "sweep config");
  SweepConfig c;
  if (doc.contains("master_seed")) c.master_seed = get_as<std::uint64_t>(doc["master_seed"], "master_seed");
  if (doc.contains("trials")) c.trials = get_as<int>(doc["trials"], "trials");
  if (doc.contains("parallelism")) c.parallelism = get_as<int>(doc["parallelism"], "parallelism");
  if (c.trials < 1) config_error("'trials' must be positive");
  if (c.parallelism < 1) config_error("'parallelism' must be positive");
  const nlohmann::json defaults = doc.value("defaults", nlohmann::json::object());
  const auto& entries = require_key(doc, "entries", "sweep config");
  if (!entries.is_array() || entries.empty()) config_error("'entries' must be a non-empty array");
  for (const auto& e : entries) {
    nlohmann::json merged = defaults;
    if (!e.is_object()) config_error("sweep entry must be an object");
    for (const auto& [key, value] : e.items()) merged[key] = value;
    SweepEntry entry;
    entry.base = trial_config_from_json(merged);
    entry.label = merged.value("label", entry.base.shape_id);
    c.entries.push_back(std::move(entry));
  }
  return c;
}

std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& shape_id, int trial_index) {
  return mix_seed(mix_seed(master_seed, hash_string(shape_id)), static_cast<std::uint64_t>(trial_index));
}

SweepOutcome run_sweep(const SweepConfig& config,
                       const std::function<void(const nlohmann::json&)>& sink) {
  struct Slot {
    bool ready = false;
    std::optional<nlohmann::json> record;
    std::string failure;
    bool breach = false;
  };
  const std::size_t total = config.entries.size() * static_cast<std::size_t>(config.trials);
  std::vector<Slot> slots(total);
  std::mutex mutex;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t k = next++; k < total; k = next++) {
      const SweepEntry& entry = config.entries[k / config.trials];
      const int t = static_cast<int>(k % config.trials);
      TrialConfig tc = entry.base;
      tc.trial_index = t;
      tc.seed = trial_seed(config.master_seed, tc.shape_id, t);
      Slot slot;
      try {
        nlohmann::json record = run_trial(tc);
        record["label"] = entry.label;
        slot.record = std::move(record);
      } catch (const Error& e) {
        slot.failure = tc.shape_id + "#" + std::to_string(t) + ": " + e.what();
        slot.breach = e.code() == ErrorCode::kInvariantViolation;
      } catch (const std::exception& e) {
        slot.failure = tc.shape_id + "#" + std::to_string(t) + ": " + e.what();
      }
      slot.ready = true;
      {
        std::lock_guard<std::mutex> lock(mutex);
        slots[k] = std::move(slot);
      }
      cv.notify_all();
    }
  };

  const int workers = std::max(1, std::min<int>(config.parallelism, static_cast<int>(total)));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);

  SweepOutcome outcome;
  for (std::size_t k = 0; k < total; ++k) {
    Slot slot;
    {
      std::unique_lock<std::mutex> lock(mutex);
      cv.wait(lock, [&] { return slots[k].ready; });
      slot = std::move(slots[k]);
    }
    if (slot.record) {
      if (sink) sink(*slot.record);
      outcome.records.push_back(std::move(*slot.record));
    } else {
      outcome.failures.push_back(slot.failure);
      outcome.invariant_breach = outcome.invariant_breach || slot.breach;
    }
  }
  for (auto& th : pool) th.join();
  return outcome;
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::vector<nlohmann::json> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

ScalabilityConfig scalability_config_from_json(const nlohmann::json& doc) {
  check_keys(doc, {"master_seed", "seeds", "fixed_n", "sizes", "fixed_size", "n_grid", "eps_weight", "decay",
                   "description"},
             "scalability config");
  ScalabilityConfig c;
  if (doc.contains("master_seed")) c.master_seed = get_as<std::uint64_t>(doc["master_seed"], "master_seed");
  if (doc.contains("seeds")) c.seeds = get_as<int>(doc["seeds"], "seeds");
  if (doc.contains("fixed_n")) c.fixed_n = get_as<int>(doc["fixed_n"], "fixed_n");
  if (doc.contains("sizes")) c.sizes = get_as<std::vector<std::array<int, 2>>>(doc["sizes"], "sizes");
  if (doc.contains("fixed_size")) c.fixed_size = get_as<std::array<int, 2>>(doc["fixed_size"], "fixed_size");
  if (doc.contains("n_grid")) c.n_grid = get_as<std::vector<int>>(doc["n_grid"], "n_grid");
  if (doc.contains("eps_weight")) c.eps_weight = get_as<double>(doc["eps_weight"], "eps_weight");
  if (doc.contains("decay")) c.decay = get_as<std::string>(doc["decay"], "decay");
  if (c.seeds < 1) config_error("'seeds' must be positive");
  return c;
}

namespace {

template <class T>
double median(std::vector<T> values) {
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size();
  if (k == 0) return 0.0;
  return k % 2 ? static_cast<double>(values[k / 2])
               : 0.5 * (static_cast<double>(values[k / 2 - 1]) + static_cast<double>(values[k / 2]));
}

ScalabilityCell scalability_cell(const ScalabilityConfig& config, const std::string& sweep,
                                 std::array<int, 2> dims, int n) {
  ScalabilityCell cell;
  cell.sweep = sweep;
  cell.nodes = dims[0] * dims[1];
  cell.n = n;
  const DecayFunction decay = DecayFunction::parse(config.decay);
  for (int s = 0; s < config.seeds; ++s) {
    const std::uint64_t seed =
        trial_seed(config.master_seed, "grid-" + std::to_string(cell.nodes) + "-n" + std::to_string(n), s);
    const EnvGraph env = gen_lattice3d({dims[0], dims[1], 1}, cell.nodes, seed, config.eps_weight);
    const DistanceOracle oracle(env);
    const CoverageContext ctx{&env, &oracle, &decay, Metric::kInduced};
    const Allocation start = initial_allocation(env, n, seed);
    NboConfig nc;
    nc.eps_weight = config.eps_weight;
    nc.seed = seed;
    nc.check_partition = false;
    const auto t0 = std::chrono::steady_clock::now();
    const NboResult r = run_nbo(ctx, nc, start);
    cell.runtimes.push_back(seconds_since(t0));
    cell.iterations.push_back(r.iterations);
  }
  cell.median_runtime = median(cell.runtimes);
  cell.median_iterations = median(cell.iterations);
  return cell;
}

}  // namespace

ScalabilityTable scalability_sweep(const ScalabilityConfig& config) {
  ScalabilityTable table;
  std::vector<double> by_size, by_n;
  auto sizes = config.sizes;
  std::sort(sizes.begin(), sizes.end(), [](auto a, auto b) { return a[0] * a[1] < b[0] * b[1]; });
  for (const auto& dims : sizes) {
    table.cells.push_back(scalability_cell(config, "size", dims, config.fixed_n));
    by_size.push_back(table.cells.back().median_runtime);
  }
  auto ns = config.n_grid;
  std::sort(ns.begin(), ns.end());
  for (int n : ns) {
    table.cells.push_back(scalability_cell(config, "agents", config.fixed_size, n));
    by_n.push_back(table.cells.back().median_runtime);
  }
  table.runtime_nondecreasing_in_size = std::is_sorted(by_size.begin(), by_size.end());
  table.runtime_nonincreasing_in_n = std::is_sorted(by_n.rbegin(), by_n.rend());
  return table;
}

}  // namespace covctl
