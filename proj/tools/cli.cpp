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

#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "covctl/errors.hpp"
#include "covctl/harness.hpp"
#include "json.hpp"

namespace covctl::cli {
namespace {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParams:
    case ErrorCode::kParseError:
    case ErrorCode::kIoError:
    case ErrorCode::kConfigError:
    case ErrorCode::kDisconnectedGraph:
    case ErrorCode::kInvalidEdge:
    case ErrorCode::kNegativeWeight:
    case ErrorCode::kTooManyAgents:
    case ErrorCode::kEmptyInput:
      return kExitConfig;
    case ErrorCode::kInvariantViolation:
      return kExitInvariant;
    default:
      return kExitAlgorithm;
  }
}

// Generator parameters shared by generate and run.
struct ShapeFlags {
  std::string shape;
  int m = 0;
  int valued = -1;
  int branches = 0;
  int branch_len = 0;
  int w = 0;
  int target_nodes = 0;
  std::vector<int> dims;
  std::string path;
  double cost_scale = 1.0;
  double eps = kDefaultEpsWeight;

  CLI::Option* shape_opt = nullptr;
  std::vector<std::pair<std::string, CLI::Option*>> params;
  CLI::Option* cost_scale_opt = nullptr;

  void attach(CLI::App* app) {
    shape_opt = app->add_option("--shape", shape,
                                "chain, star, tree, maze, lattice3d, grid, bridge, indoor or orlib");
    params.emplace_back("m", app->add_option("--m", m, "node count (chain, tree)"));
    params.emplace_back("valued", app->add_option("--valued", valued,
                                                  "number of valued nodes; omit on layouts, grids and orlib to value all"));
    params.emplace_back("branches", app->add_option("--branches", branches, "star branch count"));
    params.emplace_back("branch_len", app->add_option("--branch-len", branch_len, "nodes per star branch"));
    params.emplace_back("w", app->add_option("--w", w, "maze corridor width, 1 or 2"));
    params.emplace_back("target_nodes", app->add_option("--target-nodes", target_nodes,
                                                        "maze size after pruning (default 80% of the template)"));
    params.emplace_back("dims", app->add_option("--dims", dims, "lattice extents x,y[,z]")->delimiter(','));
    params.emplace_back("path", app->add_option("--path", path, "OR-Library p-median file"));
    cost_scale_opt = app->add_option("--cost-scale", cost_scale, "orlib edge cost to hop factor");
    app->add_option("--eps", eps, "weight of non-valued nodes")->capture_default_str();
  }

  ShapeSpec spec() const {
    ShapeSpec s;
    s.shape = shape;
    for (const auto& [key, opt] : params) {
      if (!opt->count()) continue;
      if (key == "dims") s.params[key] = dims;
      else if (key == "path") s.params[key] = path;
      else if (key == "m") s.params[key] = m;
      else if (key == "valued") s.params[key] = valued;
      else if (key == "branches") s.params[key] = branches;
      else if (key == "branch_len") s.params[key] = branch_len;
      else if (key == "w") s.params[key] = w;
      else if (key == "target_nodes") s.params[key] = target_nodes;
    }
    if (cost_scale_opt->count()) s.params["cost_scale"] = cost_scale;
    return s;
  }
};

// Flag beats COVCTL_SEED beats the fallback.
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value, std::uint64_t fallback) {
  if (flag->count()) return flag_value;
  if (const char* env = std::getenv("COVCTL_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::kConfigError, std::string("COVCTL_SEED is not an unsigned integer: ") + env);
  }
  return fallback;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  out << text;
}

void echo_config(std::ostream& err, const std::string& command, const nlohmann::json& resolved) {
  err << "covctl " << command << " config: " << resolved.dump() << '\n';
}

std::optional<std::int64_t> injected_breach() {
  const char* env = std::getenv("COVCTL_TEST_INJECT_BREACH");
  if (!env || !*env) return std::nullopt;
  try {
    return std::stoll(env);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfigError, std::string("COVCTL_TEST_INJECT_BREACH is not an integer: ") + env);
  }
}

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const auto& name : names) {
    if (name == "all" || name == "ALL") return all_algorithms();
    const Algorithm a = parse_algorithm(name);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coverage control experiments on graph environments.", "covctl"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  // generate
  auto* gen = app.add_subcommand("generate", "Write a generated environment graph as JSON");
  ShapeFlags gen_shape;
  gen_shape.attach(gen);
  gen_shape.shape_opt->required();
  std::uint64_t gen_seed = 0;
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "generator seed (else COVCTL_SEED, else 0)");
  std::string gen_out;
  gen->add_option("--out", gen_out, "output graph JSON path")->required();

  // run
  auto* run = app.add_subcommand("run", "Run one trial and print its record");
  ShapeFlags run_shape;
  run_shape.attach(run);
  std::string run_graph;
  auto* graph_opt = run->add_option("--graph", run_graph, "graph JSON written by generate");
  graph_opt->excludes(run_shape.shape_opt);
  std::vector<std::string> run_algs{"nbo"};
  run->add_option("--alg", run_algs, "nbo, vvp, sota, cgr, opt or all; comma separated")
      ->delimiter(',')
      ->capture_default_str();
  int run_n = 0;
  run->add_option("--n", run_n, "number of agents")->required();
  std::uint64_t run_seed = 0;
  auto* run_seed_opt = run->add_option("--seed", run_seed, "trial seed (else COVCTL_SEED, else 0)");
  std::string run_decay = "inv1p";
  run->add_option("--decay", run_decay, "decay: inv1p or exp:<rate>")->capture_default_str();
  std::string run_metric = "induced";
  run->add_option("--metric", run_metric, "utility distances: induced or global")->capture_default_str();
  std::string run_scope = "tree";
  run->add_option("--edge-scope", run_scope, "pairs checked for termination: tree or adjacency")
      ->capture_default_str();
  std::string run_pick = "round_robin";
  run->add_option("--pick", run_pick, "agent selection: round_robin or probabilistic")->capture_default_str();
  std::int64_t run_cap = 0;
  auto* cap_opt = run->add_option("--iteration-cap", run_cap, "NBO iteration cap (default derived)");
  std::uint64_t run_budget = 10'000'000;
  run->add_option("--opt-budget", run_budget, "largest allocation count OPT may enumerate")->capture_default_str();
  std::string run_trace;
  run->add_option("--trace", run_trace, "write the full NBO trace JSON here");
  std::string run_out;
  run->add_option("--out", run_out, "write the record here instead of stdout");
  std::string run_dump;
  run->add_option("--dump", run_dump, "state dump path on invariant breach (default in temp dir)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a seeded sweep and write records, summary and report");
  std::string sweep_config;
  sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
  std::string sweep_out;
  sweep->add_option("--out", sweep_out, "output directory")->required();
  int sweep_trials = 0;
  auto* trials_opt = sweep->add_option("--trials", sweep_trials, "override trials per entry");
  int sweep_par = 0;
  auto* par_opt = sweep->add_option("--parallelism", sweep_par, "override worker count");
  std::uint64_t sweep_seed = 0;
  auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "master seed (else COVCTL_SEED, else config)");

  // scalability
  auto* scal = app.add_subcommand("scalability", "Time NBO over grid size and agent count");
  std::string scal_config;
  scal->add_option("--config", scal_config, "scalability config JSON (defaults built in)");
  std::string scal_out;
  scal->add_option("--out", scal_out, "output directory")->required();
  int scal_seeds = 0;
  auto* seeds_opt = scal->add_option("--seeds", scal_seeds, "override seeds per cell");
  std::uint64_t scal_seed = 0;
  auto* scal_seed_opt = scal->add_option("--seed", scal_seed, "master seed (else COVCTL_SEED, else config)");

  // report
  auto* rep = app.add_subcommand("report", "Summarize a results.jsonl into CSV and markdown");
  std::string rep_results;
  rep->add_option("--results", rep_results, "results.jsonl from sweep")->required();
  std::string rep_out;
  rep->add_option("--out", rep_out, "output directory")->required();

  // validate
  auto* val = app.add_subcommand("validate", "Re-check every record of a results.jsonl");
  std::string val_results;
  val->add_option("--results", val_results, "results.jsonl to check")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const ShapeSpec spec = gen_shape.spec();
      const std::uint64_t seed = resolve_seed(gen_seed_opt, gen_seed, 0);
      echo_config(err, "generate", {{"shape", spec.shape}, {"params", spec.params}, {"seed", seed},
                                    {"eps", gen_shape.eps}, {"out", gen_out}});
      const EnvGraph env = make_env(spec, seed, gen_shape.eps);
      write_text(gen_out, to_json(env).dump() + "\n");
      out << "wrote " << gen_out << " (" << env.node_count() << " nodes, " << env.edge_count() << " edges, "
          << env.valued_nodes().size() << " valued)\n";
      return kExitOk;
    }

    if (run->parsed()) {
      if (run_graph.empty() == run_shape.shape.empty()) {
        err << "usage error: give exactly one of --graph or --shape\nRun with --help for usage.\n";
        return kExitUsage;
      }
      nlohmann::json doc{{"n", run_n}, {"decay", run_decay}, {"metric", run_metric}, {"edge_scope", run_scope},
                         {"pick", run_pick}, {"opt_budget", run_budget}, {"full_trace", !run_trace.empty()}};
      if (run_graph.empty()) {
        const ShapeSpec spec = run_shape.spec();
        doc["shape"] = spec.shape;
        doc["params"] = spec.params;
      } else {
        doc["shape"] = "file";
        doc["params"] = {{"path", run_graph}};
      }
      doc["eps_weight"] = run_shape.eps;
      doc["seed"] = resolve_seed(run_seed_opt, run_seed, 0);
      if (cap_opt->count()) doc["nbo_iteration_cap"] = run_cap;
      TrialConfig config = trial_config_from_json(doc);
      config.algorithms = parse_algorithms(run_algs);
      config.inject_breach_at = injected_breach();
      config.dump_path = run_dump.empty()
                             ? (fs::temp_directory_path() / ("covctl-breach-" + std::to_string(config.seed) + ".json"))
                                   .string()
                             : run_dump;
      echo_config(err, "run", to_json(config));

      nlohmann::json record = run_trial(config);
      if (!run_trace.empty() && record["results"].contains("NBO")) {
        write_text(run_trace, record["results"]["NBO"]["trace"].dump(2) + "\n");
        record["results"]["NBO"].erase("trace");
      }
      if (run_out.empty()) out << record.dump(2) << '\n';
      else write_text(run_out, record.dump(2) + "\n");
      for (const auto& [name, res] : record["results"].items()) {
        err << name << ": G = " << res["G"].get<double>();
        if (res.contains("final_class")) err << ", class " << res["final_class"].get<std::string>();
        err << '\n';
      }
      if (!record["errors"].empty()) {
        for (const auto& [name, what] : record["errors"].items()) {
          err << name << " failed: " << what.get<std::string>() << '\n';
        }
        return kExitAlgorithm;
      }
      return kExitOk;
    }

    if (sweep->parsed()) {
      SweepConfig config = sweep_config_from_json(read_json_file(sweep_config));
      // File paths inside a config are relative to the config itself.
      const fs::path config_dir = fs::absolute(sweep_config).parent_path();
      for (auto& e : config.entries) {
        auto& params = e.base.shape.params;
        if (params.contains("path") && params["path"].is_string() &&
            fs::path(params["path"].get<std::string>()).is_relative()) {
          params["path"] = (config_dir / params["path"].get<std::string>()).lexically_normal().string();
        }
      }
      if (trials_opt->count()) config.trials = sweep_trials;
      if (par_opt->count()) config.parallelism = sweep_par;
      if (config.trials < 1 || config.parallelism < 1) {
        throw Error(ErrorCode::kConfigError, "trials and parallelism must be positive");
      }
      config.master_seed = resolve_seed(sweep_seed_opt, sweep_seed, config.master_seed);
      nlohmann::json entries = nlohmann::json::array();
      for (const auto& e : config.entries) {
        nlohmann::json entry = to_json(e.base);
        entry["label"] = e.label;
        entries.push_back(std::move(entry));
      }
      echo_config(err, "sweep", {{"master_seed", config.master_seed}, {"trials", config.trials},
                                 {"parallelism", config.parallelism}, {"entries", entries}, {"out", sweep_out}});

      fs::create_directories(sweep_out);
      const fs::path results_path = fs::path(sweep_out) / "results.jsonl";
      std::ofstream results(results_path);
      if (!results) throw Error(ErrorCode::kIoError, "cannot write '" + results_path.string() + "'");
      std::size_t written = 0;
      const SweepOutcome outcome = run_sweep(config, [&](const nlohmann::json& record) {
        results << record.dump() << '\n';
        results.flush();
        if (++written % 32 == 0) err << written << " trials done\n";
      });
      results.close();
      if (!outcome.records.empty()) {
        const auto rows = summarize(outcome.records, config.entries);
        write_report(rows, outcome.records, sweep_out);
        for (const auto& r : rows) {
          out << r.label << ' ' << r.algorithm << '/' << r.denominator << ": " << r.mean << " ± " << r.std
              << " (n=" << r.count << ")\n";
        }
      }
      if (!outcome.failures.empty()) {
        std::string text;
        for (const auto& f : outcome.failures) text += f + "\n";
        write_text(fs::path(sweep_out) / "failures.txt", text);
        err << outcome.failures.size() << " trials aborted:\n" << text;
        return outcome.invariant_breach ? kExitInvariant : kExitAlgorithm;
      }
      return kExitOk;
    }

    if (scal->parsed()) {
      ScalabilityConfig config =
          scal_config.empty() ? ScalabilityConfig{} : scalability_config_from_json(read_json_file(scal_config));
      if (seeds_opt->count()) config.seeds = scal_seeds;
      if (config.seeds < 1) throw Error(ErrorCode::kConfigError, "seeds must be positive");
      config.master_seed = resolve_seed(scal_seed_opt, scal_seed, config.master_seed);
      echo_config(err, "scalability", {{"master_seed", config.master_seed}, {"seeds", config.seeds},
                                       {"fixed_n", config.fixed_n}, {"sizes", config.sizes},
                                       {"fixed_size", config.fixed_size}, {"n_grid", config.n_grid},
                                       {"eps_weight", config.eps_weight}, {"decay", config.decay},
                                       {"out", scal_out}});
      const ScalabilityTable table = scalability_sweep(config);
      write_scalability(table, scal_out);
      for (const auto& c : table.cells) {
        out << c.sweep << " |C|=" << c.nodes << " n=" << c.n << ": median " << c.median_runtime << " s, "
            << c.median_iterations << " iterations\n";
      }
      out << "runtime non-decreasing in |C|: " << (table.runtime_nondecreasing_in_size ? "yes" : "no") << '\n'
          << "runtime non-increasing in n: " << (table.runtime_nonincreasing_in_n ? "yes" : "no") << '\n';
      return kExitOk;
    }

    if (rep->parsed()) {
      echo_config(err, "report", {{"results", rep_results}, {"out", rep_out}});
      const auto records = read_jsonl(rep_results);
      write_report(summarize(records), records, rep_out);
      out << "wrote report for " << records.size() << " records to " << rep_out << '\n';
      return kExitOk;
    }

    if (val->parsed()) {
      echo_config(err, "validate", {{"results", val_results}});
      const auto records = read_jsonl(val_results);
      if (records.empty()) throw Error(ErrorCode::kEmptyInput, val_results + " has no records");
      std::size_t bad = 0;
      for (const auto& record : records) {
        const auto problems = validate_record(record);
        if (!problems.empty()) ++bad;
        for (const auto& p : problems) out << "FAIL " << p << '\n';
      }
      if (bad) {
        out << bad << " of " << records.size() << " records failed validation\n";
        return kExitInvariant;
      }
      out << "ok: " << records.size() << " records\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitUsage;
}

}  // namespace covctl::cli
