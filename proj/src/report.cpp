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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "covctl/errors.hpp"
#include "covctl/harness.hpp"

namespace covctl {
namespace {

namespace fs = std::filesystem;

const char* const kTableAlgorithms[] = {"SOTA", "VVP", "NBO"};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  return out;
}

std::string fmt(double value, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string shape_kind(const nlohmann::json& record) {
  return record.at("config").at("shape").get<std::string>();
}

}  // namespace

std::vector<SweepSummaryRow> summarize(const std::vector<nlohmann::json>& records,
                                       const std::vector<SweepEntry>& entries) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no trial records");
  std::map<std::string, std::string> labels;
  for (const auto& e : entries) labels[e.base.shape_id] = e.label;

  // Group keys kept in first-appearance order so output follows the sweep.
  std::vector<std::string> shape_order;
  std::map<std::string, std::vector<std::string>> algorithm_order;
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> samples;
  for (const auto& record : records) {
    const auto shape_id = record.at("shape_id").get<std::string>();
    if (!algorithm_order.count(shape_id)) {
      shape_order.push_back(shape_id);
      algorithm_order[shape_id];
    }
    if (!labels.count(shape_id)) labels[shape_id] = record.value("label", shape_id);
    for (const auto& [alg, ratios] : record.at("ratios").items()) {
      auto& algs = algorithm_order[shape_id];
      if (std::find(algs.begin(), algs.end(), alg) == algs.end()) algs.push_back(alg);
      for (const auto& [den, value] : ratios.items()) {
        samples[{shape_id, alg, den}].push_back(value.get<double>());
      }
    }
  }

  std::vector<SweepSummaryRow> rows;
  for (const auto& shape_id : shape_order) {
    for (const auto& alg : algorithm_order[shape_id]) {
      for (const char* den : {"CGR", "OPT"}) {
        const auto it = samples.find({shape_id, alg, den});
        if (it == samples.end()) continue;
        const auto& v = it->second;
        SweepSummaryRow row;
        row.shape_id = shape_id;
        row.label = labels[shape_id];
        row.algorithm = alg;
        row.denominator = den;
        row.count = static_cast<int>(v.size());
        double sum = 0.0;
        for (double s : v) sum += s;
        row.mean = sum / row.count;
        double sq = 0.0;
        for (double s : v) sq += (s - row.mean) * (s - row.mean);
        row.std = row.count > 1 ? std::sqrt(sq / (row.count - 1)) : 0.0;
        row.ci95 = 1.96 * row.std / std::sqrt(static_cast<double>(row.count));
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_report(const std::vector<SweepSummaryRow>& rows, const std::vector<nlohmann::json>& records,
                  const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir / "traces", ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create '" + out_dir + "': " + ec.message());

  {
    auto out = open_out(dir / "summary.csv");
    out << "shape_id,label,algorithm,denominator,mean,std,ci95,count\n";
    for (const auto& r : rows) {
      out << csv_field(r.shape_id) << ',' << csv_field(r.label) << ',' << r.algorithm << ','
          << r.denominator << ',' << fmt(r.mean) << ',' << fmt(r.std) << ',' << fmt(r.ci95) << ','
          << r.count << '\n';
    }
  }

  std::vector<std::string> shapes;
  std::map<std::pair<std::string, std::string>, const SweepSummaryRow*> by_cgr;
  for (const auto& r : rows) {
    if (std::find(shapes.begin(), shapes.end(), r.shape_id) == shapes.end()) shapes.push_back(r.shape_id);
    if (r.denominator == "CGR") by_cgr[{r.shape_id, r.algorithm}] = &r;
  }
  std::map<std::string, std::string> labels;
  for (const auto& r : rows) labels[r.shape_id] = r.label;

  {
    auto out = open_out(dir / "table1.csv");
    out << "shape";
    for (const char* alg : kTableAlgorithms) out << ',' << alg;
    out << '\n';
    for (const auto& shape : shapes) {
      out << csv_field(labels[shape]);
      for (const char* alg : kTableAlgorithms) {
        const auto it = by_cgr.find({shape, alg});
        out << ',';
        if (it != by_cgr.end()) out << fmt(it->second->mean, 3) << " ± " << fmt(it->second->std, 3);
      }
      out << '\n';
    }
  }

  {
    auto out = open_out(dir / "ratios.csv");
    out << "shape_id,trial_index,algorithm,denominator,ratio\n";
    for (const auto& record : records) {
      const auto shape_id = record.at("shape_id").get<std::string>();
      const int t = record.at("trial_index").get<int>();
      for (const auto& [alg, ratios] : record.at("ratios").items()) {
        for (const auto& [den, value] : ratios.items()) {
          out << csv_field(shape_id) << ',' << t << ',' << alg << ',' << den << ','
              << fmt(value.get<double>(), 9) << '\n';
        }
      }
    }
  }

  std::set<std::string> approximated;
  for (const auto& record : records) {
    const auto shape_id = record.at("shape_id").get<std::string>();
    const auto& results = record.at("results");
    if (results.contains("NBO") && results["NBO"].contains("phi")) {
      auto out = open_out(dir / "traces" / (shape_id + "_" + std::to_string(record.at("trial_index").get<int>()) + ".csv"));
      out << "t,phi\n";
      const auto& phi = results["NBO"]["phi"];
      for (std::size_t t = 0; t < phi.size(); ++t) out << t << ',' << fmt(phi[t].get<double>(), 9) << '\n';
    }
    const std::string kind = shape_kind(record);
    if (kind == "bridge" || kind == "indoor" || kind == "orlib") approximated.insert(shape_id);
  }

  auto out = open_out(dir / "report.md");
  out << "# Sweep report\n\n";
  out << records.size() << " trial records.\n\n";
  out << "## Performance relative to CGR (mean ± sample std)\n\n";
  out << "| shape |";
  for (const char* alg : kTableAlgorithms) out << ' ' << alg << " |";
  out << "\n|---|---|---|---|\n";
  for (const auto& shape : shapes) {
    out << "| " << labels[shape] << (approximated.count(shape) ? " (*)" : "") << " |";
    for (const char* alg : kTableAlgorithms) {
      const auto it = by_cgr.find({shape, alg});
      out << ' ';
      if (it != by_cgr.end()) out << fmt(it->second->mean, 3) << " ± " << fmt(it->second->std, 3);
      out << " |";
    }
    out << '\n';
  }
  if (!approximated.empty()) {
    out << "\n(*) Environment is an approximation: authored layout or synthetic p-median instance, "
           "not the original map.\n";
  }
  bool any_opt = false;
  for (const auto& r : rows) any_opt = any_opt || r.denominator == "OPT";
  if (any_opt) {
    out << "\n## Ratios to the exhaustive optimum\n\n| shape | algorithm | mean | std | ci95 | count |\n"
           "|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
      if (r.denominator != "OPT") continue;
      out << "| " << r.label << " | " << r.algorithm << " | " << fmt(r.mean, 4) << " | " << fmt(r.std, 4)
          << " | " << fmt(r.ci95, 4) << " | " << r.count << " |\n";
    }
  }
  std::size_t errored = 0;
  for (const auto& record : records) errored += record.value("errors", nlohmann::json::object()).size();
  if (errored) out << "\n" << errored << " algorithm runs reported errors; see the records.\n";
}

nlohmann::json to_json(const ScalabilityTable& table) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : table.cells) {
    cells.push_back({{"sweep", c.sweep},
                     {"nodes", c.nodes},
                     {"n", c.n},
                     {"runtimes", c.runtimes},
                     {"iterations", c.iterations},
                     {"median_runtime", c.median_runtime},
                     {"median_iterations", c.median_iterations}});
  }
  return {{"cells", cells},
          {"runtime_nondecreasing_in_size", table.runtime_nondecreasing_in_size},
          {"runtime_nonincreasing_in_n", table.runtime_nonincreasing_in_n}};
}

void write_scalability(const ScalabilityTable& table, const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create '" + out_dir + "': " + ec.message());
  {
    auto out = open_out(dir / "scalability.csv");
    out << "sweep,nodes,n,median_runtime_s,median_iterations,seeds\n";
    for (const auto& c : table.cells) {
      out << c.sweep << ',' << c.nodes << ',' << c.n << ',' << fmt(c.median_runtime, 6) << ','
          << fmt(c.median_iterations, 1) << ',' << c.runtimes.size() << '\n';
    }
  }
  auto out = open_out(dir / "scalability.json");
  out << to_json(table).dump(2) << '\n';
}

}  // namespace covctl
