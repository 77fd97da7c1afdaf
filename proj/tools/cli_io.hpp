// Copyright 2026 The Authors.
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

// Reading pass-rate files, digests and the allocate JSON payload.

#pragma once

#include <openssl/evp.h>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coba/coba.hpp"
#include "json.hpp"

namespace coba::cli {

// Input the user must fix; maps to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path + ": cannot write file");
  out << content;
}

inline std::string Sha256Hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  }
  return hex.str();
}

struct PassRateRow {
  std::string id;
  double p = 0.0;
};

inline std::vector<PassRateRow> ParsePassRateCsv(const std::string& text,
                                                 const std::string& name) {
  std::vector<PassRateRow> rows;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](int col, const std::string& msg) {
    throw InputError(name + ":" + std::to_string(line_no) + ":" +
                     std::to_string(col) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "task_id,pass_rate") fail(1, "expected header 'task_id,pass_rate'");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      fail(1, "expected exactly two fields");
    }
    std::string id = line.substr(0, comma);
    const std::string field = line.substr(comma + 1);
    const int col = static_cast<int>(comma) + 2;
    if (id.empty()) fail(1, "empty task_id");
    double p = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), p);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
      fail(col, "pass_rate is not a number");
    }
    if (!(p >= 0.0 && p <= 1.0)) fail(col, "pass_rate out of range [0,1]");
    if (!seen.insert(id).second) fail(1, "duplicate task_id '" + id + "'");
    rows.push_back({std::move(id), p});
  }
  if (line_no == 0) fail(1, "empty file");
  if (rows.empty()) throw InputError(name + ": no rows");
  return rows;
}

inline std::vector<PassRateRow> ParsePassRateJson(const std::string& text,
                                                  const std::string& name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(name + ":" + std::to_string(line) + ":" +
                     std::to_string(col) + ": invalid JSON");
  }
  if (!doc.is_array() || doc.empty()) {
    throw InputError(name + ": expected a non-empty array of {id, p}");
  }
  std::vector<PassRateRow> rows;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    const std::string where = name + ": element " + std::to_string(i);
    if (!e.is_object() || !e.contains("id") || !e.contains("p") ||
        !e["p"].is_number()) {
      throw InputError(where + ": expected {\"id\": ..., \"p\": number}");
    }
    std::string id = e["id"].is_string() ? e["id"].get<std::string>()
                                         : e["id"].dump();
    const double p = e["p"].get<double>();
    if (!(p >= 0.0 && p <= 1.0)) throw InputError(where + ": p out of range [0,1]");
    if (!seen.insert(id).second) throw InputError(where + ": duplicate id '" + id + "'");
    rows.push_back({std::move(id), p});
  }
  return rows;
}

inline std::vector<PassRateRow> ParsePassRateFile(const std::string& path) {
  const std::string text = ReadFile(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool json = (path.size() >= 5 && path.substr(path.size() - 5) == ".json") ||
                    (first != std::string::npos && text[first] == '[');
  return json ? ParsePassRateJson(text, path) : ParsePassRateCsv(text, path);
}

inline std::vector<TaskStat> ToTaskStats(const std::vector<PassRateRow>& rows) {
  std::vector<TaskStat> tasks;
  tasks.reserve(rows.size());
  for (const auto& r : rows) tasks.push_back({r.id, 0, 0, PassRate(r.p)});
  return tasks;
}

// {"budgets": {id: count}, "aggregate_value": v, "alpha": a, "beta": b}
inline std::string AllocationJson(const Allocation& alloc, const BetaParams& params) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json budgets = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < alloc.budgets.size(); ++i) {
    budgets[alloc.task_ids[i]] = alloc.budgets[i];
  }
  doc["budgets"] = std::move(budgets);
  doc["aggregate_value"] = alloc.aggregate_value;
  doc["alpha"] = params.alpha;
  doc["beta"] = params.beta;
  return doc.dump(2) + "\n";
}

inline constexpr const char* kToolVersion = "1.0.0";

struct SimArtifacts {
  std::string metrics_csv;
  std::string transition_json;
  std::string store_json;
  std::string manifest_json;
  double final_success = 0.0;
  double final_alpha = 0.0;
};

// Runs one simulation and renders every output file plus the manifest.
inline SimArtifacts RenderSimulation(const SimConfig& config,
                                     const StrategySpec& strategy) {
  const SimResult result = run_simulation(config, strategy);
  SimArtifacts a;
  a.metrics_csv = MetricsCsv(result.metrics);
  a.transition_json = TransitionJson(result.transitions).dump(2) + "\n";
  a.store_json = result.store_snapshot + "\n";
  a.final_success = result.metrics.back().global_success;
  a.final_alpha = result.metrics.back().alpha;

  nlohmann::ordered_json manifest;
  manifest["tool"] = "coba";
  manifest["version"] = kToolVersion;
  manifest["seed"] = config.seed;
  manifest["strategy"] = StrategyToJson(strategy);
  manifest["config"] = SimConfigToJson(config);
  manifest["outputs"] = {{"metrics.csv", Sha256Hex(a.metrics_csv)},
                         {"transition.json", Sha256Hex(a.transition_json)},
                         {"store.json", Sha256Hex(a.store_json)}};
  a.manifest_json = manifest.dump(2) + "\n";
  return a;
}

}  // namespace coba::cli
