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

// Text formats for simulator configs and outputs.
//
//   metrics CSV     step,global_success,alpha,beta,value,share_xh,...,cnt_xe
//   transition JSON {"buckets": [...], "counts": 5x5, "percentages": 5x5}
//   config JSON     flat object, one snake_case key per SimConfig field

#pragma once

#include <charconv>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "coba/errors.hpp"
#include "coba/simulator.hpp"
#include "json.hpp"

namespace coba {

// Shortest representation that round-trips.
inline std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kMetricsHeader =
    "step,global_success,alpha,beta,value,share_xh,share_hard,share_med,"
    "share_easy,share_xe,cnt_xh,cnt_hard,cnt_med,cnt_easy,cnt_xe";

inline std::string MetricsCsv(const std::vector<StepMetrics>& metrics) {
  std::string out = kMetricsHeader;
  out += '\n';
  for (const auto& m : metrics) {
    out += std::to_string(m.step);
    for (double v : {m.global_success, m.alpha, m.beta, m.aggregate_value}) {
      out += ',';
      out += FormatDouble(v);
    }
    for (double s : m.budget_share) {
      out += ',';
      out += FormatDouble(s);
    }
    for (std::int64_t c : m.task_count) {
      out += ',';
      out += std::to_string(c);
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json TransitionJson(const TransitionMatrix& t) {
  nlohmann::ordered_json doc;
  doc["buckets"] = kBucketNames;
  doc["counts"] = t.counts;
  doc["percentages"] = t.percentages();
  return doc;
}

inline nlohmann::ordered_json SimConfigToJson(const SimConfig& c) {
  nlohmann::ordered_json j;
  j["task_count"] = c.task_count;
  j["steps"] = c.steps;
  j["b_total"] = c.alloc.b_total;
  j["b_low"] = c.alloc.b_low;
  j["b_up"] = c.alloc.b_up;
  j["tau"] = c.alloc.value_params.tau;
  j["kappa"] = c.capability.kappa;
  j["gamma"] = c.capability.gamma;
  j["lambda_slope"] = c.capability.lambda_slope;
  j["alpha_min"] = c.capability.alpha_min;
  j["alpha_max"] = c.capability.alpha_max;
  j["window_len"] = c.capability.window_len;
  j["learn_rate"] = c.learn_rate;
  j["learn_tau"] = c.learn_tau;
  j["breakthrough_prob"] = c.breakthrough_prob;
  j["breakthrough_floor"] = c.breakthrough_floor;
  j["seed"] = c.seed;
  j["sampler"] = c.sampler;
  j["sampler_a"] = c.sampler_a;
  j["sampler_b"] = c.sampler_b;
  j["bucket_weights"] = c.bucket_weights;
  j["prior"] = c.store.prior.value();
  j["smoothing"] = c.store.smoothing;
  return j;
}

// Missing keys keep their defaults; tau defaults to b_up / 8 and b_total to
// 16 * task_count. Every bad key is reported in one ConfigError.
inline SimConfig ParseSimConfig(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  SimConfig c;
  std::vector<std::string> problems;

  auto integer = [&](const std::string& key, const nlohmann::json& v, auto& out) {
    if (!v.is_number_integer()) {
      problems.push_back(key + " (expected integer)");
      return;
    }
    out = v.get<std::remove_reference_t<decltype(out)>>();
  };
  auto real = [&](const std::string& key, const nlohmann::json& v, double& out) {
    if (!v.is_number()) {
      problems.push_back(key + " (expected number)");
      return;
    }
    out = v.get<double>();
  };

  double prior = c.store.prior.value();
  using Setter = std::function<void(const std::string&, const nlohmann::json&)>;
  const std::map<std::string, Setter> fields = {
      {"task_count", [&](auto& k, auto& v) { integer(k, v, c.task_count); }},
      {"steps", [&](auto& k, auto& v) { integer(k, v, c.steps); }},
      {"b_total", [&](auto& k, auto& v) { integer(k, v, c.alloc.b_total); }},
      {"b_low", [&](auto& k, auto& v) { integer(k, v, c.alloc.b_low); }},
      {"b_up", [&](auto& k, auto& v) { integer(k, v, c.alloc.b_up); }},
      {"tau", [&](auto& k, auto& v) { real(k, v, c.alloc.value_params.tau); }},
      {"kappa", [&](auto& k, auto& v) { real(k, v, c.capability.kappa); }},
      {"gamma", [&](auto& k, auto& v) { real(k, v, c.capability.gamma); }},
      {"lambda_slope",
       [&](auto& k, auto& v) { real(k, v, c.capability.lambda_slope); }},
      {"alpha_min", [&](auto& k, auto& v) { real(k, v, c.capability.alpha_min); }},
      {"alpha_max", [&](auto& k, auto& v) { real(k, v, c.capability.alpha_max); }},
      {"window_len",
       [&](auto& k, auto& v) { integer(k, v, c.capability.window_len); }},
      {"learn_rate", [&](auto& k, auto& v) { real(k, v, c.learn_rate); }},
      {"learn_tau", [&](auto& k, auto& v) { real(k, v, c.learn_tau); }},
      {"breakthrough_prob",
       [&](auto& k, auto& v) { real(k, v, c.breakthrough_prob); }},
      {"breakthrough_floor",
       [&](auto& k, auto& v) { real(k, v, c.breakthrough_floor); }},
      {"seed",
       [&](auto& k, auto& v) {
         if (!v.is_number_unsigned()) {
           problems.push_back(k + " (expected non-negative integer)");
           return;
         }
         c.seed = v.template get<std::uint64_t>();
       }},
      {"sampler",
       [&](auto& k, auto& v) {
         if (!v.is_string()) {
           problems.push_back(k + " (expected string)");
           return;
         }
         c.sampler = v.template get<std::string>();
       }},
      {"sampler_a", [&](auto& k, auto& v) { real(k, v, c.sampler_a); }},
      {"sampler_b", [&](auto& k, auto& v) { real(k, v, c.sampler_b); }},
      {"bucket_weights",
       [&](auto& k, auto& v) {
         if (!v.is_array() || v.size() != kBucketCount) {
           problems.push_back(k + " (expected array of 5 numbers)");
           return;
         }
         for (std::size_t i = 0; i < kBucketCount; ++i) {
           real(k, v[i], c.bucket_weights[i]);
         }
       }},
      {"prior", [&](auto& k, auto& v) { real(k, v, prior); }},
      {"smoothing", [&](auto& k, auto& v) { real(k, v, c.store.smoothing); }},
  };

  for (const auto& [key, v] : doc.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) {
      problems.push_back(key + " (unknown field)");
      continue;
    }
    it->second(key, v);
  }
  if (!doc.contains("tau")) {
    c.alloc.value_params.tau = static_cast<double>(c.alloc.b_up) / 8.0;
  }
  if (!doc.contains("b_total")) c.alloc.b_total = 16 * c.task_count;
  if (!(prior >= 0.0 && prior <= 1.0)) {
    problems.push_back("prior (must lie in [0,1])");
  } else {
    c.store.prior = PassRate(prior);
  }

  if (problems.empty()) {
    try {
      c.Validate();
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid config fields:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return c;
}

inline nlohmann::ordered_json StrategyToJson(const StrategySpec& s) {
  nlohmann::ordered_json j;
  switch (s.kind) {
    case StrategyKind::kCoba:
      j["kind"] = "coba";
      j["inverted"] = s.inverted;
      break;
    case StrategyKind::kUniform:
      j["kind"] = "uniform";
      break;
    case StrategyKind::kStaticBeta:
      j["kind"] = "static_beta";
      j["alpha"] = s.alpha;
      j["beta"] = s.beta;
      break;
    case StrategyKind::kLinearDecay:
      j["kind"] = "linear_decay";
      j["decay_start"] = s.decay_start;
      j["decay_end"] = s.decay_end;
      break;
  }
  return j;
}

inline StrategySpec StrategyFromJson(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "coba") return StrategySpec::Coba(j.value("inverted", false));
    if (kind == "uniform") return StrategySpec::Uniform();
    if (kind == "static_beta") {
      return StrategySpec::StaticBeta(j.at("alpha").get<double>(),
                                      j.at("beta").get<double>());
    }
    if (kind == "linear_decay") {
      return StrategySpec::LinearDecay(j.value("decay_start", 10.0),
                                       j.value("decay_end", 1.0));
    }
    throw ConfigError("unknown strategy kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("strategy: ") + e.what());
  }
}

inline nlohmann::ordered_json ReportsToJson(
    const std::vector<StrategyReport>& reports) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json row;
    row["strategy"] = r.strategy;
    row["final_success"] = r.final_success;
    row["final_latent_success"] = r.final_latent_success;
    row["final_alpha"] = r.final_alpha;
    row["hard_conversion"] = r.hard_conversion;
    row["medium_conversion"] = r.medium_conversion;
    row["value_trajectory"] = r.value_trajectory;
    row["transitions"] = TransitionJson(r.transitions);
    rows.push_back(std::move(row));
  }
  return nlohmann::ordered_json{{"reports", rows}};
}

}  // namespace coba
