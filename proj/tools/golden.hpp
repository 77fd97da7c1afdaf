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

// Golden-file regression suite behind `coba verify`.
//
// Each case re-derives an artifact from its oracle and compares it with the
// checked-in file. Run-derived cases can be rewritten with --regenerate;
// value_examples.json holds independently computed numbers and is never
// rewritten.

#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cli_io.hpp"
#include "coba/coba.hpp"
#include "json.hpp"

namespace coba::cli {

struct GoldenCase {
  std::string name;
  std::string file;
  // Produces the expected file content; empty for hand-frozen files.
  std::function<std::string()> produce;
  // Compares against the file content; nullopt on success, else a diff.
  std::function<std::optional<std::string>(const std::string&)> check;
};

inline std::optional<std::string> DiffText(const std::string& expected,
                                           const std::string& actual) {
  if (expected == actual) return std::nullopt;
  std::istringstream e(expected), a(actual);
  std::string el, al;
  int line = 0;
  while (true) {
    const bool he = static_cast<bool>(std::getline(e, el));
    const bool ha = static_cast<bool>(std::getline(a, al));
    ++line;
    if (!he && !ha) break;
    if (!he || !ha || el != al) {
      std::ostringstream msg;
      msg << "line " << line << ":\n  golden:   " << (he ? el : "<eof>")
          << "\n  computed: " << (ha ? al : "<eof>");
      return msg.str();
    }
  }
  return "content differs (line endings or trailing bytes)";
}

// The three-task instance whose allocation is fixed by exhaustive search.
inline std::vector<TaskStat> GoldenM3Tasks() {
  return {{"a", 0, 0, PassRate(0.2)},
          {"b", 0, 0, PassRate(0.5)},
          {"c", 0, 0, PassRate(0.8)}};
}
inline AllocConfig GoldenM3Config() {
  AllocConfig c;
  c.b_total = 12;
  c.b_low = 2;
  c.b_up = 6;
  c.value_params = ValueParams{4.0, BetaParams::Make(2.0, 5.0)};
  return c;
}

inline SimConfig GoldenPopulationConfig() {
  SimConfig c;
  c.task_count = 3;
  c.sampler = "uniform";
  c.seed = 7;
  c.alloc.b_total = 48;
  return c;
}

inline std::vector<StrategySpec> GoldenCompareStrategies() {
  return {StrategySpec::Coba(), StrategySpec::StaticBeta(10.5, 1.5),
          StrategySpec::StaticBeta(1.5, 10.5), StrategySpec::LinearDecay()};
}

// Library evaluations of the tabulated value-function examples.
inline std::vector<std::pair<std::string, std::function<double()>>>
ValueExampleProbes() {
  auto fresh = [] {
    return CapabilityState(CapabilityConfig{});
  };
  auto alpha_after = [fresh](double pass_rate, int repeats) {
    CapabilityState s = fresh();
    const std::vector<PassRate> batch(4, PassRate(pass_rate));
    for (int i = 0; i < repeats; ++i) s.Update(batch);
    return s.current().alpha;
  };
  const ValueParams v22{4.0, BetaParams::Make(2.0, 2.0)};
  const ValueParams v11{4.0, BetaParams::Make(1.0, 1.0)};
  return {
      {"global_failure_rate[0.2,0.5,0.8]",
       [] {
         const std::vector<PassRate> r{PassRate(0.2), PassRate(0.5), PassRate(0.8)};
         return global_failure_rate(r);
       }},
      {"transform_failure(0.7,10)", [] { return transform_failure(0.7, 10.0); }},
      {"transform_failure(0.5,10)", [] { return transform_failure(0.5, 10.0); }},
      {"transform_failure(0.3,10)", [] { return transform_failure(0.3, 10.0); }},
      {"alpha_after(0.3,x1)", [=] { return alpha_after(0.3, 1); }},
      {"alpha_after(1.0,x5)", [=] { return alpha_after(1.0, 5); }},
      {"alpha_after(0.0,x5)", [=] { return alpha_after(0.0, 5); }},
      {"beta_density(0.5;2,2)",
       [] { return beta_density(PassRate(0.5), BetaParams::Make(2, 2)); }},
      {"saturation(8,0.5,4)", [] { return saturation(8, PassRate(0.5), 4.0); }},
      {"value(8,0.5;tau4,2,2)", [=] { return value(8, PassRate(0.5), v22); }},
      {"marginal_gain(0,0.5;tau4,1,1)",
       [=] { return marginal_gain(0, PassRate(0.5), v11); }},
      {"marginal_gain(1,0.5;tau4,1,1)",
       [=] { return marginal_gain(1, PassRate(0.5), v11); }},
      {"apply_learning(0.5;0.2,8,B8)",
       [] {
         SimConfig c;
         c.learn_rate = 0.2;
         c.learn_tau = 8.0;
         SplitMix64 rng(0);
         return apply_learning({"x", PassRate(0.5)}, 8, c, rng).p_latent.value();
       }},
  };
}

inline std::vector<GoldenCase> GoldenCases() {
  std::vector<GoldenCase> cases;

  cases.push_back(
      {"value_examples", "value_examples.json", nullptr,
       [](const std::string& content) -> std::optional<std::string> {
         const auto doc = nlohmann::json::parse(content);
         std::string diff;
         for (const auto& [name, probe] : ValueExampleProbes()) {
           if (!doc.contains(name)) {
             diff += "  missing golden entry '" + name + "'\n";
             continue;
           }
           const double expected = doc[name].at("expected").get<double>();
           const double tol = doc[name].at("tol").get<double>();
           const double got = probe();
           if (!(std::abs(got - expected) <= tol)) {
             diff += "  " + name + ": golden " + FormatDouble(expected) +
                     ", computed " + FormatDouble(got) + "\n";
           }
         }
         if (diff.empty()) return std::nullopt;
         return diff;
       }});

  auto alloc_m3 = [] {
    const auto tasks = GoldenM3Tasks();
    const AllocConfig config = GoldenM3Config();
    const Allocation brute = allocate_brute(tasks, config);
    const Allocation greedy = allocate_greedy(tasks, config);
    const Allocation dp = allocate_dp(tasks, config);
    if (std::abs(greedy.aggregate_value - brute.aggregate_value) > 1e-9 ||
        std::abs(dp.aggregate_value - brute.aggregate_value) > 1e-9) {
      return std::string("solver disagreement\n");
    }
    return AllocationJson(brute, config.value_params.beta_params);
  };
  cases.push_back({"allocate_m3", "allocate_m3.json", alloc_m3,
                   [alloc_m3](const std::string& c) { return DiffText(c, alloc_m3()); }});

  auto population = [] {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& t : init_population(GoldenPopulationConfig())) {
      doc.push_back({{"id", t.task_id}, {"p_latent", t.p_latent.value()}});
    }
    return doc.dump(2) + "\n";
  };
  cases.push_back({"population_m3", "population_m3.json", population,
                   [population](const std::string& c) {
                     return DiffText(c, population());
                   }});

  auto simulate = [] {
    SimConfig config;
    config.seed = 42;
    return RenderSimulation(config, StrategySpec::Coba()).manifest_json;
  };
  cases.push_back({"simulate_seed42", "simulate_seed42_manifest.json", simulate,
                   [simulate](const std::string& c) { return DiffText(c, simulate()); }});

  auto compare = [] {
    SimConfig config;
    config.seed = 42;
    return ReportsToJson(compare_strategies(config, GoldenCompareStrategies()))
               .dump(2) +
           "\n";
  };
  cases.push_back({"compare_default", "compare_default.json", compare,
                   [compare](const std::string& c) { return DiffText(c, compare()); }});
  return cases;
}

struct VerifyOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline std::vector<VerifyOutcome> RunGoldenSuite(const std::string& dir) {
  std::vector<VerifyOutcome> out;
  for (const auto& gc : GoldenCases()) {
    VerifyOutcome o{gc.name, false, ""};
    const auto path = (std::filesystem::path(dir) / gc.file).string();
    try {
      const auto diff = gc.check(ReadFile(path));
      o.pass = !diff.has_value();
      if (diff) o.detail = *diff;
    } catch (const std::exception& e) {
      o.detail = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

// Rewrites every run-derived golden file; returns the files written.
inline std::vector<std::string> RegenerateGoldens(const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  for (const auto& gc : GoldenCases()) {
    if (!gc.produce) continue;
    const auto path = (std::filesystem::path(dir) / gc.file).string();
    WriteFile(path, gc.produce());
    written.push_back(path);
  }
  return written;
}

}  // namespace coba::cli
