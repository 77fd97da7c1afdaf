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

// Command-line front end. Exit codes: 0 success, 1 verification failure,
// 2 input or schema error, 3 infeasible budget constraints. Payloads go to
// stdout, diagnostics to stderr.

#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_io.hpp"
#include "coba/coba.hpp"
#include "golden.hpp"
#include "json.hpp"

#ifndef COBA_GOLDEN_DIR
#define COBA_GOLDEN_DIR "tests/golden"
#endif

namespace coba::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kInputError = 2,
  kInfeasible = 3,
};

inline StrategySpec ParseStrategyName(const std::string& text, double alpha,
                                      double beta) {
  if (text == "coba") return StrategySpec::Coba();
  if (text == "coba_inverted") return StrategySpec::Coba(true);
  if (text == "uniform") return StrategySpec::Uniform();
  if (text == "linear_decay") return StrategySpec::LinearDecay();
  if (text == "static") return StrategySpec::StaticBeta(alpha, beta);
  // static:<alpha>:<beta>
  if (text.rfind("static:", 0) == 0) {
    const auto second = text.find(':', 7);
    if (second != std::string::npos) {
      try {
        return StrategySpec::StaticBeta(std::stod(text.substr(7, second - 7)),
                                        std::stod(text.substr(second + 1)));
      } catch (const std::exception&) {
      }
    }
  }
  throw InputError("unknown strategy '" + text + "'");
}

inline nlohmann::json LoadJsonFile(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

struct AllocateArgs {
  std::string input;
  std::string output;
  std::string solver = "greedy";
  std::int64_t b_total = 0;
  std::int64_t group_size = 16;
  std::int64_t b_low = 2;
  std::int64_t b_up = 128;
  double tau = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double kappa = 11.0;
  double gamma = 10.0;
  CLI::Option* b_total_opt = nullptr;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* beta_opt = nullptr;
};

inline int CmdAllocate(const AllocateArgs& args, std::ostream& out) {
  const auto rows = ParsePassRateFile(args.input);
  const std::vector<TaskStat> tasks = ToTaskStats(rows);

  BetaParams params;
  const bool has_alpha = args.alpha_opt->count() > 0;
  const bool has_beta = args.beta_opt->count() > 0;
  if (has_alpha != has_beta) throw InputError("--alpha and --beta go together");
  if (has_alpha) {
    params = BetaParams::Make(args.alpha, args.beta);
  } else {
    CapabilityConfig cap;
    cap.kappa = args.kappa;
    cap.gamma = args.gamma;
    CapabilityState state(cap);
    std::vector<PassRate> rates;
    for (const auto& t : tasks) rates.push_back(t.estimate);
    params = state.Update(rates);
  }

  AllocConfig config;
  config.b_low = args.b_low;
  config.b_up = args.b_up;
  config.b_total = args.b_total_opt->count() > 0
                       ? args.b_total
                       : args.group_size * static_cast<std::int64_t>(tasks.size());
  const double tau = args.tau_opt->count() > 0
                         ? args.tau
                         : static_cast<double>(args.b_up) / 8.0;
  config.value_params = ValueParams{tau, params};
  config.value_params.Validate();

  Allocation alloc;
  if (args.solver == "greedy") {
    alloc = allocate_greedy(tasks, config);
  } else if (args.solver == "dp") {
    alloc = allocate_dp(tasks, config);
  } else if (args.solver == "brute") {
    alloc = allocate_brute(tasks, config);
  } else {
    throw InputError("unknown solver '" + args.solver + "'");
  }

  const std::string payload = AllocationJson(alloc, params);
  if (args.output.empty()) {
    out << payload;
  } else {
    WriteFile(args.output, payload);
  }
  return kOk;
}

struct SimulateArgs {
  std::string config;
  std::string strategy;
  std::string out_dir = ".";
  double alpha = 10.5;
  double beta = 1.5;
};

// Accepts either a flat config or a manifest written by a previous run.
inline std::pair<SimConfig, StrategySpec> ResolveSimulation(
    const std::string& path, const std::string& strategy_flag, double alpha,
    double beta) {
  const nlohmann::json doc = LoadJsonFile(path);
  const bool manifest = doc.is_object() && doc.contains("config") &&
                        doc.contains("strategy");
  const SimConfig config = ParseSimConfig(manifest ? doc["config"] : doc);
  StrategySpec strategy = StrategySpec::Coba();
  if (!strategy_flag.empty()) {
    strategy = ParseStrategyName(strategy_flag, alpha, beta);
  } else if (manifest) {
    strategy = StrategyFromJson(doc["strategy"]);
  }
  return {config, strategy};
}

inline int CmdSimulate(const SimulateArgs& args, std::ostream& out) {
  const auto [config, strategy] =
      ResolveSimulation(args.config, args.strategy, args.alpha, args.beta);
  const SimArtifacts a = RenderSimulation(config, strategy);
  const std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);
  WriteFile((dir / "metrics.csv").string(), a.metrics_csv);
  WriteFile((dir / "transition.json").string(), a.transition_json);
  WriteFile((dir / "store.json").string(), a.store_json);
  WriteFile((dir / "manifest.json").string(), a.manifest_json);
  nlohmann::ordered_json summary;
  summary["strategy"] = strategy.name();
  summary["final_success"] = a.final_success;
  summary["final_alpha"] = a.final_alpha;
  out << summary.dump() << "\n";
  return kOk;
}

struct CompareArgs {
  std::string config;
  std::string strategies = "coba,static:10.5:1.5,static:1.5:10.5,linear_decay";
  std::string output;
};

inline int CmdCompare(const CompareArgs& args, std::ostream& out) {
  const auto [config, ignored] = ResolveSimulation(args.config, "", 0, 0);
  std::vector<StrategySpec> specs;
  std::size_t start = 0;
  while (start <= args.strategies.size()) {
    const auto comma = args.strategies.find(',', start);
    const std::string item = args.strategies.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) specs.push_back(ParseStrategyName(item, 10.5, 1.5));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  const std::string payload =
      ReportsToJson(compare_strategies(config, specs)).dump(2) + "\n";
  if (args.output.empty()) {
    out << payload;
  } else {
    WriteFile(args.output, payload);
  }
  return kOk;
}

struct BenchArgs {
  std::int64_t m = 512;
  std::int64_t b_total = 0;
  std::int64_t b_low = 2;
  std::int64_t b_up = 128;
  int repeats = 3;
  std::uint64_t seed = 7;
  std::size_t dp_memory_cap = std::size_t{1} << 30;
  bool json = false;
  CLI::Option* b_total_opt = nullptr;
};

struct BenchReport {
  double greedy_median_s = 0.0;
  std::optional<double> dp_median_s;
  bool equal_value = false;
  double greedy_value = 0.0;
  double dp_value = 0.0;
};

// Synthetic bench instance: pass rates uniform on [0,1) from a fixed seed.
inline std::vector<TaskStat> BenchTasks(std::int64_t m, std::uint64_t seed) {
  std::vector<TaskStat> tasks;
  for (std::int64_t i = 0; i < m; ++i) {
    SplitMix64 gen = StreamFor(seed, 0xbe7c, 0, static_cast<std::uint64_t>(i));
    tasks.push_back({"t" + std::to_string(i), 0, 0, PassRate(gen.NextDouble())});
  }
  return tasks;
}

inline double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline BenchReport RunBench(const std::vector<TaskStat>& tasks,
                            const AllocConfig& config, int repeats,
                            std::size_t dp_memory_cap) {
  using Clock = std::chrono::steady_clock;
  BenchReport report;
  std::vector<double> greedy_times;
  std::vector<double> dp_times;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    const Allocation g = allocate_greedy(tasks, config);
    greedy_times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    report.greedy_value = g.aggregate_value;
  }
  report.greedy_median_s = Median(greedy_times);
  if (DpTableBytes(tasks.size(), config.limits()) <= dp_memory_cap) {
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = Clock::now();
      const Allocation d = allocate_dp(tasks, config, DpOptions{dp_memory_cap});
      dp_times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
      report.dp_value = d.aggregate_value;
    }
    report.dp_median_s = Median(dp_times);
    report.equal_value = std::abs(report.dp_value - report.greedy_value) <= 1e-9;
  }
  return report;
}

inline AllocConfig BenchConfig(const std::vector<TaskStat>& tasks,
                               std::int64_t b_total, std::int64_t b_low,
                               std::int64_t b_up) {
  std::vector<PassRate> rates;
  for (const auto& t : tasks) rates.push_back(t.estimate);
  CapabilityState state;
  AllocConfig config;
  config.b_total = b_total;
  config.b_low = b_low;
  config.b_up = b_up;
  config.value_params = ValueParams{static_cast<double>(b_up) / 8.0,
                                    state.Update(rates)};
  return config;
}

inline int CmdBench(const BenchArgs& args, std::ostream& out) {
  if (args.m < 1) throw InputError("--m must be >= 1");
  if (args.repeats < 1) throw InputError("--repeats must be >= 1");
  const std::int64_t b_total = args.b_total_opt->count() > 0 ? args.b_total : 16 * args.m;
  if (auto v = check_feasibility(args.m, BudgetLimits{b_total, args.b_low, args.b_up})) {
    throw Infeasible(v->message);
  }
  const auto tasks = BenchTasks(args.m, args.seed);
  const AllocConfig config = BenchConfig(tasks, b_total, args.b_low, args.b_up);
  const BenchReport r = RunBench(tasks, config, args.repeats, args.dp_memory_cap);

  nlohmann::ordered_json doc;
  doc["m"] = args.m;
  doc["b_total"] = b_total;
  doc["b_low"] = args.b_low;
  doc["b_up"] = args.b_up;
  doc["repeats"] = args.repeats;
  doc["greedy_median_s"] = r.greedy_median_s;
  if (r.dp_median_s) {
    doc["dp_median_s"] = *r.dp_median_s;
    doc["ratio"] = *r.dp_median_s / std::max(r.greedy_median_s, 1e-12);
    doc["equal_value"] = r.equal_value;
  } else {
    doc["dp_median_s"] = nullptr;
    doc["ratio"] = nullptr;
    doc["equal_value"] = nullptr;
  }
  if (args.json) {
    out << doc.dump() << "\n";
  } else {
    for (const auto& [key, value] : doc.items()) {
      out << key << "=" << value.dump() << "\n";
    }
  }
  return kOk;
}

struct VerifyArgs {
  std::string golden_dir = COBA_GOLDEN_DIR;
  bool regenerate = false;
};

inline int CmdVerify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  if (args.regenerate) {
    for (const auto& path : RegenerateGoldens(args.golden_dir)) {
      err << "wrote " << path << "\n";
    }
  }
  bool all = true;
  nlohmann::ordered_json doc;
  auto cases = nlohmann::ordered_json::array();
  for (const auto& o : RunGoldenSuite(args.golden_dir)) {
    cases.push_back({{"case", o.name}, {"pass", o.pass}});
    if (!o.pass) {
      all = false;
      err << "FAIL " << o.name << "\n" << o.detail << "\n";
    }
  }
  doc["pass"] = all;
  doc["cases"] = std::move(cases);
  out << doc.dump() << "\n";
  return all ? kOk : kVerifyFailed;
}

// argv[0] excluded.
inline int RunCli(std::vector<std::string> args, std::ostream& out,
                  std::ostream& err) {
  CLI::App app{"Capability-oriented rollout budget allocation", "coba"};
  app.require_subcommand(1);

  AllocateArgs alloc;
  auto* allocate = app.add_subcommand("allocate", "Allocate rollouts for a pass-rate file");
  allocate->add_option("--input", alloc.input, "CSV (task_id,pass_rate) or JSON [{id,p}]")
      ->required();
  allocate->add_option("--output", alloc.output, "Write JSON here instead of stdout");
  allocate->add_option("--solver", alloc.solver, "greedy | dp | brute")
      ->capture_default_str();
  alloc.b_total_opt = allocate->add_option("--b-total", alloc.b_total,
                                           "Total budget (default group-size * M)");
  allocate->add_option("--group-size", alloc.group_size)->capture_default_str();
  allocate->add_option("--b-low", alloc.b_low)->capture_default_str();
  allocate->add_option("--b-up", alloc.b_up)->capture_default_str();
  alloc.tau_opt = allocate->add_option("--tau", alloc.tau, "Saturation temperature (default b_up/8)");
  alloc.alpha_opt = allocate->add_option("--alpha", alloc.alpha, "Fixed Beta alpha");
  alloc.beta_opt = allocate->add_option("--beta", alloc.beta, "Fixed Beta beta");
  allocate->add_option("--kappa", alloc.kappa)->capture_default_str();
  allocate->add_option("--gamma", alloc.gamma)->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a seeded training simulation");
  simulate->add_option("--config", sim.config, "JSON config or a previous manifest")
      ->required();
  simulate->add_option("--strategy", sim.strategy,
                       "coba | coba_inverted | uniform | static | linear_decay");
  simulate->add_option("--alpha", sim.alpha, "alpha for --strategy static")
      ->capture_default_str();
  simulate->add_option("--beta", sim.beta, "beta for --strategy static")
      ->capture_default_str();
  simulate->add_option("--out-dir", sim.out_dir)->capture_default_str();

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Run several strategies on one population");
  compare->add_option("--config", cmp.config)->required();
  compare->add_option("--strategies", cmp.strategies, "Comma list; static:<a>:<b>")
      ->capture_default_str();
  compare->add_option("--output", cmp.output);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time greedy against dynamic programming");
  bench_cmd->add_option("--m", bench.m)->capture_default_str();
  bench.b_total_opt = bench_cmd->add_option("--b-total", bench.b_total, "default 16 * m");
  bench_cmd->add_option("--b-low", bench.b_low)->capture_default_str();
  bench_cmd->add_option("--b-up", bench.b_up)->capture_default_str();
  bench_cmd->add_option("--repeats", bench.repeats)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--dp-memory-cap", bench.dp_memory_cap, "bytes")
      ->capture_default_str();
  bench_cmd->add_flag("--json", bench.json);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check the golden-file suite");
  verify_cmd->add_option("--golden-dir", verify.golden_dir)->capture_default_str();
  verify_cmd->add_flag("--regenerate", verify.regenerate,
                       "Rewrite run-derived golden files first");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (allocate->parsed()) return CmdAllocate(alloc, out);
    if (simulate->parsed()) return CmdSimulate(sim, out);
    if (compare->parsed()) return CmdCompare(cmp, out);
    if (bench_cmd->parsed()) return CmdBench(bench, out);
    if (verify_cmd->parsed()) return CmdVerify(verify, out, err);
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace coba::cli
