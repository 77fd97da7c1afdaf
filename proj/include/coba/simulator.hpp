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

// Closed-loop training testbed.
//
// Each task has a hidden pass rate. Every step a strategy splits the rollout
// budget using the stored (one step stale) estimates, rollouts are drawn as
// Bernoulli trials, the store absorbs the outcomes and the hidden pass rates
// move under a simple learning model:
//
//   0 < p < 1:  p <- clip(p + eta * (1 - exp(-B / tau_l)) * p (1 - p), 0, 1)
//   p == 0:     p <- floor  with probability q * (1 - exp(-B / tau_l))
//   p == 1:     absorbing
//
// Everything is a pure function of SimConfig and StrategySpec.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <boost/random/beta_distribution.hpp>

#include "coba/allocator.hpp"
#include "coba/errors.hpp"
#include "coba/passrate_store.hpp"
#include "coba/rng.hpp"
#include "coba/value_core.hpp"

namespace coba {

enum class Bucket : int {
  kExtremelyHard = 0,
  kHard,
  kMedium,
  kEasy,
  kExtremelyEasy,
};

inline constexpr int kBucketCount = 5;

inline constexpr std::array<const char*, kBucketCount> kBucketNames = {
    "extremely_hard", "hard", "medium", "easy", "extremely_easy"};

// p = 0 | (0, 0.2] | (0.2, 0.8) | [0.8, 1) | p = 1
inline Bucket BucketOf(PassRate rate) {
  const double p = rate.value();
  if (p == 0.0) return Bucket::kExtremelyHard;
  if (p <= 0.2) return Bucket::kHard;
  if (p < 0.8) return Bucket::kMedium;
  if (p < 1.0) return Bucket::kEasy;
  return Bucket::kExtremelyEasy;
}

struct SimConfig {
  std::int64_t task_count = 512;
  std::int64_t steps = 200;
  AllocConfig alloc;
  CapabilityConfig capability;
  StoreConfig store;
  double learn_rate = 0.03;
  double learn_tau = 64.0;
  double breakthrough_prob = 0.02;
  double breakthrough_floor = 0.05;
  std::uint64_t seed = 42;
  // "uniform" | "beta" | "buckets"
  std::string sampler = "beta";
  double sampler_a = 1.0;
  double sampler_b = 2.0;
  std::array<double, kBucketCount> bucket_weights = {0.2, 0.2, 0.2, 0.2, 0.2};

  void Validate() const {
    if (task_count < 1) throw ConfigError("task_count must be >= 1");
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (!(learn_rate >= 0.0)) throw ConfigError("learn_rate must be >= 0");
    if (!(learn_tau > 0.0)) throw ConfigError("learn_tau must be > 0");
    if (!(breakthrough_prob >= 0.0 && breakthrough_prob <= 1.0)) {
      throw ConfigError("breakthrough_prob must lie in [0,1]");
    }
    if (!(breakthrough_floor >= 0.0 && breakthrough_floor <= 1.0)) {
      throw ConfigError("breakthrough_floor must lie in [0,1]");
    }
    if (sampler == "beta") {
      if (!(sampler_a > 0.0) || !(sampler_b > 0.0)) {
        throw ConfigError("beta sampler needs positive sampler_a, sampler_b");
      }
    } else if (sampler == "buckets") {
      double total = 0.0;
      for (double w : bucket_weights) {
        if (!(w >= 0.0)) throw ConfigError("bucket weights must be >= 0");
        total += w;
      }
      if (!(total > 0.0)) throw ConfigError("bucket weights sum to zero");
    } else if (sampler != "uniform") {
      throw ConfigError("unknown sampler '" + sampler + "'");
    }
    try {
      alloc.value_params.Validate();
      capability.Validate();
      store.Validate();
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
  }
};

struct LatentTask {
  std::string task_id;
  PassRate p_latent;
};

enum class StrategyKind { kCoba, kUniform, kStaticBeta, kLinearDecay };

struct StrategySpec {
  StrategyKind kind = StrategyKind::kCoba;
  // kStaticBeta
  double alpha = 1.0;
  double beta = 1.0;
  // kLinearDecay: alpha steps from decay_start to decay_end in unit stages.
  double decay_start = 10.0;
  double decay_end = 1.0;
  // kCoba: explore -> exploit variant.
  bool inverted = false;

  static StrategySpec Coba(bool inverted = false) {
    StrategySpec s;
    s.inverted = inverted;
    return s;
  }
  static StrategySpec Uniform() {
    StrategySpec s;
    s.kind = StrategyKind::kUniform;
    return s;
  }
  static StrategySpec StaticBeta(double alpha, double beta) {
    StrategySpec s;
    s.kind = StrategyKind::kStaticBeta;
    s.alpha = alpha;
    s.beta = beta;
    return s;
  }
  static StrategySpec LinearDecay(double start = 10.0, double end = 1.0) {
    StrategySpec s;
    s.kind = StrategyKind::kLinearDecay;
    s.decay_start = start;
    s.decay_end = end;
    return s;
  }

  std::string name() const;
};

inline std::string FormatShort(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

inline std::string StrategySpec::name() const {
  switch (kind) {
    case StrategyKind::kCoba: return inverted ? "coba_inverted" : "coba";
    case StrategyKind::kUniform: return "uniform";
    case StrategyKind::kStaticBeta:
      return "static(" + FormatShort(alpha) + "," + FormatShort(beta) + ")";
    case StrategyKind::kLinearDecay: return "linear_decay";
  }
  return "unknown";
}

struct StepMetrics {
  std::int64_t step = 0;
  double global_success = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double aggregate_value = 0.0;
  std::array<double, kBucketCount> budget_share{};
  std::array<std::int64_t, kBucketCount> task_count{};
};

// Initial-to-final difficulty bucket counts.
struct TransitionMatrix {
  std::array<std::array<std::int64_t, kBucketCount>, kBucketCount> counts{};

  std::int64_t row_total(int from) const {
    const auto& row = counts[static_cast<std::size_t>(from)];
    return std::accumulate(row.begin(), row.end(), std::int64_t{0});
  }

  // Row-normalized percentages; empty rows stay zero.
  std::array<std::array<double, kBucketCount>, kBucketCount> percentages()
      const {
    std::array<std::array<double, kBucketCount>, kBucketCount> out{};
    for (int i = 0; i < kBucketCount; ++i) {
      const std::int64_t total = row_total(i);
      if (total == 0) continue;
      for (int j = 0; j < kBucketCount; ++j) {
        out[i][j] = 100.0 * static_cast<double>(counts[i][j]) /
                    static_cast<double>(total);
      }
    }
    return out;
  }

  // Fraction of tasks starting in `from` that end in any of `to`.
  double conversion(Bucket from, std::initializer_list<Bucket> to) const {
    const int i = static_cast<int>(from);
    const std::int64_t total = row_total(i);
    if (total == 0) return 0.0;
    std::int64_t hit = 0;
    for (Bucket b : to) hit += counts[i][static_cast<std::size_t>(b)];
    return static_cast<double>(hit) / static_cast<double>(total);
  }
};

struct SimResult {
  std::vector<StepMetrics> metrics;
  TransitionMatrix transitions;
  std::string store_snapshot;
  std::vector<LatentTask> final_population;

  double final_latent_success() const {
    double sum = 0.0;
    for (const auto& t : final_population) sum += t.p_latent.value();
    return sum / static_cast<double>(final_population.size());
  }
};

namespace sim_detail {

enum Purpose : std::uint64_t { kPopulation = 1, kRollout = 2, kLearning = 3 };

inline std::string TaskId(std::int64_t i) {
  std::string digits = std::to_string(i);
  return "t" + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') +
         digits;
}

inline double SampleLatent(const SimConfig& config, SplitMix64& gen) {
  if (config.sampler == "uniform") return gen.NextDouble();
  if (config.sampler == "beta") {
    boost::random::beta_distribution<double> dist(config.sampler_a,
                                                  config.sampler_b);
    return std::clamp(dist(gen), 0.0, 1.0);
  }
  const auto& w = config.bucket_weights;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double pick = gen.NextDouble() * total;
  int bucket = -1;
  for (int b = 0; b < kBucketCount; ++b) {
    const double weight = w[static_cast<std::size_t>(b)];
    if (weight > 0.0 && pick < weight) {
      bucket = b;
      break;
    }
    pick -= weight;
  }
  if (bucket < 0) {
    // Rounding pushed the pick past the end: take the last weighted bucket.
    bucket = kBucketCount - 1;
    while (w[static_cast<std::size_t>(bucket)] == 0.0) --bucket;
  }
  const double u = gen.NextDouble();
  switch (static_cast<Bucket>(bucket)) {
    case Bucket::kExtremelyHard: return 0.0;
    case Bucket::kHard: return 0.2 * (1.0 - u);
    case Bucket::kMedium: return std::max(0.2 + 0.6 * u, std::nextafter(0.2, 1.0));
    case Bucket::kEasy: return 0.8 + 0.2 * u;
    case Bucket::kExtremelyEasy: return 1.0;
  }
  return u;
}

}  // namespace sim_detail

inline std::vector<LatentTask> init_population(const SimConfig& config) {
  config.Validate();
  std::vector<LatentTask> tasks;
  tasks.reserve(static_cast<std::size_t>(config.task_count));
  for (std::int64_t i = 0; i < config.task_count; ++i) {
    SplitMix64 gen = StreamFor(config.seed, sim_detail::kPopulation, 0,
                               static_cast<std::uint64_t>(i));
    tasks.push_back(
        {sim_detail::TaskId(i), PassRate(sim_detail::SampleLatent(config, gen))});
  }
  return tasks;
}

// Number of successes among `budget` Bernoulli(p_latent) draws.
inline std::int64_t simulate_rollouts(const LatentTask& task,
                                      std::int64_t budget, SplitMix64& rng) {
  if (budget < 1) throw InvalidInput("simulate_rollouts: budget must be >= 1");
  std::int64_t successes = 0;
  const double p = task.p_latent.value();
  for (std::int64_t k = 0; k < budget; ++k) {
    if (rng.NextDouble() < p) ++successes;
  }
  return successes;
}

inline LatentTask apply_learning(const LatentTask& task, std::int64_t budget,
                                 const SimConfig& config, SplitMix64& rng) {
  if (budget < 0) throw InvalidInput("apply_learning: negative budget");
  const double p = task.p_latent.value();
  const double effort =
      -std::expm1(-static_cast<double>(budget) / config.learn_tau);
  LatentTask out = task;
  if (p > 0.0 && p < 1.0) {
    out.p_latent = PassRate(
        std::clamp(p + config.learn_rate * effort * p * (1.0 - p), 0.0, 1.0));
  } else if (p == 0.0 && budget > 0) {
    if (rng.NextDouble() < config.breakthrough_prob * effort) {
      out.p_latent = PassRate(config.breakthrough_floor);
    }
  }
  return out;
}

// alpha for the unit staircase decay_start, decay_start - 1, ..., decay_end
// spread evenly over `steps`; leftover steps stay on the last stage.
inline double LinearDecayAlpha(const StrategySpec& spec, std::int64_t step,
                               std::int64_t steps) {
  const auto stages = static_cast<std::int64_t>(
      std::llround(std::abs(spec.decay_start - spec.decay_end))) + 1;
  const std::int64_t stage_len = std::max<std::int64_t>(1, steps / stages);
  const std::int64_t stage = std::min(stages - 1, (step - 1) / stage_len);
  const double direction = spec.decay_end < spec.decay_start ? -1.0 : 1.0;
  return spec.decay_start + direction * static_cast<double>(stage);
}

inline void ValidateStrategy(const StrategySpec& spec, const SimConfig& config) {
  switch (spec.kind) {
    case StrategyKind::kStaticBeta:
      if (!(spec.alpha > 0.0) || !(spec.beta > 0.0)) {
        throw ConfigError("static strategy needs positive alpha and beta");
      }
      break;
    case StrategyKind::kLinearDecay: {
      const double lo = std::min(spec.decay_start, spec.decay_end);
      const double hi = std::max(spec.decay_start, spec.decay_end);
      if (!(lo > 0.0) || !(hi < config.capability.kappa)) {
        throw ConfigError("linear decay alphas must lie in (0, kappa)");
      }
      break;
    }
    default: break;
  }
}

// Runs the loop on a given population.
inline SimResult run_simulation(const SimConfig& config,
                                const StrategySpec& strategy,
                                std::vector<LatentTask> population) {
  config.Validate();
  ValidateStrategy(strategy, config);
  if (population.empty()) throw ConfigError("empty population");
  const BudgetLimits limits = config.alloc.limits();
  if (auto v = check_feasibility(static_cast<std::int64_t>(population.size()),
                                 limits)) {
    throw Infeasible(v->message);
  }

  CapabilityConfig cap = config.capability;
  cap.inverted = strategy.inverted;
  CapabilityState capability(cap);
  PassRateStore store(config.store);

  std::vector<std::string> ids;
  ids.reserve(population.size());
  for (const auto& t : population) ids.push_back(t.task_id);

  SimResult result;
  result.metrics.reserve(static_cast<std::size_t>(config.steps));
  std::vector<Bucket> initial_bucket(population.size(), Bucket::kMedium);
  std::vector<PassRate> rates(population.size());
  std::vector<Outcome> outcomes(population.size());

  for (std::int64_t step = 1; step <= config.steps; ++step) {
    const std::vector<TaskStat> stats = store.get_estimates(ids);
    for (std::size_t i = 0; i < stats.size(); ++i) rates[i] = stats[i].estimate;

    BetaParams params;
    switch (strategy.kind) {
      case StrategyKind::kCoba:
        // Step 1 has no observations; keep the initial schedule.
        params = step == 1 ? capability.current() : capability.Update(rates);
        break;
      case StrategyKind::kUniform:
        params = BetaParams::Make(1.0, 1.0);
        break;
      case StrategyKind::kStaticBeta:
        params = BetaParams::Make(strategy.alpha, strategy.beta);
        break;
      case StrategyKind::kLinearDecay: {
        const double alpha = LinearDecayAlpha(strategy, step, config.steps);
        params = BetaParams::Make(alpha, cap.kappa - alpha);
        break;
      }
    }
    const CobaValueModel model{ValueParams{config.alloc.value_params.tau, params}};
    const Allocation alloc = strategy.kind == StrategyKind::kUniform
                                 ? allocate_uniform(stats, limits, model)
                                 : allocate_greedy(stats, limits, model);

    StepMetrics m;
    m.step = step;
    m.alpha = params.alpha;
    m.beta = params.beta;
    m.aggregate_value = alloc.aggregate_value;
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const auto b = static_cast<std::size_t>(BucketOf(stats[i].estimate));
      m.budget_share[b] += static_cast<double>(alloc.budgets[i]);
      m.task_count[b] += 1;
    }
    for (double& share : m.budget_share) {
      share /= static_cast<double>(limits.total);
    }

    for (std::size_t i = 0; i < population.size(); ++i) {
      SplitMix64 rng = StreamFor(config.seed, sim_detail::kRollout,
                                 static_cast<std::uint64_t>(step), i);
      outcomes[i] = Outcome{ids[i],
                            simulate_rollouts(population[i], alloc.budgets[i], rng),
                            alloc.budgets[i]};
    }
    store.update_outcomes(outcomes);

    for (std::size_t i = 0; i < population.size(); ++i) {
      SplitMix64 rng = StreamFor(config.seed, sim_detail::kLearning,
                                 static_cast<std::uint64_t>(step), i);
      population[i] = apply_learning(population[i], alloc.budgets[i], config, rng);
    }

    double success = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const PassRate estimate = store.get(ids[i]).estimate;
      success += estimate.value();
      if (step == 1) initial_bucket[i] = BucketOf(estimate);
    }
    m.global_success = success / static_cast<double>(ids.size());
    result.metrics.push_back(m);
  }

  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto from = static_cast<std::size_t>(initial_bucket[i]);
    const auto to = static_cast<std::size_t>(BucketOf(store.get(ids[i]).estimate));
    result.transitions.counts[from][to] += 1;
  }
  result.store_snapshot = store.snapshot();
  result.final_population = std::move(population);
  return result;
}

inline SimResult run_simulation(const SimConfig& config,
                                const StrategySpec& strategy) {
  return run_simulation(config, strategy, init_population(config));
}

struct StrategyReport {
  std::string strategy;
  double final_success = 0.0;
  double final_latent_success = 0.0;
  double final_alpha = 0.0;
  std::vector<double> value_trajectory;
  // Share of tasks leaving hard/medium for easier buckets.
  double hard_conversion = 0.0;
  double medium_conversion = 0.0;
  TransitionMatrix transitions;
};

inline StrategyReport Summarize(const StrategySpec& spec, const SimResult& r) {
  StrategyReport rep;
  rep.strategy = spec.name();
  rep.final_success = r.metrics.back().global_success;
  rep.final_latent_success = r.final_latent_success();
  rep.final_alpha = r.metrics.back().alpha;
  for (const auto& m : r.metrics) rep.value_trajectory.push_back(m.aggregate_value);
  rep.hard_conversion = r.transitions.conversion(
      Bucket::kHard, {Bucket::kMedium, Bucket::kEasy, Bucket::kExtremelyEasy});
  rep.medium_conversion = r.transitions.conversion(
      Bucket::kMedium, {Bucket::kEasy, Bucket::kExtremelyEasy});
  rep.transitions = r.transitions;
  return rep;
}

// Every strategy sees the same population and seed.
inline std::vector<StrategyReport> compare_strategies(
    const SimConfig& config, const std::vector<StrategySpec>& strategies) {
  if (strategies.size() < 2) {
    throw InvalidInput("compare_strategies needs at least two strategies");
  }
  const std::vector<LatentTask> population = init_population(config);
  std::vector<StrategyReport> reports;
  reports.reserve(strategies.size());
  for (const auto& spec : strategies) {
    reports.push_back(Summarize(spec, run_simulation(config, spec, population)));
  }
  return reports;
}

}  // namespace coba
