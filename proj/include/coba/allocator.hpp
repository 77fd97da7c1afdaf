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

// Integer rollout-budget allocation.
//
//   maximize    sum_i V(B_i, p_i)
//   subject to  sum_i B_i = b_total,  b_low <= B_i <= b_up,  B_i integer.
//
// Three solvers share one value definition (a ValueModel):
//
//   allocate_greedy  max-heap of marginal gains, O(b_total log M). Exact
//                    whenever every per-task gain sequence is non-increasing.
//   allocate_dp      pseudo-polynomial table, O(M * R * (b_up - b_low)) with
//                    R = b_total - M * b_low.
//   allocate_brute   exhaustive enumeration; a test oracle for tiny instances.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "coba/errors.hpp"
#include "coba/passrate_store.hpp"
#include "coba/value_core.hpp"

namespace coba {

struct BudgetLimits {
  std::int64_t total = 0;
  std::int64_t low = 1;
  std::int64_t up = 1;
};

struct AllocConfig {
  std::int64_t b_total = 8192;
  std::int64_t b_low = 2;
  std::int64_t b_up = 128;
  ValueParams value_params;

  BudgetLimits limits() const { return {b_total, b_low, b_up}; }
};

enum class Strategy { kGreedy, kDp, kBrute, kUniform };

inline const char* StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kGreedy: return "greedy";
    case Strategy::kDp: return "dp";
    case Strategy::kBrute: return "brute";
    case Strategy::kUniform: return "uniform";
  }
  return "unknown";
}

// Budgets are index-aligned with the task list the solver was given.
struct Allocation {
  std::vector<std::string> task_ids;
  std::vector<std::int64_t> budgets;
  double aggregate_value = 0.0;
  Strategy strategy = Strategy::kGreedy;

  std::int64_t total() const {
    std::int64_t sum = 0;
    for (auto b : budgets) sum += b;
    return sum;
  }
};

struct Violation {
  enum class Kind {
    kLowBelowOne,
    kBoundsInverted,
    kTotalBelowFloor,
    kTotalAboveCeiling,
  };
  Kind kind;
  std::string message;
};

// Checks 1 <= b_low <= b_up and M * b_low <= b_total <= M * b_up.
inline std::optional<Violation> check_feasibility(std::int64_t task_count,
                                                  const BudgetLimits& limits) {
  using Kind = Violation::Kind;
  if (task_count < 0) throw InvalidInput("negative task count");
  if (limits.low < 1) {
    return Violation{Kind::kLowBelowOne,
                     "b_low >= 1 violated (b_low=" + std::to_string(limits.low) +
                         ")"};
  }
  if (limits.low > limits.up) {
    return Violation{Kind::kBoundsInverted,
                     "b_low <= b_up violated (b_low=" +
                         std::to_string(limits.low) +
                         ", b_up=" + std::to_string(limits.up) + ")"};
  }
  const std::int64_t floor = task_count * limits.low;
  const std::int64_t ceiling = task_count * limits.up;
  if (limits.total < floor) {
    return Violation{Kind::kTotalBelowFloor,
                     "total below floor: b_total=" +
                         std::to_string(limits.total) + " < M*b_low=" +
                         std::to_string(floor)};
  }
  if (limits.total > ceiling) {
    return Violation{Kind::kTotalAboveCeiling,
                     "total above ceiling: b_total=" +
                         std::to_string(limits.total) + " > M*b_up=" +
                         std::to_string(ceiling)};
  }
  return std::nullopt;
}

inline std::optional<Violation> check_feasibility(std::int64_t task_count,
                                                  const AllocConfig& config) {
  return check_feasibility(task_count, config.limits());
}

namespace detail {

inline void RequireFeasible(std::span<const TaskStat> tasks,
                            const BudgetLimits& limits) {
  if (tasks.empty()) throw InvalidInput("allocation needs at least one task");
  if (auto v = check_feasibility(static_cast<std::int64_t>(tasks.size()),
                                 limits)) {
    throw Infeasible(v->message);
  }
}

template <ValueModel Model>
auto MakeCurves(std::span<const TaskStat> tasks, const Model& model) {
  std::vector<decltype(model.curve(PassRate{}))> curves;
  curves.reserve(tasks.size());
  for (const auto& t : tasks) curves.push_back(model.curve(t.estimate));
  return curves;
}

template <class Curves>
double AggregateValue(const Curves& curves,
                      std::span<const std::int64_t> budgets) {
  double sum = 0.0;
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    sum += curves[i].value(budgets[i]);
  }
  return sum;
}

template <class Curves>
Allocation Finish(std::span<const TaskStat> tasks, const Curves& curves,
                  std::vector<std::int64_t> budgets, Strategy strategy) {
  Allocation out;
  out.task_ids.reserve(tasks.size());
  for (const auto& t : tasks) out.task_ids.push_back(t.task_id);
  out.aggregate_value = AggregateValue(curves, budgets);
  out.budgets = std::move(budgets);
  out.strategy = strategy;
  return out;
}

}  // namespace detail

// Sum of model values for a given budget vector.
template <ValueModel Model>
double aggregate_value(std::span<const TaskStat> tasks,
                       std::span<const std::int64_t> budgets,
                       const Model& model) {
  if (tasks.size() != budgets.size()) {
    throw InvalidInput("aggregate_value: size mismatch");
  }
  return detail::AggregateValue(detail::MakeCurves(tasks, model), budgets);
}

// Larger gain first; equal gains resolve to the smaller task index.
struct HeapEntry {
  double gain;
  std::size_t task_index;
};

struct HeapEntryLess {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.task_index > b.task_index;
  }
};

template <ValueModel Model>
Allocation allocate_greedy(std::span<const TaskStat> tasks,
                           const BudgetLimits& limits, const Model& model) {
  detail::RequireFeasible(tasks, limits);
  const auto curves = detail::MakeCurves(tasks, model);
  const std::size_t m = tasks.size();

  std::vector<std::int64_t> budgets(m, limits.low);
  std::int64_t residual = limits.total - static_cast<std::int64_t>(m) * limits.low;

  std::vector<HeapEntry> storage;
  storage.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (budgets[i] < limits.up) storage.push_back({curves[i].gain(budgets[i]), i});
  }
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapEntryLess> heap(
      HeapEntryLess{}, std::move(storage));

  while (residual > 0 && !heap.empty()) {
    const std::size_t i = heap.top().task_index;
    heap.pop();
    ++budgets[i];
    if (budgets[i] < limits.up) heap.push({curves[i].gain(budgets[i]), i});
    --residual;
  }
  // Feasibility guarantees the heap outlives the residual.
  return detail::Finish(tasks, curves, std::move(budgets), Strategy::kGreedy);
}

inline Allocation allocate_greedy(std::span<const TaskStat> tasks,
                                  const AllocConfig& config) {
  return allocate_greedy(tasks, config.limits(),
                         CobaValueModel{config.value_params});
}

struct DpOptions {
  // Upper bound on the table footprint in bytes.
  std::size_t memory_cap_bytes = std::size_t{1} << 30;
};

inline std::size_t DpTableBytes(std::size_t task_count,
                                const BudgetLimits& limits) {
  const auto residual = static_cast<std::size_t>(
      limits.total - static_cast<std::int64_t>(task_count) * limits.low);
  const auto span = static_cast<std::size_t>(limits.up - limits.low);
  return task_count * (residual + 1) * sizeof(std::uint32_t) +
         2 * (residual + 1) * sizeof(double) + (span + 1) * sizeof(double);
}

// f(i, r) = best value of the first i tasks using r budget above the floor.
template <ValueModel Model>
Allocation allocate_dp(std::span<const TaskStat> tasks,
                       const BudgetLimits& limits, const Model& model,
                       const DpOptions& options = {}) {
  detail::RequireFeasible(tasks, limits);
  const std::size_t m = tasks.size();
  const std::size_t bytes = DpTableBytes(m, limits);
  if (bytes > options.memory_cap_bytes) {
    throw ResourceLimit("dp table needs " + std::to_string(bytes) +
                        " bytes, cap is " +
                        std::to_string(options.memory_cap_bytes));
  }
  const auto curves = detail::MakeCurves(tasks, model);
  const auto residual = static_cast<std::size_t>(
      limits.total - static_cast<std::int64_t>(m) * limits.low);
  const auto span = static_cast<std::size_t>(limits.up - limits.low);
  const double kUnreachable = -std::numeric_limits<double>::infinity();

  std::vector<double> prev(residual + 1, kUnreachable);
  std::vector<double> cur(residual + 1, kUnreachable);
  std::vector<std::uint32_t> choice(m * (residual + 1), 0);
  std::vector<double> values(span + 1);
  prev[0] = 0.0;

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t x = 0; x <= span; ++x) {
      values[x] = curves[i].value(limits.low + static_cast<std::int64_t>(x));
    }
    // Before task i at most i * span extra units can have been placed.
    const std::size_t reach_before = std::min(residual, i * span);
    const std::size_t reach_after = std::min(residual, reach_before + span);
    std::uint32_t* row = choice.data() + i * (residual + 1);
    for (std::size_t r = 0; r <= reach_after; ++r) {
      const std::size_t x_lo = r > reach_before ? r - reach_before : 0;
      const std::size_t x_hi = std::min(span, r);
      double best = kUnreachable;
      std::size_t best_x = x_lo;
      for (std::size_t x = x_lo; x <= x_hi; ++x) {
        const double candidate = prev[r - x] + values[x];
        if (candidate > best) {
          best = candidate;
          best_x = x;
        }
      }
      cur[r] = best;
      row[r] = static_cast<std::uint32_t>(best_x);
    }
    std::fill(cur.begin() + static_cast<std::ptrdiff_t>(reach_after) + 1,
              cur.end(), kUnreachable);
    std::swap(prev, cur);
  }

  std::vector<std::int64_t> budgets(m);
  std::size_t r = residual;
  for (std::size_t i = m; i-- > 0;) {
    const std::size_t x = choice[i * (residual + 1) + r];
    budgets[i] = limits.low + static_cast<std::int64_t>(x);
    r -= x;
  }
  return detail::Finish(tasks, curves, std::move(budgets), Strategy::kDp);
}

inline Allocation allocate_dp(std::span<const TaskStat> tasks,
                              const AllocConfig& config,
                              const DpOptions& options = {}) {
  return allocate_dp(tasks, config.limits(), CobaValueModel{config.value_params},
                     options);
}

struct BruteOptions {
  // Maximum number of candidate vectors, (b_up - b_low + 1)^M.
  std::uint64_t step_cap = 10'000'000;
};

// Exhaustive search. Among equal values the lexicographically smallest
// budget vector wins.
template <ValueModel Model>
Allocation allocate_brute(std::span<const TaskStat> tasks,
                          const BudgetLimits& limits, const Model& model,
                          const BruteOptions& options = {}) {
  detail::RequireFeasible(tasks, limits);
  const std::size_t m = tasks.size();
  const auto width = static_cast<std::uint64_t>(limits.up - limits.low + 1);
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (space > options.step_cap / width) {
      throw ResourceLimit("brute force space exceeds step cap " +
                          std::to_string(options.step_cap));
    }
    space *= width;
  }
  if (space > options.step_cap) {
    throw ResourceLimit("brute force space exceeds step cap " +
                        std::to_string(options.step_cap));
  }

  const auto curves = detail::MakeCurves(tasks, model);
  std::vector<std::int64_t> current(m, limits.low);
  std::vector<std::int64_t> best;
  double best_value = -std::numeric_limits<double>::infinity();

  // Lexicographic depth-first walk; the remaining sum prunes dead branches.
  auto walk = [&](auto&& self, std::size_t i, std::int64_t remaining) -> void {
    const auto left = static_cast<std::int64_t>(m - i);
    if (i == m) {
      if (remaining != 0) return;
      const double v = detail::AggregateValue(curves, current);
      if (v > best_value) {
        best_value = v;
        best = current;
      }
      return;
    }
    for (std::int64_t b = limits.low; b <= limits.up; ++b) {
      const std::int64_t rest = remaining - b;
      if (rest < (left - 1) * limits.low) break;
      if (rest > (left - 1) * limits.up) continue;
      current[i] = b;
      self(self, i + 1, rest);
    }
  };
  walk(walk, 0, limits.total);
  return detail::Finish(tasks, curves, std::move(best), Strategy::kBrute);
}

inline Allocation allocate_brute(std::span<const TaskStat> tasks,
                                 const AllocConfig& config,
                                 const BruteOptions& options = {}) {
  return allocate_brute(tasks, config.limits(),
                        CobaValueModel{config.value_params}, options);
}

// Equal split, remainder handed out one unit at a time by task index.
template <ValueModel Model>
Allocation allocate_uniform(std::span<const TaskStat> tasks,
                            const BudgetLimits& limits, const Model& model) {
  detail::RequireFeasible(tasks, limits);
  const auto m = static_cast<std::int64_t>(tasks.size());
  const std::int64_t base = limits.total / m;
  const std::int64_t extra = limits.total % m;
  std::vector<std::int64_t> budgets(tasks.size(), base);
  for (std::int64_t i = 0; i < extra; ++i) ++budgets[static_cast<std::size_t>(i)];
  return detail::Finish(tasks, detail::MakeCurves(tasks, model),
                        std::move(budgets), Strategy::kUniform);
}

}  // namespace coba
