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

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coba/errors.hpp"
#include "coba/pass_rate.hpp"
#include "json.hpp"

namespace coba {

// A task's cumulative rollout counts and its smoothed pass-rate estimate.
struct TaskStat {
  std::string task_id;
  std::int64_t successes = 0;
  std::int64_t attempts = 0;
  PassRate estimate;

  friend bool operator==(const TaskStat& a, const TaskStat& b) {
    return a.task_id == b.task_id && a.successes == b.successes &&
           a.attempts == b.attempts &&
           a.estimate.value() == b.estimate.value();
  }
};

// Rollout outcomes observed for one task at one step.
struct Outcome {
  std::string task_id;
  std::int64_t successes = 0;
  std::int64_t attempts = 0;
};

struct StoreConfig {
  PassRate prior{0.5};
  // Weight of the newest batch rate in the moving average.
  double smoothing = 1.0;

  void Validate() const {
    if (!(smoothing > 0.0 && smoothing <= 1.0)) {
      throw InvalidInput("smoothing must lie in (0,1]");
    }
  }
};

// Per-task pass-rate estimates that feed the allocator. Single writer;
// concurrent get_estimates() calls are safe.
class PassRateStore {
 public:
  static constexpr int kSchemaVersion = 1;

  explicit PassRateStore(StoreConfig config = {}) : config_(config) {
    config_.Validate();
  }

  const StoreConfig& config() const { return config_; }
  std::size_t size() const { return tasks_.size(); }

  TaskStat get(const std::string& id) const {
    auto it = tasks_.find(id);
    if (it == tasks_.end()) return TaskStat{id, 0, 0, config_.prior};
    return it->second;
  }

  std::vector<TaskStat> get_estimates(std::span<const std::string> ids) const {
    std::vector<TaskStat> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(get(id));
    return out;
  }

  // e <- s * (successes / attempts) + (1 - s) * e. Validates the whole batch
  // before touching any state.
  void update_outcomes(std::span<const Outcome> batch) {
    std::set<std::string_view> seen;
    for (const Outcome& o : batch) {
      if (o.attempts < 1 || o.successes < 0 || o.successes > o.attempts) {
        throw InvalidInput("task '" + o.task_id + "': invalid counts " +
                           std::to_string(o.successes) + "/" +
                           std::to_string(o.attempts));
      }
      if (!seen.insert(o.task_id).second) {
        throw InvalidInput("task '" + o.task_id + "' appears twice in batch");
      }
    }
    const double s = config_.smoothing;
    for (const Outcome& o : batch) {
      TaskStat& stat = tasks_.try_emplace(o.task_id, TaskStat{o.task_id, 0, 0,
                                                              config_.prior})
                           .first->second;
      const double rate = PassRate::FromCounts(o.successes, o.attempts).value();
      const double blended = s * rate + (1.0 - s) * stat.estimate.value();
      stat.estimate = PassRate(std::clamp(blended, 0.0, 1.0));
      stat.successes += o.successes;
      stat.attempts += o.attempts;
    }
  }

  nlohmann::ordered_json ToJson() const {
    nlohmann::ordered_json doc;
    doc["version"] = kSchemaVersion;
    doc["prior"] = config_.prior.value();
    doc["smoothing"] = config_.smoothing;
    auto tasks = nlohmann::ordered_json::array();
    for (const auto& [id, stat] : tasks_) {
      tasks.push_back({{"id", id},
                       {"successes", stat.successes},
                       {"attempts", stat.attempts},
                       {"estimate", stat.estimate.value()}});
    }
    doc["tasks"] = std::move(tasks);
    return doc;
  }

  std::string snapshot() const { return ToJson().dump(); }

  static PassRateStore restore(const std::string& blob) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(blob);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("store snapshot: ") + e.what());
    }
    return FromJson(doc);
  }

  static PassRateStore FromJson(const nlohmann::json& doc) {
    try {
      if (!doc.is_object() || !doc.contains("version")) {
        throw FormatError("store snapshot: missing version");
      }
      if (!doc.at("version").is_number_integer() ||
          doc.at("version").get<int>() != kSchemaVersion) {
        throw FormatError("store snapshot: unsupported version " +
                          doc.at("version").dump());
      }
      StoreConfig config;
      config.prior = PassRate(doc.at("prior").get<double>());
      config.smoothing = doc.at("smoothing").get<double>();
      PassRateStore store(config);
      for (const auto& t : doc.at("tasks")) {
        TaskStat stat{t.at("id").get<std::string>(),
                      t.at("successes").get<std::int64_t>(),
                      t.at("attempts").get<std::int64_t>(),
                      PassRate(t.at("estimate").get<double>())};
        if (stat.successes < 0 || stat.successes > stat.attempts) {
          throw FormatError("store snapshot: task '" + stat.task_id +
                            "' has successes > attempts");
        }
        if (!store.tasks_.emplace(stat.task_id, stat).second) {
          throw FormatError("store snapshot: duplicate task '" +
                            stat.task_id + "'");
        }
      }
      return store;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("store snapshot: ") + e.what());
    } catch (const InvalidInput& e) {
      throw FormatError(std::string("store snapshot: ") + e.what());
    }
  }

 private:
  StoreConfig config_;
  std::map<std::string, TaskStat, std::less<>> tasks_;
};

}  // namespace coba
