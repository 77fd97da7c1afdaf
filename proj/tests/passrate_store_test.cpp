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

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "coba/passrate_store.hpp"
#include "gtest/gtest.h"

namespace coba {
namespace {

TEST(PassRateStoreTest, UnknownTaskReturnsPrior) {
  PassRateStore store;
  const TaskStat s = store.get("x");
  EXPECT_EQ(s.task_id, "x");
  EXPECT_EQ(s.attempts, 0);
  EXPECT_EQ(s.estimate.value(), 0.5);
  EXPECT_EQ(store.size(), 0u);
}

TEST(PassRateStoreTest, FullSmoothingTakesBatchRate) {
  PassRateStore store;
  const std::vector<Outcome> batch = {{"a", 3, 4}};
  store.update_outcomes(batch);
  const TaskStat s = store.get("a");
  EXPECT_EQ(s.successes, 3);
  EXPECT_EQ(s.attempts, 4);
  EXPECT_EQ(s.estimate.value(), 0.75);
}

TEST(PassRateStoreTest, MovingAverage) {
  PassRateStore store(StoreConfig{PassRate(0.5), 0.5});
  store.update_outcomes(std::vector<Outcome>{{"a", 0, 4}});
  EXPECT_DOUBLE_EQ(store.get("a").estimate.value(), 0.25);
  store.update_outcomes(std::vector<Outcome>{{"a", 4, 4}});
  EXPECT_DOUBLE_EQ(store.get("a").estimate.value(), 0.625);
  store.update_outcomes(std::vector<Outcome>{{"a", 1, 4}});
  EXPECT_DOUBLE_EQ(store.get("a").estimate.value(), 0.4375);
  EXPECT_EQ(store.get("a").successes, 5);
  EXPECT_EQ(store.get("a").attempts, 12);
}

TEST(PassRateStoreTest, LightSmoothing) {
  PassRateStore store(StoreConfig{PassRate(0.5), 0.25});
  store.update_outcomes(std::vector<Outcome>{{"a", 2, 16}});
  EXPECT_DOUBLE_EQ(store.get("a").estimate.value(), 0.40625);
}

TEST(PassRateStoreTest, BadBatchLeavesStoreUnchanged) {
  PassRateStore store;
  store.update_outcomes(std::vector<Outcome>{{"a", 1, 2}});
  const std::string before = store.snapshot();
  EXPECT_THROW(store.update_outcomes(std::vector<Outcome>{{"a", 1, 1}, {"b", 5, 4}}),
               InvalidInput);
  EXPECT_THROW(store.update_outcomes(std::vector<Outcome>{{"b", 0, 0}}), InvalidInput);
  EXPECT_THROW(store.update_outcomes(std::vector<Outcome>{{"b", -1, 2}}), InvalidInput);
  EXPECT_THROW(store.update_outcomes(std::vector<Outcome>{{"a", 1, 2}, {"a", 1, 2}}),
               InvalidInput);
  EXPECT_EQ(store.snapshot(), before);
}

TEST(PassRateStoreTest, ConfigValidation) {
  EXPECT_THROW(PassRateStore(StoreConfig{PassRate(0.5), 0.0}), InvalidInput);
  EXPECT_THROW(PassRateStore(StoreConfig{PassRate(0.5), 1.5}), InvalidInput);
}

TEST(PassRateStoreTest, GetEstimatesKeepsOrder) {
  PassRateStore store;
  store.update_outcomes(std::vector<Outcome>{{"b", 1, 1}, {"a", 0, 1}});
  const std::vector<std::string> ids = {"b", "z", "a"};
  const auto stats = store.get_estimates(ids);
  ASSERT_EQ(stats.size(), 3u);
  EXPECT_EQ(stats[0].estimate.value(), 1.0);
  EXPECT_EQ(stats[1].estimate.value(), 0.5);
  EXPECT_EQ(stats[2].estimate.value(), 0.0);
}

TEST(PassRateStoreTest, SnapshotRoundTrip) {
  PassRateStore store(StoreConfig{PassRate(0.3), 0.7});
  store.update_outcomes(std::vector<Outcome>{{"a", 1, 3}, {"b", 2, 2}});
  store.update_outcomes(std::vector<Outcome>{{"a", 2, 7}});
  const PassRateStore copy = PassRateStore::restore(store.snapshot());
  EXPECT_EQ(copy.snapshot(), store.snapshot());
  EXPECT_EQ(copy.get("a"), store.get("a"));
  EXPECT_EQ(copy.config().smoothing, 0.7);
  EXPECT_EQ(copy.get("new").estimate.value(), 0.3);
}

TEST(PassRateStoreTest, RestoreRejectsBadInput) {
  EXPECT_THROW(PassRateStore::restore("{"), FormatError);
  EXPECT_THROW(PassRateStore::restore("{}"), FormatError);
  EXPECT_THROW(
      PassRateStore::restore(
          R"({"version":2,"prior":0.5,"smoothing":1.0,"tasks":[]})"),
      FormatError);
  EXPECT_THROW(
      PassRateStore::restore(
          R"({"version":1,"prior":0.5,"smoothing":1.0,"tasks":[{"id":"a","successes":3,"attempts":2,"estimate":0.5}]})"),
      FormatError);
  EXPECT_THROW(
      PassRateStore::restore(
          R"({"version":1,"prior":0.5,"smoothing":1.0,"tasks":[{"id":"a","successes":1,"attempts":2,"estimate":1.5}]})"),
      FormatError);
}

TEST(PassRateStoreProperty, BatchOrderIndependent) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Outcome> batch;
    for (int i = 0; i < 20; ++i) {
      const auto n = std::uniform_int_distribution<std::int64_t>(1, 50)(gen);
      const auto k = std::uniform_int_distribution<std::int64_t>(0, n)(gen);
      batch.push_back({"t" + std::to_string(i), k, n});
    }
    PassRateStore a(StoreConfig{PassRate(0.5), 0.6});
    PassRateStore b(StoreConfig{PassRate(0.5), 0.6});
    a.update_outcomes(batch);
    std::shuffle(batch.begin(), batch.end(), gen);
    b.update_outcomes(batch);
    ASSERT_EQ(a.snapshot(), b.snapshot());
  }
}

TEST(PassRateStoreProperty, EstimateStaysInUnitInterval) {
  std::mt19937_64 gen(32);
  std::uniform_real_distribution<double> us(0.01, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    PassRateStore store(StoreConfig{PassRate(0.5), us(gen)});
    for (int step = 0; step < 30; ++step) {
      const auto n = std::uniform_int_distribution<std::int64_t>(1, 16)(gen);
      const auto k = std::uniform_int_distribution<std::int64_t>(0, n)(gen);
      store.update_outcomes(std::vector<Outcome>{{"a", k, n}});
      const double e = store.get("a").estimate.value();
      ASSERT_GE(e, 0.0);
      ASSERT_LE(e, 1.0);
    }
  }
}

}  // namespace
}  // namespace coba
