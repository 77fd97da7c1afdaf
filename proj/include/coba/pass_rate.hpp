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

#include <cmath>
#include <cstdint>
#include <string>

#include "coba/errors.hpp"

namespace coba {

// Probability that a single rollout for a task is judged correct.
class PassRate {
 public:
  constexpr PassRate() = default;

  explicit PassRate(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidInput("pass rate out of [0,1]: " + std::to_string(p));
    }
  }

  // successes / attempts, attempts >= 1.
  static PassRate FromCounts(std::int64_t successes, std::int64_t attempts) {
    if (attempts < 1 || successes < 0 || successes > attempts) {
      throw InvalidInput("invalid outcome counts " + std::to_string(successes) +
                         "/" + std::to_string(attempts));
    }
    return PassRate(static_cast<double>(successes) /
                    static_cast<double>(attempts));
  }

  constexpr double value() const { return p_; }

  // p(1-p), the Bernoulli variance of one rollout.
  constexpr double variance() const { return p_ * (1.0 - p_); }

 private:
  double p_ = 0.0;
};

}  // namespace coba
