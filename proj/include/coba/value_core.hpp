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

// Capability-oriented value function.
//
// A task with pass rate p that receives B rollouts is worth
//
//   V(B, p) = (1 - exp(-(B / tau) * p * (1 - p))) * Beta(p; alpha, beta)
//
// where the Beta density expresses which difficulty band the policy should
// currently train on and the first factor is a saturating realizability term.
// (alpha, beta) move with the batch failure rate: a high failure rate pushes
// alpha up (favor high pass-rate tasks), a low one pushes it down while
// alpha + beta stays fixed at kappa.
//
// The marginal gain V(B+1) - V(B) = A * exp(-c * B) with c = p(1-p)/tau and
// A = density * (1 - exp(-c)) is geometric in B, which is what makes the
// greedy allocator in allocator.hpp exact.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <deque>
#include <numeric>
#include <span>
#include <string>

#include "coba/errors.hpp"
#include "coba/pass_rate.hpp"

namespace coba {

// Densities are clamped here so endpoint singularities never reach the heap.
inline constexpr double kDensityCap = 1e12;

// Shape of the preference density. alpha + beta == kappa.
struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
  double kappa = 2.0;

  static BetaParams Make(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) ||
        !std::isfinite(beta)) {
      throw InvalidInput("Beta parameters must be positive and finite");
    }
    return BetaParams{alpha, beta, alpha + beta};
  }
};

struct ValueParams {
  double tau = 16.0;
  BetaParams beta_params;

  void Validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      throw InvalidInput("tau must be positive");
    }
    if (!(beta_params.alpha > 0.0) || !(beta_params.beta > 0.0)) {
      throw InvalidInput("Beta parameters must be positive");
    }
  }
};

// 1 - mean pass rate.
inline double global_failure_rate(std::span<const PassRate> pass_rates) {
  if (pass_rates.empty()) {
    throw InvalidInput("global_failure_rate: empty batch");
  }
  double sum = 0.0;
  for (const PassRate& p : pass_rates) sum += p.value();
  return 1.0 - sum / static_cast<double>(pass_rates.size());
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Identity above 0.5, a sigmoid stretch of the low-failure region below.
inline double transform_failure(double f_bar, double gamma) {
  if (!(f_bar >= 0.0 && f_bar <= 1.0)) {
    throw InvalidInput("transform_failure: f_bar out of [0,1]");
  }
  if (f_bar > 0.5) return f_bar;
  return sigmoid(gamma * (f_bar - 0.5));
}

struct CapabilityConfig {
  int window_len = 5;
  double gamma = 10.0;
  double lambda_slope = 9.0;
  double alpha_min = 1.0;
  double alpha_max = 10.0;
  double kappa = 11.0;
  // Maps alpha from 1 - F~ instead of F~ (explore first, exploit later).
  bool inverted = false;

  void Validate() const {
    if (window_len < 1) throw InvalidInput("window_len must be >= 1");
    if (!(alpha_min > 0.0) || !(alpha_min <= alpha_max)) {
      throw InvalidInput("need 0 < alpha_min <= alpha_max");
    }
    if (!(alpha_max < kappa)) {
      throw InvalidInput("alpha_max must be below kappa so beta stays positive");
    }
    if (!std::isfinite(gamma) || !std::isfinite(lambda_slope)) {
      throw InvalidInput("gamma and lambda_slope must be finite");
    }
  }
};

// Rolling failure-rate history plus the current preference-density shape.
// One writer: Update() must be externally serialized.
class CapabilityState {
 public:
  explicit CapabilityState(CapabilityConfig config = {}) : config_(config) {
    config_.Validate();
    // No evidence yet: treat the policy as failing everything.
    current_ = ScheduleFor(1.0);
  }

  const CapabilityConfig& config() const { return config_; }
  const BetaParams& current() const { return current_; }
  const std::deque<double>& history() const { return history_; }

  // Mean of the stored failure rates (the current step included).
  double smoothed_failure() const {
    if (history_.empty()) return 1.0;
    return std::accumulate(history_.begin(), history_.end(), 0.0) /
           static_cast<double>(history_.size());
  }

  // Pushes this batch's failure rate and recomputes (alpha, beta).
  BetaParams Update(std::span<const PassRate> batch_pass_rates) {
    const double failure = global_failure_rate(batch_pass_rates);
    history_.push_back(std::clamp(failure, 0.0, 1.0));
    if (history_.size() > static_cast<std::size_t>(config_.window_len)) {
      history_.pop_front();
    }
    current_ = ScheduleFor(transform_failure(smoothed_failure(), config_.gamma));
    return current_;
  }

  // alpha = clip(alpha_min + lambda * F~, alpha_min, alpha_max), beta = kappa - alpha.
  BetaParams ScheduleFor(double transformed_failure) const {
    const double signal =
        config_.inverted ? 1.0 - transformed_failure : transformed_failure;
    const double alpha =
        std::clamp(config_.alpha_min + config_.lambda_slope * signal,
                   config_.alpha_min, config_.alpha_max);
    return BetaParams{alpha, config_.kappa - alpha, config_.kappa};
  }

 private:
  CapabilityConfig config_;
  std::deque<double> history_;
  BetaParams current_;
};

inline BetaParams update_capability(CapabilityState& state,
                                    std::span<const PassRate> batch_pass_rates) {
  return state.Update(batch_pass_rates);
}

inline double log_beta_function(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Beta(alpha, beta) density at p, evaluated in log space and capped at
// kDensityCap where it diverges at an endpoint.
inline double beta_density(PassRate pass_rate, const BetaParams& params) {
  const double p = pass_rate.value();
  const double a = params.alpha;
  const double b = params.beta;
  const double log_norm = log_beta_function(a, b);
  const double log_cap = std::log(kDensityCap);

  // At p = 0 the (1-p) factor is 1 and vice versa.
  auto endpoint = [&](double exponent) {
    if (exponent < 0.0) return kDensityCap;
    if (exponent > 0.0) return 0.0;
    return std::exp(std::min(-log_norm, log_cap));
  };
  if (p == 0.0) return endpoint(a - 1.0);
  if (p == 1.0) return endpoint(b - 1.0);

  const double log_density =
      (a - 1.0) * std::log(p) + (b - 1.0) * std::log1p(-p) - log_norm;
  return std::exp(std::min(log_density, log_cap));
}

// 1 - exp(-(budget / tau) * p(1-p)).
inline double saturation(std::int64_t budget, PassRate p, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("saturation: tau must be positive");
  const double exponent = static_cast<double>(budget) / tau * p.variance();
  return -std::expm1(-exponent);
}

inline double value(std::int64_t budget, PassRate p, const ValueParams& vp) {
  return saturation(budget, p, vp.tau) * beta_density(p, vp.beta_params);
}

// Value of one task as a function of its budget, with the budget-independent
// terms precomputed.
class ValueCurve {
 public:
  ValueCurve(PassRate p, const ValueParams& vp)
      : density_(beta_density(p, vp.beta_params)),
        decay_(p.variance() / vp.tau),
        first_gain_(density_ * -std::expm1(-decay_)) {}

  double density() const { return density_; }
  double decay() const { return decay_; }

  double value(std::int64_t budget) const {
    return -std::expm1(-decay_ * static_cast<double>(budget)) * density_;
  }

  // value(budget + 1) - value(budget) in closed form.
  double gain(std::int64_t budget) const {
    return first_gain_ * std::exp(-decay_ * static_cast<double>(budget));
  }

 private:
  double density_;
  double decay_;
  double first_gain_;
};

inline double marginal_gain(std::int64_t budget, PassRate p,
                            const ValueParams& vp) {
  return ValueCurve(p, vp).gain(budget);
}

// Per-task value curve: value(b) and its forward difference gain(b).
template <class C>
concept TaskCurve = requires(const C& curve, std::int64_t budget) {
  { curve.value(budget) } -> std::convertible_to<double>;
  { curve.gain(budget) } -> std::convertible_to<double>;
};

// Anything that turns a pass rate into a TaskCurve.
template <class M>
concept ValueModel = requires(const M& model, PassRate p) {
  { model.curve(p) } -> TaskCurve;
};

// The capability-oriented value function as a ValueModel.
struct CobaValueModel {
  ValueParams params;

  ValueCurve curve(PassRate p) const { return ValueCurve(p, params); }
};

}  // namespace coba
