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

#include <cstdint>
#include <limits>

namespace coba {

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() {
    const std::uint64_t z = Mix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return z;
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double NextDouble() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Independent stream keyed by (root seed, purpose, step, task). Streams never
// depend on the order in which tasks are visited.
constexpr SplitMix64 StreamFor(std::uint64_t root, std::uint64_t purpose,
                               std::uint64_t step, std::uint64_t task) {
  std::uint64_t key = Mix64(root ^ Mix64(purpose));
  key = Mix64(key ^ Mix64(step + 0x632be59bd9b4e019ULL));
  key = Mix64(key ^ Mix64(task + 0x85157af5ULL));
  return SplitMix64(key);
}

}  // namespace coba
