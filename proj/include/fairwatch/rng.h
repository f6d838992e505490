// Copyright 2026 The Fairwatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRWATCH_RNG_H_
#define FAIRWATCH_RNG_H_

#include <cstdint>
#include <random>
#include <span>

namespace fairwatch {

// The single random source used by every simulation.
//
// Algorithm: std::mt19937_64 (fully specified by the C++ standard, so the
// stream is identical across platforms and standard libraries). Uniform
// doubles take the top 53 bits of one engine output; we do not use
// std::uniform_real_distribution because its algorithm is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // 1 with probability p. p = 0 never yields 1, p = 1 always does.
  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  // Index drawn from a probability vector (one engine output).
  std::size_t categorical(std::span<const double> probabilities) {
    const double u = uniform();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
      if (probabilities[i] <= 0.0) continue;
      last_positive = i;
      acc += probabilities[i];
      if (u < acc) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

// Seed of the i-th trial of an experiment.
constexpr std::uint64_t trial_seed(std::uint64_t base_seed,
                                   std::uint64_t trial_index) {
  return base_seed + trial_index;
}

}  // namespace fairwatch

#endif  // FAIRWATCH_RNG_H_
