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

#ifndef FAIRWATCH_DYNAMICS_H_
#define FAIRWATCH_DYNAMICS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fairwatch/fairness.h"
#include "fairwatch/rng.h"

namespace fairwatch {

// Every toss uses the same coin.
struct ConstantDynamics {
  double bias = 0.5;
};

// Finite coin set whose next coin depends on the last (coin, outcome) pair.
struct MarkovDynamics {
  // Distinct head-probabilities p^(1..n).
  std::vector<double> biases;
  // kernel[k][x][k'] = probability that coin k' follows a toss of coin k
  // with outcome x.
  std::vector<std::array<std::vector<double>, 2>> kernel;
  // Distribution of the first coin.
  std::vector<double> initial;

  std::size_t coins() const { return biases.size(); }
  double transition(std::size_t from, int outcome, std::size_t to) const {
    return kernel[from][static_cast<std::size_t>(outcome)][to];
  }
};

// p_{t+1} = clamp(p_t + shift(x_t)) with a fixed shift per outcome.
struct AdditiveDynamics {
  double initial_bias = 0.5;
  double shift_on_tail = 0.0;
  double shift_on_head = 0.0;

  double shift(int outcome) const {
    return outcome == 1 ? shift_on_head : shift_on_tail;
  }
};

// An explicit bias sequence (outcomes are still random).
struct ScriptedDynamics {
  std::vector<double> biases;
};

using DynamicsSpec = std::variant<ConstantDynamics, MarkovDynamics,
                                  AdditiveDynamics, ScriptedDynamics>;

// Tolerance for probability vectors summing to one.
inline constexpr double kProbabilityTolerance = 1e-9;

// Throws std::invalid_argument when any invariant of the variant is broken.
void validate(const DynamicsSpec& dynamics);

// Replaces a Markov kernel that always selects the same coin by the
// equivalent constant coin; other inputs are returned unchanged.
DynamicsSpec canonicalize(const DynamicsSpec& dynamics);

// Label of `bias` in the coin set, if present.
std::optional<std::size_t> coin_label(const MarkovDynamics& dynamics,
                                      double bias);

// True when the bias of every toss is a function of (tosses so far, heads
// so far).
bool is_count_determined(const DynamicsSpec& dynamics);

// Short human-readable descriptor, e.g. "constant:0.5".
std::string describe(const DynamicsSpec& dynamics);

// Draws the next pair given the realized history. Scripted dynamics throw
// std::out_of_range once the script is exhausted.
BiasOutcomePair sample_next(const DynamicsSpec& dynamics,
                            std::span<const BiasOutcomePair> history,
                            Rng& rng);

// Streaming equivalent of repeated sample_next calls; keeps O(1) state.
// Produces bit-identical pairs to sample_next on the same Rng stream.
class Simulator {
 public:
  Simulator(const DynamicsSpec& dynamics, std::uint64_t seed);

  BiasOutcomePair next();
  std::size_t steps() const { return steps_; }
  // Label of the coin used in the last toss (Markov dynamics only).
  std::optional<std::size_t> last_label() const { return last_label_; }
  Rng& rng() { return rng_; }

 private:
  DynamicsSpec dynamics_;
  Rng rng_;
  std::size_t steps_ = 0;
  std::optional<BiasOutcomePair> last_;
  std::optional<std::size_t> last_label_;
};

// Length-`horizon` trace; a pure function of its arguments.
Trace simulate(const DynamicsSpec& dynamics, std::size_t horizon,
               std::uint64_t seed);

}  // namespace fairwatch

#endif  // FAIRWATCH_DYNAMICS_H_
