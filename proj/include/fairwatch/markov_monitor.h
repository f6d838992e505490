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

#ifndef FAIRWATCH_MARKOV_MONITOR_H_
#define FAIRWATCH_MARKOV_MONITOR_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fairwatch/confidence.h"
#include "fairwatch/dynamics.h"
#include "fairwatch/fairness.h"

namespace fairwatch {

// Largest coin alphabet and horizon accepted by the Markov monitor.
inline constexpr std::size_t kMaxMarkovCoins = 8;
inline constexpr std::size_t kMaxMarkovHorizon = 6;

// Bounds on the single-step quantities of a Markov coin process: the bias of
// each coin and the next-coin kernel.
struct TransitionBounds {
  std::size_t coins = 0;
  // bias[k] bounds p^(k).
  std::vector<Interval> bias;
  // next_coin[(2k + x) * coins + k'] bounds kernel(k, x, k').
  std::vector<Interval> next_coin;

  static TransitionBounds unknown(std::size_t coins);
  // Degenerate bounds equal to the true quantities of `dynamics`.
  static TransitionBounds exact(const MarkovDynamics& dynamics);

  Interval& kernel(std::size_t from, int outcome, std::size_t to) {
    return next_coin[(2 * from + static_cast<std::size_t>(outcome)) * coins +
                     to];
  }
  const Interval& kernel(std::size_t from, int outcome, std::size_t to) const {
    return next_coin[(2 * from + static_cast<std::size_t>(outcome)) * coins +
                     to];
  }
};

// Bounds on E[bias of the coin tossed j steps after a toss of coin `label`
// with outcome `outcome`], for j = 0..horizon. Entry 0 is the bias of
// `label` itself.
//
// The expectation is a polynomial with non-negative coefficients in the
// kernel entries, the biases, and their complements, so evaluating it at
// all lower (resp. upper) endpoints yields a sound lower (resp. upper)
// bound. Throws std::length_error beyond kMaxMarkovCoins/kMaxMarkovHorizon.
std::vector<Interval> expected_future_bias_bounds(
    const TransitionBounds& bounds, std::size_t label, int outcome,
    std::size_t horizon);

// Bounds on the current fairness `horizon` steps ahead.
Interval current_fairness_bounds(const TransitionBounds& bounds,
                                 std::size_t label, int outcome,
                                 std::size_t horizon);

struct MarkovMonitorOptions {
  std::size_t coins = 2;
  std::size_t horizon = 0;
  SoundnessMode mode = SoundnessMode::kPointwise;
  double delta = 0.05;
};

struct MarkovVerdict {
  ConfidenceInterval current;
  ConfidenceInterval bias;
  ConfidenceInterval outcome;
  TransitionBounds transitions;
};

// Monitor for observed Markov coin processes. The monitor sees coin labels
// and outcomes but not the numeric biases.
//
// Every bias p^(k) and every kernel entry gets its own mean estimate from
// visit counts with budget delta / Q, Q = n + 2n^2, so that all bounds hold
// together with probability 1 - delta. The fairness verdicts are derived
// from those bounds by interval arithmetic.
class MarkovMonitor {
 public:
  explicit MarkovMonitor(const MarkovMonitorOptions& options);

  MarkovVerdict observe(std::size_t label, int outcome);

  std::size_t monitored_quantities() const;
  double per_quantity_delta() const;
  std::size_t steps() const { return steps_; }
  std::uint64_t visits(std::size_t label) const { return visits_[label]; }

  TransitionBounds bounds() const;

 private:
  Interval mean_bounds(std::uint64_t successes, std::uint64_t trials) const;

  MarkovMonitorOptions options_;
  std::size_t steps_ = 0;
  std::uint64_t total_heads_ = 0;
  std::vector<std::uint64_t> visits_;
  std::vector<std::uint64_t> heads_;
  // Exits from pair state (k, x) and their destinations.
  std::vector<std::uint64_t> exits_;
  std::vector<std::uint64_t> transitions_;
  std::optional<std::size_t> last_pair_;
};

}  // namespace fairwatch

#endif  // FAIRWATCH_MARKOV_MONITOR_H_
