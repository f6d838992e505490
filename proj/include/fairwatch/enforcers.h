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

#ifndef FAIRWATCH_ENFORCERS_H_
#define FAIRWATCH_ENFORCERS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "fairwatch/fairness.h"
#include "fairwatch/rng.h"

namespace fairwatch {

// Bias enforcer that replaces every coin with one fixed bias lying in all
// target intervals. Bias fairness of the enforced trace is then constant.
class ConstantBiasEnforcer {
 public:
  // Uses the midpoint of the schedule's intersection. Throws
  // std::invalid_argument when the intersection is empty.
  explicit ConstantBiasEnforcer(const TargetIntervalSchedule& schedule);

  double enforced_bias() const { return bias_; }

  // Replaces the bias and tosses the replacement coin.
  BiasOutcomePair step(const BiasOutcomePair& raw, Rng& rng) const;

 private:
  double bias_;
};

// Outcome enforcer that emits heads whenever the outcome fairness of the
// enforced history followed by the raw outcome is at most `threshold`, and
// tails otherwise. Keeps outcome fairness inside
// [threshold - 1/t, threshold + 1/t] at every t.
class ThresholdOutcomeEnforcer {
 public:
  explicit ThresholdOutcomeEnforcer(double threshold);
  // Also checks that every scheduled target contains the band around
  // `threshold`; throws std::invalid_argument otherwise.
  ThresholdOutcomeEnforcer(double threshold,
                           const TargetIntervalSchedule& schedule);

  int step(int raw_outcome);

  // The guaranteed band at time t >= 1.
  Interval band(std::size_t t) const;

  double threshold() const { return threshold_; }
  std::size_t steps() const { return steps_; }
  std::uint64_t heads() const { return heads_; }

 private:
  double threshold_;
  std::size_t steps_ = 0;
  std::uint64_t heads_ = 0;
};

// P(t, h): probability that the unenforced constant-coin process ends a
// window of length T inside the target, given t tosses with h heads.
class ReachTable {
 public:
  // Backward induction from P(T, h) = [h/T in target].
  static ReachTable build(double bias, std::size_t window,
                          const Interval& target);

  double at(std::size_t t, std::size_t h) const { return rows_[t][h]; }
  std::size_t window() const { return window_; }
  double bias() const { return bias_; }
  const Interval& target() const { return target_; }

 private:
  double bias_ = 0.5;
  std::size_t window_ = 0;
  Interval target_;
  std::vector<std::vector<double>> rows_;
};

// Finite-window enforcer with confidence 1 - delta. A raw outcome is kept
// when the state it leads to still reaches the target with probability at
// least 1 - delta; otherwise the outcome leading to the more promising
// state is emitted (heads on ties).
class DeltaEnforcer {
 public:
  DeltaEnforcer(std::shared_ptr<const ReachTable> table, double delta);

  // Enforced outcome for the toss after t tosses with h heads.
  int decide(std::size_t t, std::size_t h, int raw_outcome) const;

  // Throws std::out_of_range once the window is over.
  int step(int raw_outcome);

  std::size_t steps() const { return steps_; }
  std::size_t heads() const { return heads_; }
  std::size_t interventions() const { return interventions_; }

 private:
  std::shared_ptr<const ReachTable> table_;
  double delta_;
  std::size_t steps_ = 0;
  std::size_t heads_ = 0;
  std::size_t interventions_ = 0;
};

}  // namespace fairwatch

#endif  // FAIRWATCH_ENFORCERS_H_
