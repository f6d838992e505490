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

#ifndef FAIRWATCH_MONITORS_H_
#define FAIRWATCH_MONITORS_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "fairwatch/confidence.h"
#include "fairwatch/fairness.h"

namespace fairwatch {

// Outcome fairness at horizon 0 under arbitrary dynamics: the running mean
// is observed exactly, so the interval is degenerate.
class ExactOutcomeMonitor {
 public:
  ConfidenceInterval observe(int outcome);

  double register_value() const { return mean_; }
  std::size_t steps() const { return steps_; }

 private:
  std::size_t steps_ = 0;
  std::uint64_t heads_ = 0;
  double mean_ = 0.0;
};

struct StaticMonitorOptions {
  MeasureKind measure = MeasureKind::kBias;
  Horizon horizon = Horizon(0);
  SoundnessMode mode = SoundnessMode::kPointwise;
  double delta = 0.05;
};

// Monitor for a single coin of unknown, constant bias.
//
// Bias and current fairness (any horizon) and outcome fairness at infinite
// horizon all equal the coin's bias, so the verdict is [R - eps, R + eps]
// around the running head rate R. For outcome fairness at finite horizon h
// the realized part t*R is exact and only the h future tosses are
// uncertain, giving
//   [(t R + h lo) / (t + h), (t R + h hi) / (t + h)]
// where [lo, hi] is the bias interval clamped to [0, 1].
class StaticMonitor {
 public:
  explicit StaticMonitor(const StaticMonitorOptions& options);

  ConfidenceInterval observe(int outcome);

  double register_value() const { return mean_; }
  std::size_t steps() const { return steps_; }
  const StaticMonitorOptions& options() const { return options_; }

 private:
  StaticMonitorOptions options_;
  std::size_t steps_ = 0;
  std::uint64_t heads_ = 0;
  double mean_ = 0.0;
};

// f : {0,1}^window -> [lower, upper].
using WindowFunction = std::function<double(std::span<const int>)>;

struct HmmMonitorOptions {
  std::size_t window = 1;
  double lower = 0.0;
  double upper = 1.0;
  // Upper bound on the mixing time of the hidden chain (in tosses).
  std::size_t mixing_time = 1;
  SoundnessMode mode = SoundnessMode::kPointwise;
  double delta = 0.05;
  // Defaults to the head indicator of the newest toss.
  WindowFunction function;
};

// Long-run fairness of a hidden Markov coin process started in
// stationarity. Only infinite-horizon verdicts are meaningful; all three
// measures share the same limit.
class HmmMonitor {
 public:
  explicit HmmMonitor(HmmMonitorOptions options);

  ConfidenceInterval observe(int outcome);

  double register_value() const { return mean_; }
  std::size_t steps() const { return steps_; }

  // Half-width of the interval after `t` observations (t >= window).
  double error_bound(std::size_t t) const;

 private:
  HmmMonitorOptions options_;
  std::deque<int> buffer_;
  std::vector<int> scratch_;
  std::size_t steps_ = 0;
  RunningSum sum_;
  double mean_ = 0.0;
};

struct AdditiveMonitorOptions {
  double shift_on_tail = 0.0;
  double shift_on_head = 0.0;
  SoundnessMode mode = SoundnessMode::kPointwise;
  double delta = 0.05;
};

struct AdditiveVerdict {
  // Bias of the coin tossed at the current step.
  ConfidenceInterval current;
  // Average bias of all coins tossed so far.
  ConfidenceInterval bias;
  // Point estimate of the bias of the next coin.
  double next_bias_estimate = 0.0;
};

// Monitor for biases that shift by a known amount after each outcome,
// starting from an unknown initial bias.
//
// Registers: R estimates the initial bias from the shift-corrected outcomes
// x_t - C_{t-1}; C is the accumulated shift; A = sum_{i<=t} C_{i-1} feeds
// the average-bias estimate R + A / t.
class AdditiveMonitor {
 public:
  explicit AdditiveMonitor(const AdditiveMonitorOptions& options);

  AdditiveVerdict observe(int outcome);

  double initial_bias_estimate() const { return initial_estimate_; }
  double accumulated_shift() const { return shift_; }
  double accumulated_average_shift() const { return average_shift_.value(); }
  std::size_t steps() const { return steps_; }

 private:
  AdditiveMonitorOptions options_;
  std::size_t steps_ = 0;
  RunningSum corrected_sum_;
  RunningSum average_shift_;
  double shift_ = 0.0;
  double initial_estimate_ = 0.0;
};

}  // namespace fairwatch

#endif  // FAIRWATCH_MONITORS_H_
