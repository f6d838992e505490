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

#ifndef FAIRWATCH_FAIRNESS_H_
#define FAIRWATCH_FAIRNESS_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairwatch {

// Slack used when comparing fairness values against interval endpoints.
inline constexpr double kFairnessTolerance = 1e-12;

// One toss: the head-probability of the coin and the observed outcome
// (1 = heads).
struct BiasOutcomePair {
  double bias = 0.0;
  int outcome = 0;

  friend bool operator==(const BiasOutcomePair&,
                         const BiasOutcomePair&) = default;
};

// Throws std::invalid_argument unless 0 <= bias <= 1 and outcome is 0 or 1.
void validate(const BiasOutcomePair& pair);

using Trace = std::vector<BiasOutcomePair>;

// A closed subinterval of [0, 1].
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  static constexpr Interval unit() { return {0.0, 1.0}; }

  double width() const { return hi - lo; }
  bool contains(double value, double tolerance = kFairnessTolerance) const {
    return value >= lo - tolerance && value <= hi + tolerance;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Throws std::invalid_argument unless 0 <= lo <= hi <= 1.
void validate(const Interval& interval);

std::optional<Interval> intersect(const Interval& a, const Interval& b);

// Target intervals I_t indexed by 1-based time. Times without an override
// map to [0, 1].
class TargetIntervalSchedule {
 public:
  TargetIntervalSchedule() = default;

  // A schedule that requires `interval` at every listed time.
  static TargetIntervalSchedule constant(const Interval& interval,
                                         std::size_t until);

  void set(std::size_t t, const Interval& interval);
  Interval at(std::size_t t) const;
  const std::map<std::size_t, Interval>& overrides() const {
    return overrides_;
  }

  // Intersection of every I_t; empty when two targets are disjoint.
  std::optional<Interval> intersection() const;

 private:
  std::map<std::size_t, Interval> overrides_;
};

enum class MeasureKind { kOutcome, kBias, kCurrent };

std::string_view to_string(MeasureKind kind);
// Accepts "outcome", "bias", "current". Throws std::invalid_argument.
MeasureKind parse_measure(std::string_view name);

// Prediction horizon h in N or infinity.
class Horizon {
 public:
  constexpr explicit Horizon(std::size_t steps) : steps_(steps) {}
  static constexpr Horizon infinite() {
    return Horizon(std::numeric_limits<std::size_t>::max());
  }

  constexpr bool is_infinite() const {
    return steps_ == std::numeric_limits<std::size_t>::max();
  }
  constexpr std::size_t steps() const { return steps_; }
  std::string to_string() const;

  friend constexpr bool operator==(Horizon, Horizon) = default;

 private:
  std::size_t steps_;
};

// Accepts a non-negative integer or "inf".
Horizon parse_horizon(std::string_view text);

// Average outcome of the prefix. Throws std::domain_error on an empty prefix.
double outcome_fairness(std::span<const BiasOutcomePair> prefix);
// Average bias of the prefix. Throws std::domain_error on an empty prefix.
double bias_fairness(std::span<const BiasOutcomePair> prefix);
// Bias of the last coin. Throws std::domain_error on an empty prefix.
double current_fairness(std::span<const BiasOutcomePair> prefix);

double evaluate(MeasureKind kind, std::span<const BiasOutcomePair> prefix);

// Compensated running sum; used wherever averages are maintained
// incrementally so that they agree with the batch measures above.
class RunningSum {
 public:
  void add(double value);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Incremental evaluation of the three measures.
class RunningFairness {
 public:
  void push(const BiasOutcomePair& pair);

  std::size_t size() const { return count_; }
  std::uint64_t heads() const { return heads_; }
  double outcome() const;
  double bias() const;
  double current() const;
  double evaluate(MeasureKind kind) const;

 private:
  std::size_t count_ = 0;
  std::uint64_t heads_ = 0;
  RunningSum bias_sum_;
  double last_bias_ = 0.0;
};

// Integer range of head counts; empty when lo > hi.
struct HeadsRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;

  bool empty() const { return lo > hi; }
  bool contains(std::int64_t heads) const { return heads >= lo && heads <= hi; }

  friend bool operator==(const HeadsRange&, const HeadsRange&) = default;
};

// Head counts h in [0, length] with h / length inside `target`.
HeadsRange heads_range(const Interval& target, std::size_t length);

}  // namespace fairwatch

#endif  // FAIRWATCH_FAIRNESS_H_
