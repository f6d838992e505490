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

#ifndef FAIRWATCH_SHIELD_H_
#define FAIRWATCH_SHIELD_H_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "fairwatch/dynamics.h"
#include "fairwatch/fairness.h"

namespace fairwatch {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

// Head-probability of the next coin after t tosses with h heads. Only
// dynamics whose bias is a function of these counts can be shielded.
class BiasMap {
 public:
  using Function = std::function<double(std::size_t t, std::size_t h)>;

  BiasMap(Function function, std::string descriptor);

  static BiasMap constant(double bias);
  // clamp(p1 + h * shift_on_head + (t - h) * shift_on_tail, 0, 1).
  static BiasMap additive(const AdditiveDynamics& dynamics);
  // Bias depends on t only.
  static BiasMap scripted(std::vector<double> biases);

  double operator()(std::size_t t, std::size_t h) const;
  const std::string& descriptor() const { return descriptor_; }

 private:
  Function function_;
  std::string descriptor_;
};

// Throws std::invalid_argument for dynamics that are not count-determined.
BiasMap bias_map_for(const DynamicsSpec& dynamics);

// c(p, from, to): cost of turning outcome `from` into `to` on a coin with
// bias p. Keeping the outcome is free.
class CostModel {
 public:
  using Function = std::function<double(double bias, int from, int to)>;

  CostModel(Function flip_cost, std::string descriptor);

  // Every flip costs 1.
  static CostModel unit();
  // Flipping outcome x costs its likelihood under the coin.
  static CostModel bias_weighted();
  // Accepts "unit" and "bias-weighted".
  static CostModel parse(const std::string& name);

  double operator()(double bias, int from, int to) const;
  const std::string& descriptor() const { return descriptor_; }

 private:
  Function flip_cost_;
  std::string descriptor_;
};

// v(t, h) for 0 <= h <= t <= T: expected minimal enforcement cost from a
// state, +inf when the window can no longer end inside the target.
class ValueTable {
 public:
  std::size_t window() const { return window_; }
  const HeadsRange& target_heads() const { return target_; }
  const Interval& target() const { return interval_; }
  const std::string& bias_descriptor() const { return bias_descriptor_; }
  const std::string& cost_descriptor() const { return cost_descriptor_; }

  double at(std::size_t t, std::size_t h) const { return rows_[t][h]; }
  bool feasible() const { return rows_[0][0] < kInfiniteCost; }

  // Versioned CSV: comment header lines, then `t,h,v` rows ("inf" for
  // infeasible states).
  void write_csv(std::ostream& out) const;
  static ValueTable read_csv(std::istream& in);

 private:
  friend ValueTable synthesize_value_table(const BiasMap&, std::size_t,
                                           const HeadsRange&,
                                           const CostModel&);
  friend ValueTable synthesize_value_table(const BiasMap&, std::size_t,
                                           const Interval&, const CostModel&);
  std::size_t window_ = 0;
  HeadsRange target_;
  Interval interval_;
  std::string bias_descriptor_;
  std::string cost_descriptor_;
  std::vector<std::vector<double>> rows_;
};

// Backward induction:
//   v(T, h) = 0 if h is a target head count, +inf otherwise;
//   v(t, h) = p min(v(t+1, h+1), c(p,1,0) + v(t+1, h))
//           + (1-p) min(v(t+1, h), c(p,0,1) + v(t+1, h+1)),  p = bias(t, h).
// A branch of probability zero contributes nothing even when infinite.
ValueTable synthesize_value_table(const BiasMap& bias, std::size_t window,
                                  const HeadsRange& target_heads,
                                  const CostModel& cost);
ValueTable synthesize_value_table(const BiasMap& bias, std::size_t window,
                                  const Interval& target,
                                  const CostModel& cost);

struct ShieldStep {
  BiasOutcomePair enforced;
  double cost = 0.0;
  bool flipped = false;
};

// Cost-optimal outcome shield for one window. The raw outcome is kept iff
// v(t+1, h+x) <= c(p, x, 1-x) + v(t+1, h+1-x); ties keep. After the window
// outcomes pass through unchanged.
class Shield {
 public:
  Shield(std::shared_ptr<const ValueTable> table, BiasMap bias, CostModel cost);

  // Enforced outcome after t tosses with h heads. Throws InfeasibleError
  // when both successors are infinite.
  int decide(std::size_t t, std::size_t h, int raw_outcome) const;

  ShieldStep step(const BiasOutcomePair& raw);

  std::size_t steps() const { return steps_; }
  std::size_t heads() const { return heads_; }
  double total_cost() const { return total_cost_; }
  const ValueTable& table() const { return *table_; }

 private:
  std::shared_ptr<const ValueTable> table_;
  BiasMap bias_;
  CostModel cost_;
  std::size_t steps_ = 0;
  std::size_t heads_ = 0;
  double total_cost_ = 0.0;
};

enum class InfeasibleWindowPolicy { kError, kSaturate };

struct PeriodicShieldEvent {
  std::size_t window_start = 0;
  HeadsRange requested;
  HeadsRange used;
};

// Window heads still needed so that the fraction of heads after the window
// ending at `window_start + window` lies in `target`, given `heads_so_far`
// accumulated heads. Clipped to [0, window]; may be empty.
HeadsRange window_target(const Interval& target, std::size_t window,
                         std::size_t window_start, std::size_t heads_so_far);

// Repeats a shield over consecutive windows of length T, re-synthesizing
// at each window start against the accumulated enforced heads so that the
// outcome fairness at every multiple of T lies in the target.
class PeriodicShield {
 public:
  // The bias map is indexed by window-local (t, h).
  PeriodicShield(std::size_t window, const Interval& target, BiasMap bias,
                 CostModel cost,
                 InfeasibleWindowPolicy policy = InfeasibleWindowPolicy::kError);

  ShieldStep step(const BiasOutcomePair& raw);

  std::size_t steps() const { return steps_; }
  std::size_t heads() const { return heads_; }
  double total_cost() const { return total_cost_; }
  const std::vector<PeriodicShieldEvent>& events() const { return events_; }

 private:
  void start_window();

  std::size_t window_;
  Interval target_;
  BiasMap bias_;
  CostModel cost_;
  InfeasibleWindowPolicy policy_;
  std::unique_ptr<Shield> current_;
  std::size_t steps_ = 0;
  std::size_t heads_ = 0;
  double total_cost_ = 0.0;
  std::vector<PeriodicShieldEvent> events_;
};

// Shield for count-determined dynamics (constant, additive, scripted).
// Throws std::invalid_argument otherwise.
Shield dynamic_shield(const DynamicsSpec& dynamics, std::size_t window,
                      const Interval& target, const CostModel& cost);

}  // namespace fairwatch

#endif  // FAIRWATCH_SHIELD_H_
