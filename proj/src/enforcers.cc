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

#include "fairwatch/enforcers.h"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "fairwatch/confidence.h"

namespace fairwatch {

ConstantBiasEnforcer::ConstantBiasEnforcer(
    const TargetIntervalSchedule& schedule) {
  const auto common = schedule.intersection();
  if (!common) {
    throw std::invalid_argument("target intervals have an empty "
                                "intersection; no constant bias satisfies "
                                "them all");
  }
  bias_ = 0.5 * (common->lo + common->hi);
}

BiasOutcomePair ConstantBiasEnforcer::step(const BiasOutcomePair& /*raw*/,
                                           Rng& rng) const {
  return {bias_, rng.bernoulli(bias_)};
}

ThresholdOutcomeEnforcer::ThresholdOutcomeEnforcer(double threshold)
    : threshold_(threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("threshold must lie in [0, 1]");
  }
}

ThresholdOutcomeEnforcer::ThresholdOutcomeEnforcer(
    double threshold, const TargetIntervalSchedule& schedule)
    : ThresholdOutcomeEnforcer(threshold) {
  for (const auto& [t, target] : schedule.overrides()) {
    const Interval required = band(t);
    if (required.lo < target.lo - kFairnessTolerance ||
        required.hi > target.hi + kFairnessTolerance) {
      throw std::invalid_argument(
          "target at t=" + std::to_string(t) +
          " does not contain the band of width 1/t around the threshold");
    }
  }
}

Interval ThresholdOutcomeEnforcer::band(std::size_t t) const {
  const double slack = 1.0 / static_cast<double>(t);
  return {std::max(0.0, threshold_ - slack), std::min(1.0, threshold_ + slack)};
}

int ThresholdOutcomeEnforcer::step(int raw_outcome) {
  if (raw_outcome != 0 && raw_outcome != 1) {
    throw std::invalid_argument("outcome must be 0 or 1");
  }
  const double with_raw =
      static_cast<double>(heads_ + static_cast<std::uint64_t>(raw_outcome)) /
      static_cast<double>(steps_ + 1);
  const int enforced = with_raw <= threshold_ ? 1 : 0;
  ++steps_;
  heads_ += static_cast<std::uint64_t>(enforced);
  return enforced;
}

ReachTable ReachTable::build(double bias, std::size_t window,
                             const Interval& target) {
  if (!(bias >= 0.0 && bias <= 1.0)) {
    throw std::invalid_argument("bias must lie in [0, 1]");
  }
  if (window == 0) throw std::invalid_argument("window must be >= 1");
  validate(target);
  ReachTable table;
  table.bias_ = bias;
  table.window_ = window;
  table.target_ = target;
  table.rows_.resize(window + 1);
  const HeadsRange accepted = heads_range(target, window);
  auto& last = table.rows_[window];
  last.resize(window + 1);
  for (std::size_t h = 0; h <= window; ++h) {
    last[h] = accepted.contains(static_cast<std::int64_t>(h)) ? 1.0 : 0.0;
  }
  for (std::size_t t = window; t-- > 0;) {
    const auto& next = table.rows_[t + 1];
    auto& row = table.rows_[t];
    row.resize(t + 1);
    for (std::size_t h = 0; h <= t; ++h) {
      row[h] = bias * next[h + 1] + (1.0 - bias) * next[h];
    }
  }
  return table;
}

DeltaEnforcer::DeltaEnforcer(std::shared_ptr<const ReachTable> table,
                             double delta)
    : table_(std::move(table)), delta_(delta) {
  if (!table_) throw std::invalid_argument("reach table required");
  validate_delta(delta_);
}

int DeltaEnforcer::decide(std::size_t t, std::size_t h,
                          int raw_outcome) const {
  const double kept = table_->at(t + 1, h + static_cast<std::size_t>(raw_outcome));
  if (kept >= 1.0 - delta_) return raw_outcome;
  const double heads = table_->at(t + 1, h + 1);
  const double tails = table_->at(t + 1, h);
  return heads >= tails ? 1 : 0;
}

int DeltaEnforcer::step(int raw_outcome) {
  if (raw_outcome != 0 && raw_outcome != 1) {
    throw std::invalid_argument("outcome must be 0 or 1");
  }
  if (steps_ >= table_->window()) {
    throw std::out_of_range("delta enforcer window of length " +
                            std::to_string(table_->window()) + " is over");
  }
  const int enforced = decide(steps_, heads_, raw_outcome);
  if (enforced != raw_outcome) ++interventions_;
  ++steps_;
  heads_ += static_cast<std::size_t>(enforced);
  return enforced;
}

}  // namespace fairwatch
