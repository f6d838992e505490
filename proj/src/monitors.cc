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

#include "fairwatch/monitors.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fairwatch {

namespace {

void validate_outcome(int outcome) {
  if (outcome != 0 && outcome != 1) {
    throw std::invalid_argument("outcome must be 0 or 1");
  }
}

}  // namespace

ConfidenceInterval ExactOutcomeMonitor::observe(int outcome) {
  validate_outcome(outcome);
  ++steps_;
  heads_ += static_cast<std::uint64_t>(outcome);
  mean_ = static_cast<double>(heads_) / static_cast<double>(steps_);
  return make_interval(mean_, mean_, mean_, 0.0, SoundnessMode::kUniform);
}

StaticMonitor::StaticMonitor(const StaticMonitorOptions& options)
    : options_(options) {
  validate_delta(options_.delta);
}

ConfidenceInterval StaticMonitor::observe(int outcome) {
  validate_outcome(outcome);
  ++steps_;
  heads_ += static_cast<std::uint64_t>(outcome);
  mean_ = static_cast<double>(heads_) / static_cast<double>(steps_);

  const double eps = mean_radius(steps_, options_.delta, options_.mode);
  const double bias_lo = std::max(0.0, mean_ - eps);
  const double bias_hi = std::min(1.0, mean_ + eps);

  const bool extrapolate = options_.measure == MeasureKind::kOutcome &&
                           !options_.horizon.is_infinite();
  if (!extrapolate) {
    return make_interval(bias_lo, bias_hi, mean_, options_.delta,
                         options_.mode);
  }
  const double t = static_cast<double>(steps_);
  const double h = static_cast<double>(options_.horizon.steps());
  const double realized = t * mean_;
  return make_interval((realized + h * bias_lo) / (t + h),
                       (realized + h * bias_hi) / (t + h), mean_,
                       options_.delta, options_.mode);
}

HmmMonitor::HmmMonitor(HmmMonitorOptions options)
    : options_(std::move(options)) {
  validate_delta(options_.delta);
  if (options_.window == 0) throw std::invalid_argument("window must be >= 1");
  if (!(options_.lower <= options_.upper)) {
    throw std::invalid_argument("function range must satisfy lower <= upper");
  }
  if (options_.mixing_time == 0) {
    throw std::invalid_argument("mixing time bound must be >= 1");
  }
  if (!options_.function) {
    options_.function = [](std::span<const int> window) {
      return static_cast<double>(window.back());
    };
  }
  scratch_.resize(options_.window);
}

double HmmMonitor::error_bound(std::size_t t) const {
  const std::size_t n = options_.window;
  if (t < n) return std::numeric_limits<double>::infinity();
  const double td = static_cast<double>(t);
  const double nd = static_cast<double>(n);
  const double range = options_.upper - options_.lower;
  const double effective = td - (nd - 1.0);
  const double k =
      options_.mode == SoundnessMode::kPointwise
          ? std::log(2.0 / options_.delta)
          : std::log(std::numbers::pi * std::numbers::pi * td * td /
                     (3.0 * options_.delta));
  return std::sqrt(9.0 * td * nd * nd * range * range *
                   static_cast<double>(options_.mixing_time) /
                   (2.0 * effective * effective) * k);
}

ConfidenceInterval HmmMonitor::observe(int outcome) {
  validate_outcome(outcome);
  ++steps_;
  buffer_.push_back(outcome);
  if (buffer_.size() > options_.window) buffer_.pop_front();
  if (steps_ < options_.window) {
    return make_interval(0.0, 1.0, 0.5, options_.delta, options_.mode);
  }
  std::copy(buffer_.begin(), buffer_.end(), scratch_.begin());
  sum_.add(options_.function(scratch_));
  const std::size_t evaluations = steps_ - options_.window + 1;
  mean_ = sum_.value() / static_cast<double>(evaluations);
  const double e = error_bound(steps_);
  return make_interval(mean_ - e, mean_ + e, mean_, options_.delta,
                       options_.mode);
}

AdditiveMonitor::AdditiveMonitor(const AdditiveMonitorOptions& options)
    : options_(options) {
  validate_delta(options_.delta);
}

AdditiveVerdict AdditiveMonitor::observe(int outcome) {
  validate_outcome(outcome);
  const double previous_shift = shift_;
  ++steps_;
  corrected_sum_.add(static_cast<double>(outcome) - previous_shift);
  average_shift_.add(previous_shift);
  shift_ += outcome == 1 ? options_.shift_on_head : options_.shift_on_tail;

  const double t = static_cast<double>(steps_);
  initial_estimate_ = corrected_sum_.value() / t;
  const double eps = mean_radius(steps_, options_.delta, options_.mode);

  AdditiveVerdict verdict;
  const double current = initial_estimate_ + previous_shift;
  verdict.current = make_interval(current - eps, current + eps, current,
                                  options_.delta, options_.mode);
  const double average = initial_estimate_ + average_shift_.value() / t;
  verdict.bias = make_interval(average - eps, average + eps, average,
                               options_.delta, options_.mode);
  verdict.next_bias_estimate = initial_estimate_ + shift_;
  return verdict;
}

}  // namespace fairwatch
