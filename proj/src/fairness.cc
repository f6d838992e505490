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

#include "fairwatch/fairness.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace fairwatch {

void validate(const BiasOutcomePair& pair) {
  if (!(pair.bias >= 0.0 && pair.bias <= 1.0)) {
    throw std::invalid_argument("bias must lie in [0, 1]");
  }
  if (pair.outcome != 0 && pair.outcome != 1) {
    throw std::invalid_argument("outcome must be 0 or 1");
  }
}

void validate(const Interval& interval) {
  if (!(interval.lo >= 0.0 && interval.lo <= interval.hi &&
        interval.hi <= 1.0)) {
    throw std::invalid_argument("interval must satisfy 0 <= lo <= hi <= 1");
  }
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo, b.lo);
  const double hi = std::min(a.hi, b.hi);
  if (lo > hi) return std::nullopt;
  return Interval{lo, hi};
}

TargetIntervalSchedule TargetIntervalSchedule::constant(
    const Interval& interval, std::size_t until) {
  TargetIntervalSchedule schedule;
  for (std::size_t t = 1; t <= until; ++t) schedule.set(t, interval);
  return schedule;
}

void TargetIntervalSchedule::set(std::size_t t, const Interval& interval) {
  if (t == 0) throw std::invalid_argument("schedule times start at 1");
  validate(interval);
  overrides_[t] = interval;
}

Interval TargetIntervalSchedule::at(std::size_t t) const {
  const auto it = overrides_.find(t);
  return it == overrides_.end() ? Interval::unit() : it->second;
}

std::optional<Interval> TargetIntervalSchedule::intersection() const {
  std::optional<Interval> acc = Interval::unit();
  for (const auto& [t, interval] : overrides_) {
    acc = intersect(*acc, interval);
    if (!acc) return std::nullopt;
  }
  return acc;
}

std::string_view to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::kOutcome:
      return "outcome";
    case MeasureKind::kBias:
      return "bias";
    case MeasureKind::kCurrent:
      return "current";
  }
  return "unknown";
}

MeasureKind parse_measure(std::string_view name) {
  if (name == "outcome") return MeasureKind::kOutcome;
  if (name == "bias") return MeasureKind::kBias;
  if (name == "current") return MeasureKind::kCurrent;
  throw std::invalid_argument("unknown measure '" + std::string(name) + "'");
}

std::string Horizon::to_string() const {
  return is_infinite() ? "inf" : std::to_string(steps_);
}

Horizon parse_horizon(std::string_view text) {
  if (text == "inf" || text == "infinity") return Horizon::infinite();
  std::size_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() ||
      Horizon(value).is_infinite()) {
    throw std::invalid_argument("horizon must be a non-negative integer or "
                                "'inf', got '" +
                                std::string(text) + "'");
  }
  return Horizon(value);
}

namespace {

void require_nonempty(std::span<const BiasOutcomePair> prefix) {
  if (prefix.empty()) {
    throw std::domain_error("fairness measures are undefined on the empty "
                            "prefix");
  }
}

}  // namespace

double outcome_fairness(std::span<const BiasOutcomePair> prefix) {
  require_nonempty(prefix);
  std::uint64_t heads = 0;
  for (const auto& pair : prefix) heads += static_cast<std::uint64_t>(pair.outcome);
  return static_cast<double>(heads) / static_cast<double>(prefix.size());
}

double bias_fairness(std::span<const BiasOutcomePair> prefix) {
  require_nonempty(prefix);
  RunningSum sum;
  for (const auto& pair : prefix) sum.add(pair.bias);
  return sum.value() / static_cast<double>(prefix.size());
}

double current_fairness(std::span<const BiasOutcomePair> prefix) {
  require_nonempty(prefix);
  return prefix.back().bias;
}

double evaluate(MeasureKind kind, std::span<const BiasOutcomePair> prefix) {
  switch (kind) {
    case MeasureKind::kOutcome:
      return outcome_fairness(prefix);
    case MeasureKind::kBias:
      return bias_fairness(prefix);
    case MeasureKind::kCurrent:
      return current_fairness(prefix);
  }
  throw std::invalid_argument("unknown measure");
}

// Neumaier's variant of Kahan summation.
void RunningSum::add(double value) {
  const double t = sum_ + value;
  if (std::abs(sum_) >= std::abs(value)) {
    compensation_ += (sum_ - t) + value;
  } else {
    compensation_ += (value - t) + sum_;
  }
  sum_ = t;
}

void RunningFairness::push(const BiasOutcomePair& pair) {
  ++count_;
  heads_ += static_cast<std::uint64_t>(pair.outcome);
  bias_sum_.add(pair.bias);
  last_bias_ = pair.bias;
}

double RunningFairness::outcome() const {
  if (count_ == 0) throw std::domain_error("empty prefix");
  return static_cast<double>(heads_) / static_cast<double>(count_);
}

double RunningFairness::bias() const {
  if (count_ == 0) throw std::domain_error("empty prefix");
  return bias_sum_.value() / static_cast<double>(count_);
}

double RunningFairness::current() const {
  if (count_ == 0) throw std::domain_error("empty prefix");
  return last_bias_;
}

double RunningFairness::evaluate(MeasureKind kind) const {
  switch (kind) {
    case MeasureKind::kOutcome:
      return outcome();
    case MeasureKind::kBias:
      return bias();
    case MeasureKind::kCurrent:
      return current();
  }
  throw std::invalid_argument("unknown measure");
}

HeadsRange heads_range(const Interval& target, std::size_t length) {
  if (length == 0) throw std::invalid_argument("length must be positive");
  const auto n = static_cast<std::int64_t>(length);
  const double len = static_cast<double>(length);
  auto inside = [&](std::int64_t h) {
    return h >= 0 && h <= n && target.contains(static_cast<double>(h) / len);
  };
  auto lo = static_cast<std::int64_t>(std::ceil(target.lo * len));
  auto hi = static_cast<std::int64_t>(std::floor(target.hi * len));
  lo = std::clamp<std::int64_t>(lo, 0, n);
  hi = std::clamp<std::int64_t>(hi, 0, n);
  // Rounding in lo * len can be off by one in either direction.
  if (inside(lo - 1)) --lo;
  if (!inside(lo) && lo <= hi) ++lo;
  if (inside(hi + 1)) ++hi;
  if (!inside(hi) && hi >= lo) --hi;
  return {lo, hi};
}

}  // namespace fairwatch
