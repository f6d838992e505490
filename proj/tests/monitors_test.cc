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

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "fairwatch/dynamics.h"

namespace fairwatch {
namespace {

TEST(ExactMonitor, DegenerateIntervals) {
  ExactOutcomeMonitor monitor;
  monitor.observe(1);
  monitor.observe(0);
  const auto ci = monitor.observe(1);
  EXPECT_DOUBLE_EQ(ci.lo, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(ci.hi, 2.0 / 3.0);

  ExactOutcomeMonitor zeros;
  ConfidenceInterval last;
  for (int i = 0; i < 5; ++i) last = zeros.observe(0);
  EXPECT_EQ(last.lo, 0.0);
  EXPECT_EQ(last.hi, 0.0);

  ExactOutcomeMonitor alternating;
  for (int i = 0; i < 10; ++i) last = alternating.observe(i % 2);
  EXPECT_DOUBLE_EQ(last.lo, 0.5);
  EXPECT_DOUBLE_EQ(last.hi, 0.5);
  EXPECT_THROW(alternating.observe(3), std::invalid_argument);
}

TEST(StaticMonitor, PointwiseBiasInterval) {
  StaticMonitor monitor({MeasureKind::kBias, Horizon(0),
                         SoundnessMode::kPointwise, 0.05});
  ConfidenceInterval ci;
  for (int t = 0; t < 100; ++t) ci = monitor.observe(t < 47 ? 1 : 0);
  EXPECT_DOUBLE_EQ(monitor.register_value(), 0.47);
  EXPECT_NEAR(ci.lo, 0.47 - 0.13581015157406195, 1e-14);
  EXPECT_NEAR(ci.hi, 0.47 + 0.13581015157406195, 1e-14);
  EXPECT_DOUBLE_EQ(ci.estimate, 0.47);
}

TEST(StaticMonitor, ClampsAtTheEdges) {
  StaticMonitor monitor({MeasureKind::kCurrent, Horizon(5),
                         SoundnessMode::kPointwise, 0.05});
  ConfidenceInterval ci;
  for (int t = 0; t < 30; ++t) ci = monitor.observe(1);
  EXPECT_EQ(ci.hi, 1.0);
  EXPECT_LT(ci.lo, 1.0);
}

TEST(StaticMonitor, OutcomeAtHorizonZeroIsExact) {
  StaticMonitor monitor({MeasureKind::kOutcome, Horizon(0),
                         SoundnessMode::kPointwise, 0.05});
  ConfidenceInterval ci;
  for (int t = 0; t < 40; ++t) ci = monitor.observe(t % 4 == 0);
  EXPECT_DOUBLE_EQ(ci.lo, 0.25);
  EXPECT_DOUBLE_EQ(ci.hi, 0.25);
}

TEST(StaticMonitor, OutcomeExtrapolationApproachesBiasInterval) {
  const auto run = [](Horizon h) {
    StaticMonitor monitor({MeasureKind::kOutcome, h,
                           SoundnessMode::kUniform, 0.1});
    ConfidenceInterval ci;
    for (int t = 0; t < 200; ++t) ci = monitor.observe(t % 3 == 0);
    return ci;
  };
  const auto bias_like = run(Horizon::infinite());
  const auto far = run(Horizon(100'000'000));
  const auto near = run(Horizon(10));
  EXPECT_NEAR(far.lo, bias_like.lo, 1e-5);
  EXPECT_NEAR(far.hi, bias_like.hi, 1e-5);
  EXPECT_LT(near.width(), far.width());
  // Realized head count is exact: width is h/(t+h) times the bias width.
  EXPECT_NEAR(near.width(), bias_like.width() * 10.0 / 210.0, 1e-12);
}

TEST(HmmMonitor, ErrorBoundReference) {
  HmmMonitorOptions options;
  options.window = 1;
  options.mixing_time = 1;
  options.delta = 0.05;
  HmmMonitor monitor(options);
  EXPECT_NEAR(monitor.error_bound(100), 0.40743045472218585, 1e-14);
  EXPECT_TRUE(std::isinf(HmmMonitor([] {
                HmmMonitorOptions o;
                o.window = 3;
                return o;
              }()).error_bound(2)));
}

TEST(HmmMonitor, ErrorBoundShape) {
  HmmMonitorOptions options;
  HmmMonitor monitor(options);
  const double k = std::log(2.0 / 0.05);
  for (std::size_t t : {1000UL, 100000UL, 10000000UL}) {
    EXPECT_NEAR(monitor.error_bound(t) * std::sqrt(static_cast<double>(t)),
                std::sqrt(4.5 * k), 1e-9);
  }
  options.mode = SoundnessMode::kUniform;
  HmmMonitor uniform(options);
  EXPECT_GT(uniform.error_bound(1000), monitor.error_bound(1000));
}

TEST(HmmMonitor, RunningMeanOfWindowFunction) {
  HmmMonitorOptions options;
  options.window = 2;
  options.function = [](std::span<const int> w) {
    return static_cast<double>(w[0] == w[1]);
  };
  HmmMonitor monitor(options);
  const int xs[] = {1, 1, 0, 0, 1};
  ConfidenceInterval ci;
  for (int x : xs) ci = monitor.observe(x);
  // Windows: (1,1) (1,0) (0,0) (0,1) -> 2 matches out of 4.
  EXPECT_DOUBLE_EQ(monitor.register_value(), 0.5);
  EXPECT_THROW(HmmMonitor([] {
                 HmmMonitorOptions o;
                 o.mixing_time = 0;
                 return o;
               }()),
               std::invalid_argument);
}

TEST(AdditiveMonitor, RecursionMatchesSimulator) {
  AdditiveMonitor monitor({-0.1, 0.1, SoundnessMode::kPointwise, 0.05});
  monitor.observe(1);
  const auto v = monitor.observe(1);
  EXPECT_NEAR(monitor.accumulated_shift(), 0.2, 1e-15);
  // R = ((1 - 0) + (1 - 0.1)) / 2 = 0.95; p_2 = R + C_1 = 1.05 clamps.
  EXPECT_NEAR(monitor.initial_bias_estimate(), 0.95, 1e-15);
  EXPECT_NEAR(v.current.estimate, 1.0, 1e-15);
  // With the exact initial bias the next-coin estimate is p1 + C_2 = 0.7.
  EXPECT_NEAR(0.5 + monitor.accumulated_shift(), 0.7, 1e-15);
  EXPECT_NEAR(v.next_bias_estimate, 0.95 + 0.2, 1e-15);
}

TEST(AdditiveMonitor, ZeroShiftsReduceToStaticMonitor) {
  AdditiveMonitor additive({0.0, 0.0, SoundnessMode::kUniform, 0.05});
  StaticMonitor fixed({MeasureKind::kBias, Horizon(0), SoundnessMode::kUniform,
                       0.05});
  const Trace trace = simulate(ConstantDynamics{0.35}, 500, 12);
  for (const auto& w : trace) {
    const auto a = additive.observe(w.outcome);
    const auto s = fixed.observe(w.outcome);
    ASSERT_NEAR(a.current.lo, s.lo, 1e-14);
    ASSERT_NEAR(a.current.hi, s.hi, 1e-14);
    ASSERT_NEAR(a.bias.lo, s.lo, 1e-14);
    ASSERT_NEAR(a.bias.hi, s.hi, 1e-14);
    ASSERT_EQ(additive.accumulated_shift(), 0.0);
    ASSERT_EQ(additive.accumulated_average_shift(), 0.0);
  }
}

TEST(AdditiveMonitor, CurrentIntervalTracksDriftingBias) {
  const AdditiveDynamics dynamics{0.5, -0.02, 0.02};
  int hits = 0;
  for (int seed = 0; seed < 200; ++seed) {
    AdditiveMonitor monitor({-0.02, 0.02, SoundnessMode::kPointwise, 0.05});
    const Trace trace = simulate(dynamics, 2000, static_cast<std::uint64_t>(seed));
    AdditiveVerdict v;
    for (const auto& w : trace) v = monitor.observe(w.outcome);
    hits += v.current.contains(trace.back().bias);
  }
  EXPECT_GE(hits, 180);
}

}  // namespace
}  // namespace fairwatch
