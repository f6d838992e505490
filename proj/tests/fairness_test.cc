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

#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

namespace fairwatch {
namespace {

TEST(OutcomeFairness, CountsHeads) {
  EXPECT_DOUBLE_EQ(outcome_fairness(Trace{{0.5, 1}, {0.5, 0}, {0.5, 1}, {0.5, 0}}),
                   0.5);
  EXPECT_DOUBLE_EQ(outcome_fairness(Trace{{0.2, 1}, {0.9, 1}, {0.4, 1}}), 1.0);
  EXPECT_DOUBLE_EQ(outcome_fairness(Trace{{0.3, 1}, {0.3, 1}, {0.3, 0}}),
                   2.0 / 3.0);
}

TEST(BiasFairness, AveragesBiases) {
  EXPECT_DOUBLE_EQ(bias_fairness(Trace{{0.2, 0}, {0.8, 1}}), 0.5);
  EXPECT_DOUBLE_EQ(bias_fairness(Trace(7, {0.37, 1})), 0.37);
  EXPECT_NEAR(bias_fairness(Trace{{0.1, 0}, {0.1, 1}, {0.4, 0}}), 0.2, 1e-15);
}

TEST(CurrentFairness, LastBias) {
  EXPECT_DOUBLE_EQ(current_fairness(Trace{{0.2, 0}, {0.8, 1}}), 0.8);
  EXPECT_DOUBLE_EQ(current_fairness(Trace{{0.5, 1}}), 0.5);
  EXPECT_DOUBLE_EQ(current_fairness(Trace{{0.1, 0}, {0.9, 0}, {0.3, 1}}), 0.3);
}

TEST(Measures, EmptyPrefixIsADomainError) {
  const Trace empty;
  EXPECT_THROW(outcome_fairness(empty), std::domain_error);
  EXPECT_THROW(bias_fairness(empty), std::domain_error);
  EXPECT_THROW(current_fairness(empty), std::domain_error);
}

TEST(Measures, ParseAndPrint) {
  for (auto kind : {MeasureKind::kOutcome, MeasureKind::kBias,
                    MeasureKind::kCurrent}) {
    EXPECT_EQ(parse_measure(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_measure("odds"), std::invalid_argument);
  EXPECT_TRUE(parse_horizon("inf").is_infinite());
  EXPECT_EQ(parse_horizon("3"), Horizon(3));
  EXPECT_THROW(parse_horizon("-1"), std::invalid_argument);
}

TEST(Pairs, Validation) {
  EXPECT_NO_THROW(validate(BiasOutcomePair{0.0, 0}));
  EXPECT_THROW(validate(BiasOutcomePair{1.5, 0}), std::invalid_argument);
  EXPECT_THROW(validate(BiasOutcomePair{0.5, 2}), std::invalid_argument);
}

TEST(RunningFairness, MatchesBatchMeasures) {
  std::mt19937_64 engine(3);
  std::uniform_real_distribution<double> bias(0.0, 1.0);
  Trace trace;
  RunningFairness running;
  for (int t = 0; t < 2000; ++t) {
    const BiasOutcomePair pair{bias(engine), static_cast<int>(engine() & 1U)};
    trace.push_back(pair);
    running.push(pair);
    ASSERT_DOUBLE_EQ(running.outcome(), outcome_fairness(trace));
    ASSERT_NEAR(running.bias(), bias_fairness(trace), 1e-14);
    ASSERT_DOUBLE_EQ(running.current(), current_fairness(trace));
  }
}

// Appending one toss moves each measure by at most 1/t.
TEST(PrefixBand, OneStepBandOnRandomTraces) {
  std::mt19937_64 engine(5);
  std::uniform_real_distribution<double> bias(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Trace trace{{bias(engine), static_cast<int>(engine() & 1U)}};
    for (int t = 2; t <= 50; ++t) {
      const double before_o = outcome_fairness(trace);
      const double before_b = bias_fairness(trace);
      trace.push_back({bias(engine), static_cast<int>(engine() & 1U)});
      ASSERT_LE(std::abs(outcome_fairness(trace) - before_o), 1.0 / t + 1e-12);
      ASSERT_LE(std::abs(bias_fairness(trace) - before_b), 1.0 / t + 1e-12);
    }
  }
}

TEST(Intervals, IntersectAndValidate) {
  EXPECT_EQ(*intersect({0.3, 0.6}, {0.4, 0.7}), (Interval{0.4, 0.6}));
  EXPECT_FALSE(intersect({0.1, 0.2}, {0.3, 0.4}).has_value());
  EXPECT_THROW(validate(Interval{0.6, 0.4}), std::invalid_argument);
  EXPECT_THROW(validate(Interval{-0.1, 0.4}), std::invalid_argument);
}

TEST(Schedule, DefaultsToUnitAndIntersects) {
  TargetIntervalSchedule schedule;
  EXPECT_EQ(schedule.at(5), Interval::unit());
  schedule.set(1, {0.3, 0.6});
  schedule.set(2, {0.4, 0.7});
  EXPECT_EQ(*schedule.intersection(), (Interval{0.4, 0.6}));
  schedule.set(3, {0.9, 1.0});
  EXPECT_FALSE(schedule.intersection().has_value());
  EXPECT_THROW(schedule.set(0, {0.0, 1.0}), std::invalid_argument);
}

TEST(HeadsRange, RoundsInwardExactly) {
  EXPECT_EQ(heads_range({0.4, 0.6}, 10), (HeadsRange{4, 6}));
  EXPECT_EQ(heads_range({0.5, 1.0}, 2), (HeadsRange{1, 2}));
  EXPECT_EQ(heads_range({0.4, 0.6}, 16), (HeadsRange{7, 9}));
  EXPECT_EQ(heads_range({0.3, 0.3}, 10), (HeadsRange{3, 3}));
  EXPECT_TRUE(heads_range({0.41, 0.49}, 10).empty());
  EXPECT_EQ(heads_range({0.0, 1.0}, 7), (HeadsRange{0, 7}));
}

TEST(HeadsRange, AgreesWithDirectMembership) {
  for (std::size_t n = 1; n <= 60; ++n) {
    for (int a = 0; a <= 20; ++a) {
      for (int b = a; b <= 20; ++b) {
        const Interval target{a / 20.0, b / 20.0};
        const HeadsRange range = heads_range(target, n);
        for (std::size_t h = 0; h <= n; ++h) {
          ASSERT_EQ(range.contains(static_cast<std::int64_t>(h)),
                    target.contains(static_cast<double>(h) / n))
              << n << " " << a << " " << b << " " << h;
        }
      }
    }
  }
}

}  // namespace
}  // namespace fairwatch
