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

#include "fairwatch/shield.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fairwatch/errors.h"
#include "fairwatch/oracle.h"

namespace fairwatch {
namespace {

std::shared_ptr<const ValueTable> table_for(double p, std::size_t T,
                                            Interval target,
                                            const CostModel& cost = CostModel::unit()) {
  return std::make_shared<const ValueTable>(
      synthesize_value_table(BiasMap::constant(p), T, target, cost));
}

std::vector<int> run(Shield shield, const std::vector<int>& raw, double p) {
  std::vector<int> out;
  for (int x : raw) out.push_back(shield.step({p, x}).enforced.outcome);
  return out;
}

TEST(ValueTable, FairCoinTwoTosses) {
  const auto table = table_for(0.5, 2, {0.5, 1.0});
  EXPECT_DOUBLE_EQ(table->at(0, 0), 0.25);
  EXPECT_EQ(table->at(2, 0), kInfiniteCost);
  EXPECT_EQ(table->at(2, 1), 0.0);
  EXPECT_EQ(table->at(2, 2), 0.0);
}

TEST(ValueTable, TrivialTargetCostsNothing) {
  const auto table = table_for(0.37, 9, Interval::unit());
  for (std::size_t t = 0; t <= 9; ++t) {
    for (std::size_t h = 0; h <= t; ++h) ASSERT_EQ(table->at(t, h), 0.0);
  }
}

TEST(ValueTable, AllHeadsTarget) {
  for (double p : {0.0, 0.3, 0.9}) {
    const std::size_t T = 8;
    const auto table = table_for(p, T, {1.0, 1.0});
    for (std::size_t t = 0; t <= T; ++t) {
      for (std::size_t h = 0; h < t; ++h) ASSERT_EQ(table->at(t, h), kInfiniteCost);
      // Every remaining tail is flipped once.
      ASSERT_NEAR(table->at(t, t), (1 - p) * static_cast<double>(T - t), 1e-12);
    }
  }
}

TEST(ValueTable, SatisfiesOneStepRecurrence) {
  std::mt19937_64 engine(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const CostModel cost = CostModel::bias_weighted();
  for (int instance = 0; instance < 20; ++instance) {
    const double p = u(engine);
    const double a = u(engine), b = u(engine);
    const Interval target{std::min(a, b), std::max(a, b)};
    const std::size_t T = 5 + instance;
    const auto table = table_for(p, T, target, cost);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t h = 0; h <= t; ++h) {
        const double head = std::min(table->at(t + 1, h + 1), cost(p, 1, 0) + table->at(t + 1, h));
        const double tail = std::min(table->at(t + 1, h), cost(p, 0, 1) + table->at(t + 1, h + 1));
        const double expected = (p > 0 ? p * head : 0.0) + (p < 1 ? (1 - p) * tail : 0.0);
        if (std::isinf(expected)) {
          ASSERT_EQ(table->at(t, h), kInfiniteCost);
        } else {
          ASSERT_NEAR(table->at(t, h), expected, 1e-12);
        }
      }
    }
  }
}

TEST(ValueTable, ZeroProbabilityBranchIgnoresInfinity) {
  // With p = 1 the tail branch never happens, so only heads matter.
  const auto table = table_for(1.0, 3, {1.0, 1.0});
  EXPECT_EQ(table->at(0, 0), 0.0);
}

TEST(ValueTable, CsvRoundTrip) {
  const auto table = table_for(0.5, 6, {0.4, 0.6}, CostModel::bias_weighted());
  std::stringstream buffer;
  table->write_csv(buffer);
  const std::string text = buffer.str();
  EXPECT_EQ(text.rfind("# fairwatch-value-table v1\n", 0), 0U);
  EXPECT_NE(text.find("inf"), std::string::npos);
  const ValueTable back = ValueTable::read_csv(buffer);
  EXPECT_EQ(back.window(), 6U);
  EXPECT_EQ(back.target(), (Interval{0.4, 0.6}));
  EXPECT_EQ(back.target_heads(), table->target_heads());
  EXPECT_EQ(back.cost_descriptor(), "bias-weighted");
  for (std::size_t t = 0; t <= 6; ++t) {
    for (std::size_t h = 0; h <= t; ++h) ASSERT_EQ(back.at(t, h), table->at(t, h));
  }
  std::istringstream bad("t,h,v\n0,0,1\n");
  EXPECT_THROW(ValueTable::read_csv(bad), std::invalid_argument);
}

TEST(Shield, FlipsExactlyOneTailWhenNeeded) {
  const auto table = table_for(0.5, 2, {0.5, 1.0});
  const Shield shield(table, BiasMap::constant(0.5), CostModel::unit());
  const auto tt = run(shield, {0, 0}, 0.5);
  EXPECT_EQ(tt[0] + tt[1], 1);
  EXPECT_EQ(run(shield, {1, 1}, 0.5), (std::vector<int>{1, 1}));
  EXPECT_EQ(run(shield, {1, 0}, 0.5), (std::vector<int>{1, 0}));
  EXPECT_EQ(run(shield, {0, 1}, 0.5), (std::vector<int>{0, 1}));
}

TEST(Shield, IdentityOnTrivialTargetAndAfterWindow) {
  const auto table = table_for(0.5, 4, Interval::unit());
  Shield shield(table, BiasMap::constant(0.5), CostModel::unit());
  for (int x : {0, 0, 0, 0, 1, 0, 1}) EXPECT_EQ(shield.step({0.5, x}).enforced.outcome, x);
  EXPECT_EQ(shield.total_cost(), 0.0);
}

TEST(Shield, InfeasibleStateThrows) {
  const auto table = table_for(0.5, 3, {1.0, 1.0});
  Shield shield(table, BiasMap::constant(0.5), CostModel::unit());
  EXPECT_THROW(shield.decide(1, 0, 0), InfeasibleError);
}

TEST(Shield, SoundOnEveryStream) {
  for (double p : {0.2, 0.5}) {
    const auto table = table_for(p, 12, {0.4, 0.6});
    ASSERT_TRUE(table->feasible());
    for (std::uint32_t mask = 0; mask < (1U << 12); ++mask) {
      Shield shield(table, BiasMap::constant(p), CostModel::unit());
      for (int t = 0; t < 12; ++t) shield.step({p, static_cast<int>((mask >> t) & 1U)});
      ASSERT_GE(shield.heads(), 5U);
      ASSERT_LE(shield.heads(), 7U);
    }
  }
}

TEST(Shield, ExpectedCostEqualsValue) {
  const double p = 0.5;
  const auto table = table_for(p, 10, {0.4, 0.6});
  double exact = 0;
  for (std::uint32_t mask = 0; mask < (1U << 10); ++mask) {
    Shield shield(table, BiasMap::constant(p), CostModel::unit());
    for (int t = 0; t < 10; ++t) shield.step({p, static_cast<int>((mask >> t) & 1U)});
    exact += shield.total_cost() / 1024.0;
  }
  EXPECT_NEAR(exact, table->at(0, 0), 1e-12);

  const int trials = 100000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < trials; ++i) {
    Shield shield(table, BiasMap::constant(p), CostModel::unit());
    Rng rng(static_cast<std::uint64_t>(i));
    for (int t = 0; t < 10; ++t) shield.step({p, rng.bernoulli(p)});
    sum += shield.total_cost();
    sum_sq += shield.total_cost() * shield.total_cost();
  }
  const double mean = sum / trials;
  const double sd = std::sqrt((sum_sq / trials - mean * mean) / trials);
  EXPECT_NEAR(mean, table->at(0, 0), 3 * sd);
}

TEST(Shield, MatchesFullTreeOptimum) {
  std::mt19937_64 engine(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int instance = 0; instance < 30; ++instance) {
    const double p = u(engine);
    const double a = u(engine), b = u(engine);
    const Interval target{std::min(a, b), std::max(a, b)};
    const std::size_t T = 1 + instance % 10;
    const CostModel cost = instance % 2 ? CostModel::unit() : CostModel::bias_weighted();
    const auto table = table_for(p, T, target, cost);
    const double brute = oracle::enumerate_optimal_cost(
        oracle::history_bias(ConstantDynamics{p}), T, target,
        [&](double q, int from, int to) { return cost(q, from, to); });
    if (std::isinf(brute)) {
      ASSERT_EQ(table->at(0, 0), kInfiniteCost);
    } else {
      ASSERT_NEAR(table->at(0, 0), brute, 1e-9);
    }
  }
}

TEST(CostModel, KeepingIsFree) {
  for (const auto& cost : {CostModel::unit(), CostModel::bias_weighted()}) {
    for (double p : {0.0, 0.3, 1.0}) {
      EXPECT_EQ(cost(p, 0, 0), 0.0);
      EXPECT_EQ(cost(p, 1, 1), 0.0);
    }
  }
  EXPECT_DOUBLE_EQ(CostModel::bias_weighted()(0.3, 1, 0), 0.3);
  EXPECT_DOUBLE_EQ(CostModel::bias_weighted()(0.3, 0, 1), 0.7);
  EXPECT_THROW(CostModel::parse("free"), std::invalid_argument);
}

TEST(PeriodicShield, WindowTargetShiftsByAccumulatedExcess) {
  // After one window of 10 with 6 heads the next window needs [8-6, 12-6].
  EXPECT_EQ(window_target({0.4, 0.6}, 10, 10, 6), (HeadsRange{2, 6}));
  EXPECT_EQ(window_target({0.4, 0.6}, 10, 10, 4), (HeadsRange{4, 8}));
  EXPECT_EQ(window_target({0.4, 0.6}, 10, 0, 0), (HeadsRange{4, 6}));
  EXPECT_TRUE(window_target({0.9, 1.0}, 2, 8, 0).empty());
}

TEST(PeriodicShield, EndpointsStayInside) {
  const Interval target{0.4, 0.6};
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    PeriodicShield shield(10, target, BiasMap::constant(0.3), CostModel::unit());
    Rng rng(seed);
    for (int t = 1; t <= 50; ++t) {
      shield.step({0.3, rng.bernoulli(0.3)});
      if (t % 10 == 0) {
        ASSERT_TRUE(target.contains(static_cast<double>(shield.heads()) / t));
      }
    }
  }
}

TEST(PeriodicShield, TrivialTargetIsIdentity) {
  PeriodicShield shield(3, Interval::unit(), BiasMap::constant(0.5), CostModel::unit());
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    const int x = rng.bernoulli(0.5);
    EXPECT_EQ(shield.step({0.5, x}).enforced.outcome, x);
  }
}

TEST(PeriodicShield, InfeasibleWindowPolicies) {
  // Bias 0 with target [0.9, 1]: both tails of each window get flipped.
  const Interval target{0.9, 1.0};
  PeriodicShield strict(2, target, BiasMap::constant(0.0), CostModel::unit());
  EXPECT_EQ(strict.step({0.0, 0}).enforced.outcome, 1);
  EXPECT_EQ(strict.step({0.0, 0}).enforced.outcome, 1);
  EXPECT_TRUE(strict.events().empty());

  const Interval narrow{0.5, 0.5};
  PeriodicShield saturating(1, narrow, BiasMap::constant(0.5), CostModel::unit(),
                            InfeasibleWindowPolicy::kSaturate);
  // No head count of a single toss gives 1/2.
  EXPECT_NO_THROW(saturating.step({0.5, 1}));
  EXPECT_EQ(saturating.events().size(), 1U);
  PeriodicShield failing(1, narrow, BiasMap::constant(0.5), CostModel::unit());
  EXPECT_THROW(failing.step({0.5, 1}), InfeasibleError);
}

TEST(DynamicShield, AdditiveBiasMap) {
  const BiasMap map = BiasMap::additive({0.5, -0.1, 0.1});
  EXPECT_NEAR(map(2, 2), 0.7, 1e-15);
  EXPECT_NEAR(map(2, 0), 0.3, 1e-15);
  EXPECT_EQ(map(20, 20), 1.0);
}

TEST(DynamicShield, ZeroShiftMatchesStaticSynthesis) {
  const Shield dynamic = dynamic_shield(AdditiveDynamics{0.4, 0.0, 0.0}, 9,
                                        {0.3, 0.5}, CostModel::unit());
  const auto fixed = table_for(0.4, 9, {0.3, 0.5});
  for (std::size_t t = 0; t <= 9; ++t) {
    for (std::size_t h = 0; h <= t; ++h) {
      ASSERT_EQ(dynamic.table().at(t, h), fixed->at(t, h));
    }
  }
}

TEST(DynamicShield, MatchesFullTreeOptimumForAdditiveDynamics) {
  for (const AdditiveDynamics d : {AdditiveDynamics{0.5, -0.1, 0.1},
                                   AdditiveDynamics{0.3, 0.05, 0.02},
                                   AdditiveDynamics{0.8, -0.2, 0.15}}) {
    for (std::size_t T : {3UL, 7UL, 12UL}) {
      const Shield shield = dynamic_shield(d, T, {0.4, 0.6}, CostModel::unit());
      const double brute = oracle::enumerate_optimal_cost(
          oracle::history_bias(d), T, {0.4, 0.6},
          [](double, int, int) { return 1.0; });
      if (std::isinf(brute)) {
        ASSERT_EQ(shield.table().at(0, 0), kInfiniteCost);
      } else {
        ASSERT_NEAR(shield.table().at(0, 0), brute, 1e-9);
      }
    }
  }
}

TEST(DynamicShield, RejectsMarkovDynamics) {
  MarkovDynamics m;
  m.biases = {0.2, 0.8};
  m.kernel = {{std::vector<double>{0.5, 0.5}, {0.5, 0.5}},
              {std::vector<double>{0.5, 0.5}, {0.5, 0.5}}};
  m.initial = {0.5, 0.5};
  EXPECT_THROW(dynamic_shield(m, 4, {0.4, 0.6}, CostModel::unit()),
               std::invalid_argument);
}

}  // namespace
}  // namespace fairwatch
