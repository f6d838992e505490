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

#include "fairwatch/markov_chain.h"

#include <gtest/gtest.h>

#include <stdexcept>

namespace fairwatch {
namespace {

MarkovDynamics switching(double p_a, double p_b, double eps) {
  MarkovDynamics m;
  m.biases = {p_a, p_b};
  m.kernel = {{std::vector<double>{1 - eps, eps}, {1 - eps, eps}},
              {std::vector<double>{eps, 1 - eps}, {eps, 1 - eps}}};
  m.initial = {0.5, 0.5};
  return m;
}

MarkovDynamics single(double p) {
  MarkovDynamics m;
  m.biases = {p};
  m.kernel = {{std::vector<double>{1.0}, {1.0}}};
  m.initial = {1.0};
  return m;
}

TEST(InducedChain, SingleFairCoin) {
  const InducedChain chain = induced_chain(single(0.5));
  ASSERT_EQ(chain.size(), 3U);
  EXPECT_DOUBLE_EQ(chain.transition(0, chain.pair_state(0, 1)), 0.5);
  EXPECT_DOUBLE_EQ(chain.transition(0, chain.pair_state(0, 0)), 0.5);
  EXPECT_DOUBLE_EQ(chain.transition(chain.pair_state(0, 1), 0), 1.0);
  EXPECT_DOUBLE_EQ(chain.initial(0), 1.0);
}

TEST(InducedChain, SingleAlwaysHeads) {
  const InducedChain chain = induced_chain(single(1.0));
  EXPECT_DOUBLE_EQ(chain.transition(0, chain.pair_state(0, 1)), 1.0);
  EXPECT_DOUBLE_EQ(chain.transition(0, chain.pair_state(0, 0)), 0.0);
}

TEST(InducedChain, RowsAreStochasticAndWeightedByLikelihood) {
  MarkovDynamics m = switching(0.3, 0.8, 0.5);
  const InducedChain chain = induced_chain(m);
  for (Eigen::Index r = 0; r < chain.transition.rows(); ++r) {
    EXPECT_NEAR(chain.transition.row(r).sum(), 1.0, 1e-15);
  }
  EXPECT_DOUBLE_EQ(chain.transition(1, chain.pair_state(1, 1)), 0.8);
  EXPECT_DOUBLE_EQ(chain.transition(1, chain.pair_state(1, 0)), 0.2);
}

TEST(InducedChain, RejectsNonMarkov) {
  EXPECT_THROW(induced_chain(ConstantDynamics{0.5}), std::invalid_argument);
}

TEST(Stationary, SymmetricSwitchIsUniform) {
  const InducedChain chain = induced_chain(switching(0.2, 0.7, 0.5));
  const auto marginals = coin_marginals(chain, stationary_distribution(chain));
  EXPECT_NEAR(marginals[0], 0.5, 1e-12);
  EXPECT_NEAR(marginals[1], 0.5, 1e-12);
}

TEST(Stationary, SlowSwitchingChain) {
  const InducedChain chain = induced_chain(switching(0.9, 0.1, 0.01));
  const Eigen::VectorXd pi = stationary_distribution(chain);
  // Pair-state mass is 1/2 of [0.05, 0.45, 0.45, 0.05] ordered (A,T),(A,H),(B,T),(B,H).
  EXPECT_NEAR(pi(chain.pair_state(0, 0)), 0.025, 1e-12);
  EXPECT_NEAR(pi(chain.pair_state(0, 1)), 0.225, 1e-12);
  EXPECT_NEAR(pi(chain.pair_state(1, 0)), 0.225, 1e-12);
  EXPECT_NEAR(pi(chain.pair_state(1, 1)), 0.025, 1e-12);
  EXPECT_NEAR((pi.transpose() * chain.transition - pi.transpose()).cwiseAbs().maxCoeff(),
              0.0, 1e-12);
  EXPECT_NEAR(pi.sum(), 1.0, 1e-12);
  const auto marginals = coin_marginals(chain, pi);
  EXPECT_NEAR(marginals[0], 0.5, 1e-12);
  EXPECT_NEAR(stationary_head_rate(chain, pi), 0.5, 1e-12);
}

TEST(Stationary, AsymmetricChainAgainstPowerIteration) {
  MarkovDynamics m;
  m.biases = {0.2, 0.6, 0.95};
  m.kernel = {{std::vector<double>{0.5, 0.3, 0.2}, {0.1, 0.1, 0.8}},
              {std::vector<double>{0.3, 0.3, 0.4}, {0.6, 0.2, 0.2}},
              {std::vector<double>{0.2, 0.7, 0.1}, {0.4, 0.4, 0.2}}};
  m.initial = {1, 0, 0};
  const InducedChain chain = induced_chain(m);
  const Eigen::MatrixXd kernel = toss_kernel(chain);
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(kernel.rows(), 1.0 / kernel.rows());
  for (int i = 0; i < 5000; ++i) v = v * kernel;
  const Eigen::VectorXd pi = stationary_distribution(chain);
  for (std::size_t k = 0; k < 3; ++k) {
    for (int x = 0; x < 2; ++x) {
      EXPECT_NEAR(2 * pi(chain.pair_state(k, x)),
                  v(static_cast<Eigen::Index>(2 * k + x)), 1e-12);
    }
  }
}

TEST(Stationary, ReducibleChainIsRejected) {
  MarkovDynamics m;
  m.biases = {0.2, 0.7};
  m.kernel = {{std::vector<double>{1, 0}, {1, 0}},
              {std::vector<double>{0, 1}, {0, 1}}};
  m.initial = {0.5, 0.5};
  EXPECT_THROW(stationary_distribution(induced_chain(m)), std::runtime_error);
}

TEST(Stationary, PeriodicChainIsRejected) {
  // Deterministic coins alternating A, B with deterministic outcomes.
  MarkovDynamics m;
  m.biases = {1.0, 0.0};
  m.kernel = {{std::vector<double>{0, 1}, {0, 1}},
              {std::vector<double>{1, 0}, {1, 0}}};
  m.initial = {1, 0};
  EXPECT_THROW(stationary_distribution(induced_chain(m)), std::runtime_error);
}

TEST(MixingTime, FreshDrawEveryStep) {
  MarkovDynamics m;
  m.biases = {0.3, 0.6};
  m.kernel = {{std::vector<double>{0.5, 0.5}, {0.5, 0.5}},
              {std::vector<double>{0.5, 0.5}, {0.5, 0.5}}};
  m.initial = {0.5, 0.5};
  EXPECT_EQ(estimate_mixing_time(induced_chain(m)), 1U);
  EXPECT_EQ(estimate_mixing_time(induced_chain(single(0.4))), 1U);
}

TEST(MixingTime, SlowSwitchingChain) {
  const std::size_t tau = estimate_mixing_time(induced_chain(switching(0.9, 0.1, 0.01)));
  EXPECT_EQ(tau, 35U);
  EXPECT_THROW(estimate_mixing_time(induced_chain(switching(0.9, 0.1, 0.01)), 0.25, 10),
               std::runtime_error);
}

}  // namespace
}  // namespace fairwatch
