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

#include "fairwatch/confidence.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fairwatch {
namespace {

// Reference values evaluated with 50-digit arithmetic.
constexpr double kPointwise100 = 0.13581015157406195;
constexpr double kUniform100 = 0.28222389886436854;

TEST(PointwiseRadius, ReferenceValues) {
  EXPECT_NEAR(hoeffding_pointwise_eps(100, 0.05), kPointwise100, 1e-15);
  EXPECT_NEAR(hoeffding_pointwise_eps(400, 0.05), kPointwise100 / 2, 1e-15);
  EXPECT_NEAR(hoeffding_pointwise_eps(400, 0.05), 0.067905075787031, 1e-14);
}

TEST(PointwiseRadius, Domain) {
  EXPECT_THROW(hoeffding_pointwise_eps(1, 2.0), std::domain_error);
  EXPECT_THROW(hoeffding_pointwise_eps(0, 0.05), std::domain_error);
  EXPECT_THROW(hoeffding_pointwise_eps(10, 0.0), std::domain_error);
}

TEST(UniformRadius, ReferenceValues) {
  EXPECT_NEAR(stitched_uniform_eps(100, 0.05), kUniform100, 1e-14);
  EXPECT_NEAR(stitched_uniform_eps(1'000'000'000, 0.05), 1.0618e-4, 1e-7);
  EXPECT_LT(stitched_uniform_eps(1'000'000'000, 0.05), 1e-3);
  EXPECT_TRUE(std::isinf(stitched_uniform_eps(1, 0.05)));
}

TEST(UniformRadius, DominatesPointwise) {
  for (std::size_t t = 2; t <= 1'000'000; t = t < 1000 ? t + 1 : t * 11 / 10) {
    ASSERT_GT(stitched_uniform_eps(t, 0.05), hoeffding_pointwise_eps(t, 0.05))
        << t;
  }
}

TEST(Radius, ModeDispatch) {
  EXPECT_EQ(mean_radius(100, 0.05, SoundnessMode::kPointwise),
            hoeffding_pointwise_eps(100, 0.05));
  EXPECT_EQ(mean_radius(100, 0.05, SoundnessMode::kUniform),
            stitched_uniform_eps(100, 0.05));
  EXPECT_EQ(parse_mode("uniform"), SoundnessMode::kUniform);
  EXPECT_EQ(to_string(SoundnessMode::kPointwise), "pointwise");
  EXPECT_THROW(parse_mode("sometimes"), std::invalid_argument);
}

TEST(Interval, ClampsToUnit) {
  const ConfidenceInterval ci =
      make_interval(-0.2, 1.3, 0.4, 0.05, SoundnessMode::kPointwise);
  EXPECT_EQ(ci.lo, 0.0);
  EXPECT_EQ(ci.hi, 1.0);
  EXPECT_TRUE(ci.contains(0.0));
}

}  // namespace
}  // namespace fairwatch
