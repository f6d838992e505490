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

#ifndef FAIRWATCH_CONFIDENCE_H_
#define FAIRWATCH_CONFIDENCE_H_

#include <cstddef>
#include <string_view>

#include "fairwatch/fairness.h"

namespace fairwatch {

enum class SoundnessMode { kPointwise, kUniform };

std::string_view to_string(SoundnessMode mode);
SoundnessMode parse_mode(std::string_view name);

// Monitor output: a closed subinterval of [0, 1] plus the point estimate it
// was built around and the error budget it was produced under.
struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 1.0;
  double estimate = 0.5;
  double delta = 1.0;
  SoundnessMode mode = SoundnessMode::kPointwise;

  double width() const { return hi - lo; }
  bool contains(double value, double tolerance = kFairnessTolerance) const {
    return value >= lo - tolerance && value <= hi + tolerance;
  }
  Interval interval() const { return {lo, hi}; }
};

// [lo, hi] clamped into [0, 1]; the estimate is clamped too.
ConfidenceInterval make_interval(double lo, double hi, double estimate,
                                 double delta, SoundnessMode mode);

// Hoeffding radius sqrt(ln(2/delta) / (2t)) for the mean of t samples in
// [0, 1]. Throws std::domain_error for t = 0 or delta outside (0, 1).
double hoeffding_pointwise_eps(std::size_t t, double delta);

// Time-uniform (stitched) radius
//   sqrt(1.1 (2 ln(pi ln(t) / sqrt(6)) + ln(2/delta)) / t),
// valid simultaneously for all t >= 2. Returns +infinity for t < 2 (the
// caller then reports [0, 1]). Throws std::domain_error for delta outside
// (0, 1).
double stitched_uniform_eps(std::size_t t, double delta);

// Radius for the requested soundness mode.
double mean_radius(std::size_t t, double delta, SoundnessMode mode);

// Throws std::domain_error unless 0 < delta < 1.
void validate_delta(double delta);

}  // namespace fairwatch

#endif  // FAIRWATCH_CONFIDENCE_H_
