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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fairwatch {

std::string_view to_string(SoundnessMode mode) {
  return mode == SoundnessMode::kPointwise ? "pointwise" : "uniform";
}

SoundnessMode parse_mode(std::string_view name) {
  if (name == "pointwise") return SoundnessMode::kPointwise;
  if (name == "uniform") return SoundnessMode::kUniform;
  throw std::invalid_argument("unknown soundness mode '" + std::string(name) +
                              "'");
}

ConfidenceInterval make_interval(double lo, double hi, double estimate,
                                 double delta, SoundnessMode mode) {
  ConfidenceInterval ci;
  ci.lo = std::clamp(lo, 0.0, 1.0);
  ci.hi = std::clamp(hi, 0.0, 1.0);
  ci.estimate = std::clamp(estimate, 0.0, 1.0);
  ci.delta = delta;
  ci.mode = mode;
  return ci;
}

void validate_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1), got " +
                            std::to_string(delta));
  }
}

double hoeffding_pointwise_eps(std::size_t t, double delta) {
  validate_delta(delta);
  if (t == 0) throw std::domain_error("radius needs at least one sample");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(t)));
}

double stitched_uniform_eps(std::size_t t, double delta) {
  validate_delta(delta);
  if (t < 2) return std::numeric_limits<double>::infinity();
  const double td = static_cast<double>(t);
  const double stitching =
      2.0 * std::log(std::numbers::pi * std::log(td) / std::sqrt(6.0));
  return std::sqrt(1.1 * (stitching + std::log(2.0 / delta)) / td);
}

double mean_radius(std::size_t t, double delta, SoundnessMode mode) {
  return mode == SoundnessMode::kPointwise ? hoeffding_pointwise_eps(t, delta)
                                           : stitched_uniform_eps(t, delta);
}

}  // namespace fairwatch
