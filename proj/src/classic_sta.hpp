// Copyright 2026 The cqsta Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Baseline timing with constant setup time, hold time and clock-to-q delay.

#pragma once

#include <cstddef>

#include "characterizer.hpp"
#include "oracle.hpp"
#include "timing_graph.hpp"

namespace cqsta {

struct ClassicFFParams {
  double t_su = 0.0;
  double t_h = 0.0;
  double d_cq = 0.0;
  double degradation_factor = 1.0;
};

// The setting where the delay "just starts to rise".
inline constexpr double kOnsetFactor = 1.01;
inline constexpr double kDefaultFactor = 1.10;

// t_su (t_h) is the smallest setup (hold) slack, other slack at the anchor,
// whose delay stays within factor x the stable delay; d_cq is that bound.
ClassicFFParams characterize_classic(const DelayOracle& oracle, double degradation_factor,
                                     const CharConfig& cfg);

struct ClassicPeriod {
  double T = 0.0;
  bool no_stages = false;  // T is 0 and means nothing
};

// max over stages of d_cq + d_max + t_su
ClassicPeriod min_period_classic(const StageGraph& graph, const ClassicFFParams& params);

struct ViolationCounts {
  std::size_t setup_paths = 0;
  std::size_t setup_ffs = 0;
  std::size_t hold_paths = 0;
  std::size_t hold_ffs = 0;

  friend bool operator==(const ViolationCounts&, const ViolationCounts&) = default;
};

// Violations are charged to the destination flip-flop.
ViolationCounts count_violations(const StageGraph& graph, const ClassicFFParams& params,
                                 double target_T);

}  // namespace cqsta
