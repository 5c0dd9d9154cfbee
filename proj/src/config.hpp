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

// Flat `key = value` run configuration. Keys mirror the CharConfig and
// AnalyticParams field names; unknown keys are rejected.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "characterizer.hpp"
#include "classic_sta.hpp"
#include "oracle.hpp"

namespace cqsta {

struct RunSettings {
  CharConfig characterization;
  AnalyticParams analytic;
  // Sweep dump to use instead of the analytic oracle.
  std::optional<std::string> grid_file;
  double grid_f_bar = 200.0;
  // Explicit classic parameters; characterized from the oracle when absent.
  std::optional<double> t_su, t_h, d_cq;
};

// Throws ParseError with the line number.
RunSettings parse_settings(std::string_view text);
std::string write_settings(const RunSettings& s);

// Returns the classic parameters from explicit keys when all three are set.
std::optional<ClassicFFParams> explicit_classic(const RunSettings& s);

}  // namespace cqsta
