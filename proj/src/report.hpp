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

// Text tables and JSON documents for the command-line reports.

#pragma once

#include <string>
#include <vector>

#include "characterizer.hpp"
#include "classic_sta.hpp"
#include "period_optimizer.hpp"
#include "timing_graph.hpp"

namespace cqsta {

enum class ReportFormat { Text, Json };

std::string render_validation(const ValidationReport& r, double d_th, ReportFormat f);

std::string render_classic(const ClassicFFParams& p, const ClassicPeriod& t, ReportFormat f);

std::string render_violations(const ViolationCounts& v, double target_T, ReportFormat f);

std::string render_solution(const Solution& s, const StageGraph& g, const ValidationVerdict* verdict,
                            ReportFormat f);

// One comparison row: classic periods at the default and onset degradation
// factors against the optimized period, with classic violations at T_ilp.
struct CompareRow {
  std::string circuit;
  std::size_t n_s = 0;        // flip-flops
  std::size_t n_t = 0;        // flip-flops after trimming
  std::size_t n_p = 0;        // model polygons
  double g_t = 0.0;           // average polygons per trimmed FF
  double T_classic = 0.0;     // default factor
  double T_onset = 0.0;       // onset factor
  double T_ilp = 0.0;
  double t_s = 0.0;           // percent improvement over T_classic
  double t_s_onset = 0.0;     // percent improvement over T_onset
  ViolationCounts violations; // classic checks at T_ilp, default factor
  double runtime = 0.0;       // seconds
  std::string status;
};

CompareRow make_compare_row(std::string circuit, const Solution& s, double T_classic, double T_onset,
                            const ViolationCounts& v, std::size_t n_polygons);

std::string render_compare(const std::vector<CompareRow>& rows, ReportFormat f);
// Inverse of the JSON form, for round-trip checks.
std::vector<CompareRow> parse_compare_json(const std::string& text);

struct SweepRow {
  std::size_t target = 0;
  std::size_t polygons = 0;
  double d_th = 0.0;
  double T = 0.0;
  double runtime = 0.0;
  std::string status;
};

std::string render_sweep(const std::vector<SweepRow>& rows, ReportFormat f);

}  // namespace cqsta
