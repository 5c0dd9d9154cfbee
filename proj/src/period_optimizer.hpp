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

// Minimum clock period over piecewise flip-flop delay models: each FF picks
// one polygon and a working point in it, and stage inequalities tie the
// picks together. Solved as a MILP.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "characterizer.hpp"
#include "milp.hpp"
#include "oracle.hpp"
#include "timing_graph.hpp"

namespace cqsta {

// No polygon assignment satisfies the stage constraints, or an FF has no
// usable polygon.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Too many assignments for exhaustive enumeration.
class EnumerationLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The solver hit a node, time or iteration limit before any feasible point.
class SolverLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SlackRange {
  double s_lo = 0.0, s_hi = 0.0;
  double h_lo = 0.0, h_hi = 0.0;
};

struct TrimBounds {
  double t_low = 0.0;
  double t_high = 0.0;
  std::vector<SlackRange> ff;  // indexed like StageGraph::flipflops
};

TrimBounds compute_trim_bounds(const StageGraph& graph, const PiecewiseDelayModel& model);

struct TrimmedProblem {
  StageGraph graph;                           // reduced
  std::vector<std::size_t> origin;            // reduced FF -> original FF index
  std::vector<std::vector<int>> polygons;     // reduced FF -> indices into model.polygons
  std::vector<std::vector<int>> active;       // original FF -> polygons surviving the box test
  std::size_t removed_stages = 0;
  std::size_t removed_ffs = 0;
  double t_floor = 0.0;
};

// Every FF keeps every polygon; nothing is removed.
TrimmedProblem untrimmed_problem(const StageGraph& graph, const PiecewiseDelayModel& model);

// Exact reduction: polygons that cannot be reached are dropped, polygons
// below the box only when another kept polygon dominates them, and stages
// into constant-delay FFs fold into t_floor.
TrimmedProblem trim(const StageGraph& graph, const PiecewiseDelayModel& model,
                    const TrimBounds& bounds);

struct PolygonVars {
  int z = -1;
  int s = -1;
  int h = -1;
};

struct BuiltMilp {
  MilpModel model;
  int T = -1;
  std::vector<std::vector<PolygonVars>> vars;  // parallel to TrimmedProblem::polygons
};

BuiltMilp build_milp(const TrimmedProblem& problem, const PiecewiseDelayModel& model);

struct WorkingPoint {
  int polygon = -1;  // polygon id
  double s = 0.0;
  double h = 0.0;
  double d_cq = 0.0;  // model delay at (s, h)
};

struct OptimizeOptions {
  bool trim = true;
  BbOptions bb;
};

struct Solution {
  double T = 0.0;
  std::vector<WorkingPoint> points;  // indexed like StageGraph::flipflops
  SolveStatus status = SolveStatus::NoSolution;
  double gap = 0.0;
  // Trimming statistics.
  std::size_t n_ff = 0;
  std::size_t n_ff_trimmed = 0;
  std::size_t removed_stages = 0;
  double avg_polygons = 0.0;  // over the FFs left after trimming
  double t_floor = 0.0;
  bool trim_fallback = false;  // trimmed result failed the full check; re-solved untrimmed
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;
  double runtime_seconds = 0.0;
};

Solution solve_min_period(const StageGraph& graph, const PiecewiseDelayModel& model,
                          const OptimizeOptions& options = {});

struct ValidationVerdict {
  bool constraints_ok = true;  // one-hot, region, plane and stage rows
  bool oracle_valid = true;
  bool model_error_ok = true;
  bool propagation_ok = true;
  double max_model_error = 0.0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

ValidationVerdict validate_solution(const Solution& solution, const StageGraph& graph,
                                    const PiecewiseDelayModel& model, const DelayOracle& oracle);

inline constexpr std::uint64_t kEnumerationLimit = 1'000'000;

double brute_force_min_period(const TrimmedProblem& problem, const PiecewiseDelayModel& model);

}  // namespace cqsta
