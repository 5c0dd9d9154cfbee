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

// Small mixed-integer linear programming kit: model container, a bounded
// revised simplex, best-first branch and bound, and LP-format export.

#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace cqsta {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class Sense { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = kInfinity;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

// Minimization only.
struct MilpModel {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<Term> objective;

  int add_variable(std::string name, VarKind kind, double lower = 0.0, double upper = kInfinity);
  void add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);
  // Throws std::invalid_argument when a term, bound or coefficient is bad.
  void validate() const;

  std::size_t binary_count() const;
};

enum class SolveStatus {
  Optimal,
  Feasible,        // limit reached with an incumbent; gap > 0
  Infeasible,
  Unbounded,
  IterationLimit,  // simplex gave up; never reported as optimal
  NoSolution,      // branch-and-bound limit reached before any incumbent
};

const char* to_string(SolveStatus s);

struct LpOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  std::int64_t iteration_limit = 5'000'000;
  int refactor_interval = 100;
  // Start with dual simplex when the basis is dual feasible but not primal
  // feasible, as after a bound change.
  bool dual_warm_start = true;
};

struct LpSolution {
  SolveStatus status = SolveStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> values;
  std::int64_t iterations = 0;
};

// Binary variables are relaxed to [0, 1].
LpSolution lp_solve(const MilpModel& model, const LpOptions& options = {});

struct BbOptions {
  std::int64_t node_limit = 1'000'000;
  double gap_tolerance = 0.0;  // relative; 0 proves optimality
  double time_limit_seconds = 0.0;  // 0 means none
  bool dive = true;                  // root diving heuristic for an early incumbent
  LpOptions lp;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::NoSolution;
  double objective = 0.0;
  double best_bound = -kInfinity;
  double gap = kInfinity;
  std::vector<double> values;
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;
};

MilpSolution bb_solve(const MilpModel& model, const BbOptions& options = {});

// Largest violation of a row or variable bound (binaries also checked for
// integrality when `integral` is set).
double max_violation(const MilpModel& model, const std::vector<double>& values, bool integral);

std::string export_lp_text(const MilpModel& model);

// Simplex engine with warm starts, shared by lp_solve and bb_solve.
class LpEngine {
 public:
  explicit LpEngine(const MilpModel& model, LpOptions options = {});
  ~LpEngine();
  LpEngine(const LpEngine&) = delete;
  LpEngine& operator=(const LpEngine&) = delete;

  void set_bounds(int var, double lower, double upper);
  double lower(int var) const;
  double upper(int var) const;

  LpSolution solve();

  // Basis snapshot for warm starts: one status byte per column.
  std::vector<std::uint8_t> basis() const;
  void set_basis(const std::vector<std::uint8_t>& b);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cqsta
