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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "milp.hpp"

namespace cqsta {

int MilpModel::add_variable(std::string name, VarKind kind, double lower, double upper) {
  if (kind == VarKind::Binary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  variables.push_back({std::move(name), kind, lower, upper});
  return static_cast<int>(variables.size()) - 1;
}

void MilpModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  constraints.push_back({std::move(name), std::move(terms), sense, rhs});
}

void MilpModel::validate() const {
  const int n = static_cast<int>(variables.size());
  auto check_terms = [&](const std::vector<Term>& terms, const std::string& where) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= n) throw std::invalid_argument(where + ": term references an undeclared variable");
      if (!std::isfinite(t.coef)) throw std::invalid_argument(where + ": non-finite coefficient");
    }
  };
  for (const auto& v : variables) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower == kInfinity || v.upper == -kInfinity) {
      throw std::invalid_argument("variable " + v.name + ": bad bounds");
    }
    if (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0)) {
      throw std::invalid_argument("binary " + v.name + " must stay within [0, 1]");
    }
  }
  check_terms(objective, "objective");
  for (const auto& c : constraints) {
    check_terms(c.terms, "constraint " + c.name);
    if (!std::isfinite(c.rhs)) throw std::invalid_argument("constraint " + c.name + ": non-finite rhs");
  }
}

std::size_t MilpModel::binary_count() const {
  return static_cast<std::size_t>(std::count_if(variables.begin(), variables.end(),
                                                [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration-limit";
    case SolveStatus::NoSolution: return "no-solution";
  }
  return "unknown";
}

double max_violation(const MilpModel& model, const std::vector<double>& values, bool integral) {
  if (values.size() != model.variables.size()) return kInfinity;
  double worst = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const auto& v = model.variables[j];
    const double x = values[j];
    if (!std::isfinite(x)) return kInfinity;
    worst = std::max({worst, v.lower - x, x - v.upper});
    if (integral && v.kind == VarKind::Binary) worst = std::max(worst, std::abs(x - std::round(x)));
  }
  for (const auto& c : model.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * values[t.var];
    if (c.sense != Sense::GreaterEqual) worst = std::max(worst, lhs - c.rhs);
    if (c.sense != Sense::LessEqual) worst = std::max(worst, c.rhs - lhs);
  }
  return worst;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string linear(const MilpModel& model, const std::vector<Term>& terms) {
  std::string out;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double c = terms[k].coef;
    if (k > 0) out += c < 0 ? " - " : " + ";
    else if (c < 0) out += "- ";
    out += num(std::abs(c)) + " " + model.variables[terms[k].var].name;
  }
  return out;
}

}  // namespace

std::string export_lp_text(const MilpModel& model) {
  model.validate();
  std::string out = "\\ generated by cqsta\nMinimize\n obj:";
  if (!model.objective.empty()) {
    out += " " + linear(model, model.objective);
  } else if (!model.variables.empty()) {
    out += " 0 " + model.variables.front().name;
  }
  out += "\n";
  if (!model.constraints.empty()) {
    out += "Subject To\n";
    for (std::size_t i = 0; i < model.constraints.size(); ++i) {
      const auto& c = model.constraints[i];
      const std::string name = c.name.empty() ? "r" + std::to_string(i) : c.name;
      const char* op = c.sense == Sense::LessEqual ? "<=" : c.sense == Sense::Equal ? "=" : ">=";
      const std::string lhs = c.terms.empty() ? "0 " + model.variables.front().name : linear(model, c.terms);
      out += " " + name + ": " + lhs + " " + op + " " + num(c.rhs) + "\n";
    }
  }
  out += "Bounds\n";
  for (const auto& v : model.variables) {
    if (v.kind == VarKind::Binary) continue;
    const bool has_lo = std::isfinite(v.lower), has_up = std::isfinite(v.upper);
    if (!has_lo && !has_up) {
      out += " " + v.name + " free\n";
    } else if (has_lo && has_up) {
      out += " " + num(v.lower) + " <= " + v.name + " <= " + num(v.upper) + "\n";
    } else if (has_lo) {
      out += " " + v.name + " >= " + num(v.lower) + "\n";
    } else {
      out += " -inf <= " + v.name + " <= " + num(v.upper) + "\n";
    }
  }
  if (model.binary_count() > 0) {
    out += "Binaries\n";
    for (const auto& v : model.variables) {
      if (v.kind == VarKind::Binary) out += " " + v.name + "\n";
    }
  }
  out += "End\n";
  return out;
}

}  // namespace cqsta
