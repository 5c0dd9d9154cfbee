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

// Best-first branch and bound over LP relaxations. Nodes carry only their
// branching decisions and the parent's final basis, which the child LP
// starts from. Rows of the form sum(z) = 1 over binaries are treated as
// one-hot groups: a fractional group is branched by splitting its members
// in row order where the LP mass crosses one half, and groups are rounded
// to their largest member for cheap incumbents.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "milp.hpp"

namespace cqsta {

namespace {

constexpr double kIntTol = 1e-6;
constexpr double kPruneTol = 1e-9;

struct Fix {
  int var;
  double value;
};

struct Node {
  double bound = -kInfinity;
  int depth = 0;
  std::int64_t order = 0;
  std::vector<Fix> fixes;
  std::shared_ptr<const std::vector<std::uint8_t>> basis;
};

// Nodes between rounding attempts once past the top of the tree.
constexpr std::int64_t kRoundEvery = 8;
constexpr int kRoundDepth = 4;

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.order > b.order;
  }
};

class Search {
 public:
  Search(const MilpModel& model, const BbOptions& opt)
      : model_(model), opt_(opt), engine_(model, opt.lp), start_(std::chrono::steady_clock::now()) {
    for (int j = 0; j < static_cast<int>(model.variables.size()); ++j) {
      if (model.variables[j].kind == VarKind::Binary) binaries_.push_back(j);
      root_lo_.push_back(engine_.lower(j));
      root_up_.push_back(engine_.upper(j));
    }
    std::vector<char> grouped(model.variables.size(), 0);
    for (const Constraint& c : model.constraints) {
      if (c.sense != Sense::Equal || c.rhs != 1.0 || c.terms.size() < 2) continue;
      bool one_hot = true;
      for (const Term& t : c.terms) {
        one_hot = one_hot && t.coef == 1.0 && model.variables[t.var].kind == VarKind::Binary && !grouped[t.var];
      }
      if (!one_hot) continue;
      std::vector<int> g;
      for (const Term& t : c.terms) {
        grouped[t.var] = 1;
        g.push_back(t.var);
      }
      groups_.push_back(std::move(g));
    }
    for (int j : binaries_) {
      if (!grouped[j]) loose_.push_back(j);
    }
  }

  MilpSolution run();

 private:
  void apply(const std::vector<Fix>& fixes) {
    for (int j : touched_) engine_.set_bounds(j, root_lo_[j], root_up_[j]);
    touched_.clear();
    for (const Fix& f : fixes) {
      engine_.set_bounds(f.var, f.value, f.value);
      touched_.push_back(f.var);
    }
  }

  LpSolution solve_lp(const std::vector<Fix>& fixes, const std::vector<std::uint8_t>* basis) {
    apply(fixes);
    if (basis) engine_.set_basis(*basis);
    LpSolution s = engine_.solve();
    result_.lp_iterations += s.iterations;
    return s;
  }

  static bool fractional(double v) {
    const double f = v - std::floor(v);
    return f > kIntTol && f < 1.0 - kIntTol;
  }

  // Branching on a group: the two children zero out complementary parts of
  // it. Picks the group whose largest member is smallest.
  bool branch_group(const std::vector<double>& x, std::vector<int>& left, std::vector<int>& right) const {
    const std::vector<int>* best = nullptr;
    double best_top = 1.0;
    for (const auto& g : groups_) {
      double top = 0.0;
      bool frac = false;
      for (int j : g) {
        top = std::max(top, x[j]);
        frac = frac || fractional(x[j]);
      }
      if (frac && top < best_top) {
        best_top = top;
        best = &g;
      }
    }
    if (!best) return false;
    // Members still free, in row order.
    std::vector<int> free;
    double mass = 0.0;
    for (int j : *best) {
      if (engine_.upper(j) > 0.5 && engine_.lower(j) < 0.5) {
        free.push_back(j);
        mass += x[j];
      }
    }
    // Cut where the mass crosses one half, kept between the first and last
    // members carrying mass so both children exclude the current point.
    std::size_t first = free.size(), last = 0;
    for (std::size_t k = 0; k < free.size(); ++k) {
      if (x[free[k]] > kIntTol) {
        first = std::min(first, k);
        last = k;
      }
    }
    if (first >= last) return false;
    double cum = 0.0;
    std::size_t cut = first;
    for (; cut < last; ++cut) {
      cum += x[free[cut]];
      if (cum >= 0.5 * mass) break;
    }
    cut = std::min(cut, last - 1);
    left.assign(free.begin(), free.begin() + static_cast<std::ptrdiff_t>(cut) + 1);
    right.assign(free.begin() + static_cast<std::ptrdiff_t>(cut) + 1, free.end());
    return !left.empty() && !right.empty();
  }

  // Fractional binary of `pool` closest to 1/2, lowest index on ties; -1 if
  // all are integral.
  static int branch_var(const std::vector<double>& x, const std::vector<int>& pool) {
    int best = -1;
    double best_dist = 1.0;
    for (int j : pool) {
      const double f = x[j] - std::floor(x[j]);
      if (f <= kIntTol || f >= 1.0 - kIntTol) continue;
      const double d = std::abs(f - 0.5);
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    return best;
  }

  void offer(const LpSolution& s) {
    if (s.objective < incumbent_ - kPruneTol || result_.values.empty()) {
      incumbent_ = s.objective;
      result_.values = s.values;
      for (int j : binaries_) result_.values[j] = std::round(result_.values[j]);
    }
  }

  void dive(std::vector<Fix> fixes, LpSolution s);
  void round(const std::vector<Fix>& fixes, const LpSolution& s);

  bool out_of_budget() const {
    if (result_.nodes >= opt_.node_limit) return true;
    if (opt_.time_limit_seconds > 0) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (elapsed > opt_.time_limit_seconds) return true;
    }
    return false;
  }

  const MilpModel& model_;
  const BbOptions& opt_;
  LpEngine engine_;
  std::chrono::steady_clock::time_point start_;
  std::vector<int> binaries_;
  std::vector<std::vector<int>> groups_;
  std::vector<int> loose_;
  std::vector<double> root_lo_, root_up_;
  std::vector<int> touched_;
  double incumbent_ = kInfinity;
  MilpSolution result_;
};

// Repeatedly zeroes the fractional binary with the smallest value, so the
// LP moves as little as possible on its way to an integral point. When that
// raises the objective, fixing the binary to one is tried as well.
void Search::dive(std::vector<Fix> fixes, LpSolution s) {
  for (std::size_t step = 0; step < binaries_.size(); ++step) {
    if (s.status != SolveStatus::Optimal || s.objective >= incumbent_ - kPruneTol) return;
    int pick = -1;
    double low = 2.0;
    for (int j : binaries_) {
      const double f = s.values[j];
      if (f > kIntTol && f < 1.0 - kIntTol && f < low) {
        low = f;
        pick = j;
      }
    }
    if (pick < 0) {
      offer(s);
      return;
    }
    const double before = s.objective;
    fixes.push_back({pick, 0.0});
    const auto basis = engine_.basis();
    s = solve_lp(fixes, &basis);
    if (s.status != SolveStatus::Optimal || s.objective > before + kPruneTol) {
      // Zeroing it costs period; try committing to it instead.
      auto up = fixes;
      up.back().value = 1.0;
      LpSolution t = solve_lp(up, &basis);
      if (t.status == SolveStatus::Optimal &&
          (s.status != SolveStatus::Optimal || t.objective < s.objective)) {
        fixes = std::move(up);
        s = std::move(t);
      }
    }
  }
}

// Pins every group to its largest member and every other binary to its
// nearest value, then re-solves the continuous part.
void Search::round(const std::vector<Fix>& fixes, const LpSolution& s) {
  std::vector<Fix> all = fixes;
  for (const auto& g : groups_) {
    int pick = g.front();
    for (int j : g) {
      if (s.values[j] > s.values[pick]) pick = j;
    }
    for (int j : g) all.push_back({j, j == pick ? 1.0 : 0.0});
  }
  for (int j : loose_) all.push_back({j, std::round(s.values[j])});
  const auto basis = engine_.basis();
  const LpSolution r = solve_lp(all, &basis);
  if (r.status == SolveStatus::Optimal) offer(r);
}

MilpSolution Search::run() {
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::int64_t order = 0;
  open.push(Node{});
  double open_bound = kInfinity;  // best bound among nodes dropped on budget
  bool limit_hit = false;
  bool lp_trouble = false;

  while (!open.empty()) {
    if (out_of_budget()) {
      limit_hit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent_ - kPruneTol && !result_.values.empty()) continue;
    ++result_.nodes;

    const LpSolution s = solve_lp(node.fixes, node.basis.get());
    if (s.status == SolveStatus::Infeasible) continue;
    if (s.status == SolveStatus::Unbounded) {
      if (node.depth == 0) {
        result_.status = SolveStatus::Unbounded;
        return result_;
      }
      continue;
    }
    if (s.status != SolveStatus::Optimal) {
      // Keep the node's bound honest: it can no longer be explored.
      lp_trouble = true;
      open_bound = std::min(open_bound, node.bound);
      continue;
    }
    if (s.objective >= incumbent_ - kPruneTol && !result_.values.empty()) continue;

    std::vector<int> left, right;
    const bool by_group = branch_group(s.values, left, right);
    // A group the split cannot use falls back to single-variable branching.
    const int j = by_group ? -1 : branch_var(s.values, binaries_);
    if (!by_group && j < 0) {
      offer(s);
      continue;
    }
    auto basis = std::make_shared<const std::vector<std::uint8_t>>(engine_.basis());
    if (node.depth == 0 && opt_.dive) dive(node.fixes, s);
    if (!groups_.empty() && (node.depth < kRoundDepth || result_.nodes % kRoundEvery == 0)) {
      round(node.fixes, s);
    }
    if (out_of_budget()) {
      limit_hit = true;
      open_bound = std::min(open_bound, s.objective);
      break;
    }
    if (s.objective >= incumbent_ - kPruneTol) continue;
    auto push = [&](std::vector<Fix> fixes) {
      Node child;
      child.bound = s.objective;
      child.depth = node.depth + 1;
      child.order = ++order;
      child.fixes = std::move(fixes);
      child.basis = basis;
      open.push(std::move(child));
    };
    if (by_group) {
      for (const auto* zeroed : {&right, &left}) {
        std::vector<Fix> f = node.fixes;
        for (int k : *zeroed) f.push_back({k, 0.0});
        push(std::move(f));
      }
    } else {
      for (double v : {0.0, 1.0}) {
        std::vector<Fix> f = node.fixes;
        f.push_back({j, v});
        push(std::move(f));
      }
    }
    if (opt_.gap_tolerance > 0 && !result_.values.empty()) {
      const double lb = std::min(open.top().bound, open_bound);
      if ((incumbent_ - lb) <= opt_.gap_tolerance * std::max(1.0, std::abs(incumbent_))) break;
    }
  }

  double bound = open_bound;
  if (!open.empty()) bound = std::min(bound, open.top().bound);
  if (result_.values.empty()) {
    result_.status = (limit_hit || lp_trouble) ? SolveStatus::NoSolution : SolveStatus::Infeasible;
    result_.best_bound = bound;
    return result_;
  }
  result_.objective = incumbent_;
  result_.best_bound = std::min(bound, incumbent_);
  result_.gap = (incumbent_ - result_.best_bound) / std::max(1.0, std::abs(incumbent_));
  if (result_.gap <= kPruneTol) result_.gap = 0.0;
  result_.status = result_.gap == 0.0 ? SolveStatus::Optimal : SolveStatus::Feasible;
  return result_;
}

}  // namespace

MilpSolution bb_solve(const MilpModel& model, const BbOptions& options) {
  Search search(model, options);
  MilpSolution sol = search.run();
  if (!sol.values.empty()) {
    // Integral rounding of binaries can move rows by ~1e-6; polish by
    // re-solving the LP with the binaries pinned.
    LpEngine polish(model, options.lp);
    for (int j = 0; j < static_cast<int>(model.variables.size()); ++j) {
      if (model.variables[j].kind == VarKind::Binary) polish.set_bounds(j, sol.values[j], sol.values[j]);
    }
    const LpSolution p = polish.solve();
    if (p.status == SolveStatus::Optimal) {
      sol.values = p.values;
      sol.objective = p.objective;
      sol.best_bound = std::min(sol.best_bound, sol.objective);
    }
  }
  return sol;
}

}  // namespace cqsta
