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

// Bounded-variable revised primal simplex.
//
// Every row gets a logical variable y_i with A x - y = 0, so row bounds
// become variable bounds and the all-logical basis (-I) is always a valid
// start. The basis is held as a sparse LU (Eigen) plus a product-form eta
// file, refactored every LpOptions::refactor_interval pivots.
//
// Phase 1 is the composite one: while any basic variable is out of bounds the
// cost vector is the gradient of the total bound violation. That works from
// any basis, which is what makes warm starts in branch and bound cheap.
// Ratio tests use the Harris two-pass rule; pricing is Dantzig, dropping to
// Bland's rule after a run of non-improving pivots.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "milp.hpp"

namespace cqsta {

namespace {

enum : std::uint8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFree = 3 };

constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-13;
constexpr int kStallLimit = 50;
constexpr double kShiftTol = 1e-6;

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

}  // namespace

struct LpEngine::Impl {
  LpOptions opt;
  int n = 0;  // structural columns
  int m = 0;  // rows = logical columns
  std::vector<int> col_start, row_idx;
  std::vector<double> val;
  std::vector<double> cost, lo, up, x;
  std::vector<int> head, pos;
  std::vector<std::uint8_t> status;

  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  struct Eta {
    int r = 0;
    double pivot = 1.0;
    std::vector<int> idx;
    std::vector<double> v;
  };
  std::vector<Eta> etas;
  bool factored = false;  // lu plus etas represent the current head

  Impl(const MilpModel& model, LpOptions o) : opt(o) {
    model.validate();
    n = static_cast<int>(model.variables.size());
    m = static_cast<int>(model.constraints.size());
    const int total = n + m;
    cost.assign(total, 0.0);
    lo.assign(total, 0.0);
    up.assign(total, 0.0);
    for (int j = 0; j < n; ++j) {
      const auto& v = model.variables[j];
      lo[j] = v.kind == VarKind::Binary ? std::max(0.0, v.lower) : v.lower;
      up[j] = v.kind == VarKind::Binary ? std::min(1.0, v.upper) : v.upper;
    }
    for (const auto& t : model.objective) cost[t.var] += t.coef;

    // Column-major copy of the structural matrix; duplicate terms add up.
    std::vector<std::vector<std::pair<int, double>>> cols(n);
    for (int i = 0; i < m; ++i) {
      const auto& c = model.constraints[i];
      for (const auto& t : c.terms) cols[t.var].push_back({i, t.coef});
      lo[n + i] = c.sense == Sense::LessEqual ? -kInfinity : c.rhs;
      up[n + i] = c.sense == Sense::GreaterEqual ? kInfinity : c.rhs;
    }
    col_start.assign(n + 1, 0);
    for (int j = 0; j < n; ++j) {
      auto& cj = cols[j];
      std::sort(cj.begin(), cj.end());
      for (std::size_t k = 0; k < cj.size(); ++k) {
        if (k + 1 < cj.size() && cj[k + 1].first == cj[k].first) {
          cj[k + 1].second += cj[k].second;
          continue;
        }
        if (cj[k].second != 0.0) {
          row_idx.push_back(cj[k].first);
          val.push_back(cj[k].second);
        }
      }
      col_start[j + 1] = static_cast<int>(row_idx.size());
    }
    x.assign(total, 0.0);
    slack_basis();
  }

  std::uint8_t resting_status(int j) const {
    if (std::isfinite(lo[j])) return kAtLower;
    if (std::isfinite(up[j])) return kAtUpper;
    return kFree;
  }

  double nonbasic_value(int j) const {
    switch (status[j]) {
      case kAtLower: return std::isfinite(lo[j]) ? lo[j] : (std::isfinite(up[j]) ? up[j] : 0.0);
      case kAtUpper: return std::isfinite(up[j]) ? up[j] : (std::isfinite(lo[j]) ? lo[j] : 0.0);
      default: return 0.0;
    }
  }

  void slack_basis() {
    factored = false;
    const int total = n + m;
    status.assign(total, kAtLower);
    pos.assign(total, -1);
    head.assign(m, 0);
    for (int j = 0; j < n; ++j) status[j] = resting_status(j);
    for (int i = 0; i < m; ++i) {
      head[i] = n + i;
      pos[n + i] = i;
      status[n + i] = kBasic;
    }
  }

  template <class F>
  void for_column(int j, F&& f) const {
    if (j >= n) {
      f(j - n, -1.0);
      return;
    }
    for (int k = col_start[j]; k < col_start[j + 1]; ++k) f(row_idx[k], val[k]);
  }

  double dot_column(int j, const Eigen::VectorXd& w) const {
    if (j >= n) return -w[j - n];
    double s = 0.0;
    for (int k = col_start[j]; k < col_start[j + 1]; ++k) s += val[k] * w[row_idx[k]];
    return s;
  }

  // Returns false when the basis matrix is singular.
  bool refactor() {
    etas.clear();
    std::vector<Eigen::Triplet<double, int>> trip;
    for (int p = 0; p < m; ++p) {
      for_column(head[p], [&](int i, double a) { trip.emplace_back(i, p, a); });
    }
    SpMat b(m, m);
    b.setFromTriplets(trip.begin(), trip.end());
    b.makeCompressed();
    lu.analyzePattern(b);
    lu.factorize(b);
    factored = lu.info() == Eigen::Success;
    return factored;
  }

  void factor_or_reset() {
    if (m == 0) return;
    if (!refactor()) {
      slack_basis();
      for (int j = 0; j < n + m; ++j) {
        if (pos[j] < 0) x[j] = nonbasic_value(j);
      }
      if (!refactor()) throw std::runtime_error("slack basis failed to factor");
    }
  }

  Eigen::VectorXd ftran(Eigen::VectorXd v) const {
    if (m == 0) return v;
    Eigen::VectorXd w = lu.solve(v);
    for (const Eta& e : etas) {
      const double vr = w[e.r] / e.pivot;
      if (vr != 0.0) {
        for (std::size_t k = 0; k < e.idx.size(); ++k) {
          if (e.idx[k] != e.r) w[e.idx[k]] -= e.v[k] * vr;
        }
      }
      w[e.r] = vr;
    }
    return w;
  }

  Eigen::VectorXd btran(Eigen::VectorXd w) const {
    if (m == 0) return w;
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double s = w[it->r];
      for (std::size_t k = 0; k < it->idx.size(); ++k) {
        if (it->idx[k] != it->r) s -= it->v[k] * w[it->idx[k]];
      }
      w[it->r] = s / it->pivot;
    }
    return lu.transpose().solve(w);
  }

  void compute_basics() {
    for (int j = 0; j < n + m; ++j) {
      if (pos[j] < 0) x[j] = nonbasic_value(j);
    }
    if (m == 0) return;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < n + m; ++j) {
      if (pos[j] >= 0 || x[j] == 0.0) continue;
      const double xj = x[j];
      for_column(j, [&](int i, double a) { rhs[i] -= a * xj; });
    }
    const Eigen::VectorXd xb = ftran(std::move(rhs));
    for (int p = 0; p < m; ++p) x[head[p]] = xb[p];
  }

  double objective() const {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += cost[j] * x[j];
    return s;
  }

  LpSolution finish(SolveStatus st, std::int64_t iters) const {
    LpSolution sol;
    sol.status = st;
    sol.iterations = iters;
    if (st == SolveStatus::Optimal) {
      sol.values.assign(x.begin(), x.begin() + n);
      sol.objective = objective();
    }
    return sol;
  }

  // Reduced costs of the nonbasic columns under costs `c`. Boxed columns on
  // the wrong bound are flipped and small errors elsewhere absorbed into
  // `c`; false when the basis is not dual feasible.
  bool dual_start(std::vector<double>& c, std::vector<double>& d, double dtol) {
    Eigen::VectorXd cb(m);
    for (int p = 0; p < m; ++p) cb[p] = c[head[p]];
    const Eigen::VectorXd y = btran(cb);
    bool flipped = false;
    for (int j = 0; j < n + m; ++j) {
      d[j] = 0.0;
      if (pos[j] >= 0) continue;
      d[j] = c[j] - dot_column(j, y);
      if (lo[j] == up[j]) continue;
      const bool wrong = (status[j] == kAtLower && d[j] < -dtol) || (status[j] == kAtUpper && d[j] > dtol) ||
                         (status[j] == kFree && std::abs(d[j]) > dtol);
      if (!wrong) continue;
      if (status[j] == kAtLower && std::isfinite(lo[j]) && std::isfinite(up[j])) {
        status[j] = kAtUpper;
        flipped = true;
      } else if (status[j] == kAtUpper && std::isfinite(lo[j]) && std::isfinite(up[j])) {
        status[j] = kAtLower;
        flipped = true;
      } else if (std::abs(d[j]) <= kShiftTol) {
        // Drift on a one-sided column: shift its cost instead.
        c[j] -= d[j];
        d[j] = 0.0;
      } else {
        return false;
      }
    }
    if (flipped) compute_basics();
    return true;
  }

  enum class DualResult { Feasible, Infeasible, Abandoned };

  // Dual simplex from a dual feasible basis until the basics are within
  // bounds. This is the fast path after a branching bound change; anything
  // unusual hands the basis back to the primal loop.
  DualResult dual_phase(std::int64_t& iter, double ftol, double dtol) {
    // Small cost shifts toward dual feasibility break the ties that make
    // these relaxations highly dual degenerate; the primal loop afterwards
    // restores the true costs.
    std::vector<double> pc(n + m);
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (int j = 0; j < n + m; ++j) {
      h ^= h >> 33;
      h *= 0xff51afd7ed558ccdULL;
      h ^= h >> 29;
      const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
      const double eps = (1e-7 + 1e-6 * u) * (1.0 + std::abs(cost[j]));
      pc[j] = cost[j];
      if (pos[j] < 0 && lo[j] != up[j]) {
        if (status[j] == kAtLower && std::isfinite(lo[j])) pc[j] += eps;
        if (status[j] == kAtUpper && std::isfinite(up[j])) pc[j] -= eps;
      }
    }
    std::vector<double> d(n + m);
    if (!dual_start(pc, d, dtol)) return DualResult::Abandoned;
    bool fresh = true;
    int retries = 0, stall = 0;
    std::vector<double> row(n + m);
    while (iter < opt.iteration_limit) {
      // A long run of zero dual steps means cycling.
      if (stall > 20 * kStallLimit) return DualResult::Abandoned;
      if (static_cast<int>(etas.size()) >= opt.refactor_interval) {
        factor_or_reset();
        compute_basics();
        if (!dual_start(pc, d, dtol)) return DualResult::Abandoned;
        fresh = true;
      }
      int r = -1;
      double worst = ftol;
      for (int p = 0; p < m; ++p) {
        const int k = head[p];
        const double v = std::max(lo[k] - x[k], x[k] - up[k]);
        if (v > worst) {
          worst = v;
          r = p;
        }
      }
      if (r < 0) return DualResult::Feasible;
      const int leaving = head[r];
      const double sgn = x[leaving] < lo[leaving] ? 1.0 : -1.0;
      Eigen::VectorXd er = Eigen::VectorXd::Zero(m);
      er[r] = 1.0;
      const Eigen::VectorXd rho = btran(std::move(er));

      // Harris pass 1 on the dual step, then the largest pivot within it.
      double t_max = kInfinity;
      for (int j = 0; j < n + m; ++j) {
        row[j] = 0.0;
        if (pos[j] >= 0 || lo[j] == up[j]) continue;
        const double ap = sgn * dot_column(j, rho);
        row[j] = ap;
        if (std::abs(ap) < kPivotTol) continue;
        if (status[j] == kAtLower && ap < 0) {
          t_max = std::min(t_max, (std::max(d[j], 0.0) + dtol) / -ap);
        } else if (status[j] == kAtUpper && ap > 0) {
          t_max = std::min(t_max, (std::max(-d[j], 0.0) + dtol) / ap);
        } else if (status[j] == kFree) {
          t_max = std::min(t_max, (std::abs(d[j]) + dtol) / std::abs(ap));
        }
      }
      int q = -1;
      double best = 0.0, t = 0.0;
      for (int j = 0; j < n + m && std::isfinite(t_max); ++j) {
        const double ap = row[j];
        if (std::abs(ap) < kPivotTol || pos[j] >= 0 || lo[j] == up[j]) continue;
        double dd;
        if (status[j] == kAtLower && ap < 0) {
          dd = std::max(d[j], 0.0);
        } else if (status[j] == kAtUpper && ap > 0) {
          dd = std::max(-d[j], 0.0);
        } else if (status[j] == kFree) {
          dd = std::abs(d[j]);
        } else {
          continue;
        }
        if (dd / std::abs(ap) <= t_max && std::abs(ap) > best) {
          best = std::abs(ap);
          q = j;
          t = dd / std::abs(ap);
        }
      }
      if (q < 0) {
        if (fresh || retries >= 2) return DualResult::Infeasible;
        // Re-check on a clean factorization before trusting the ray.
        ++retries;
        factor_or_reset();
        compute_basics();
        if (!dual_start(pc, d, dtol)) return DualResult::Abandoned;
        fresh = true;
        continue;
      }

      Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
      for_column(q, [&](int i, double v) { a[i] += v; });
      const Eigen::VectorXd col = ftran(std::move(a));
      if (std::abs(col[r] - sgn * row[q]) > 1e-7 * (1.0 + std::abs(col[r]))) {
        // Row and column disagree on the pivot: numerical trouble.
        if (fresh) return DualResult::Abandoned;
        factor_or_reset();
        compute_basics();
        if (!dual_start(pc, d, dtol)) return DualResult::Abandoned;
        fresh = true;
        continue;
      }

      ++iter;
      fresh = false;
      stall = t > 0.0 ? 0 : stall + 1;
      for (int j = 0; j < n + m; ++j) {
        if (row[j] != 0.0) d[j] += t * row[j];
      }
      d[q] = 0.0;
      d[leaving] = sgn * t;
      const double target = sgn > 0 ? lo[leaving] : up[leaving];
      const double step = (x[leaving] - target) / col[r];
      x[q] += step;
      for (int p = 0; p < m; ++p) {
        if (col[p] != 0.0) x[head[p]] -= col[p] * step;
      }
      x[leaving] = target;
      status[leaving] = sgn > 0 || lo[leaving] == up[leaving] ? kAtLower : kAtUpper;
      pos[leaving] = -1;
      head[r] = q;
      pos[q] = r;
      status[q] = kBasic;
      push_eta(r, col);
    }
    return DualResult::Abandoned;
  }

  void push_eta(int r, const Eigen::VectorXd& alpha) {
    Eta e;
    e.r = r;
    e.pivot = alpha[r];
    for (int p = 0; p < m; ++p) {
      if (std::abs(alpha[p]) > kDropTol || p == r) {
        e.idx.push_back(p);
        e.v.push_back(alpha[p]);
      }
    }
    etas.push_back(std::move(e));
  }

  LpSolution solve() {
    for (int j = 0; j < n + m; ++j) {
      if (lo[j] > up[j]) return finish(SolveStatus::Infeasible, 0);
    }
    // Half the reported tolerance internally, so that Harris steps never
    // leave a final violation above feasibility_tol.
    const double ftol = 0.5 * opt.feasibility_tol, dtol = opt.optimality_tol;
    // Warm starts on an unchanged basis keep the previous factorization.
    if (!factored) factor_or_reset();
    compute_basics();

    std::int64_t iter = 0;
    if (opt.dual_warm_start && dual_phase(iter, ftol, dtol) == DualResult::Infeasible) {
      return finish(SolveStatus::Infeasible, iter);
    }
    double last_progress = kInfinity;
    bool last_phase1 = true;
    int stall = 0;
    bool fresh = true;  // factorization and basics recomputed since the last pivot
    int verify_rounds = 0;
    Eigen::VectorXd cb(m);

    for (;;) {
      if (iter >= opt.iteration_limit) return finish(SolveStatus::IterationLimit, iter);
      if (static_cast<int>(etas.size()) >= opt.refactor_interval) {
        factor_or_reset();
        compute_basics();
        fresh = true;
      }

      bool phase1 = false;
      double infeas = 0.0;
      for (int p = 0; p < m; ++p) {
        const int k = head[p];
        if (x[k] < lo[k] - ftol) {
          cb[p] = -1.0;
          infeas += lo[k] - x[k];
          phase1 = true;
        } else if (x[k] > up[k] + ftol) {
          cb[p] = 1.0;
          infeas += x[k] - up[k];
          phase1 = true;
        } else {
          cb[p] = 0.0;
        }
      }
      if (!phase1) {
        for (int p = 0; p < m; ++p) cb[p] = cost[head[p]];
      }
      const double progress = phase1 ? infeas : objective();
      if (phase1 != last_phase1) {
        last_progress = kInfinity;
        last_phase1 = phase1;
      }
      if (progress < last_progress - 1e-12 * (1.0 + std::abs(last_progress))) {
        stall = 0;
      } else {
        ++stall;
      }
      last_progress = std::min(last_progress, progress);
      const bool bland = stall > kStallLimit;

      const Eigen::VectorXd pi = btran(cb);

      // Pricing.
      int q = -1;
      int dir = 0;
      double best = 0.0;
      for (int j = 0; j < n + m; ++j) {
        if (pos[j] >= 0 || lo[j] == up[j]) continue;
        const double dj = (phase1 ? 0.0 : cost[j]) - dot_column(j, pi);
        int d = 0;
        if (status[j] == kAtLower && dj < -dtol) {
          d = 1;
        } else if (status[j] == kAtUpper && dj > dtol) {
          d = -1;
        } else if (status[j] == kFree && std::abs(dj) > dtol) {
          d = dj < 0 ? 1 : -1;
        }
        if (d == 0) continue;
        if (bland) {
          q = j;
          dir = d;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          q = j;
          dir = d;
        }
      }

      if (q < 0) {
        if (!fresh && verify_rounds < 3) {
          // Confirm on recomputed basics before declaring anything; a long
          // eta file gets a clean factorization first.
          ++verify_rounds;
          if (static_cast<int>(etas.size()) > opt.refactor_interval / 4) factor_or_reset();
          compute_basics();
          fresh = true;
          continue;
        }
        return finish(phase1 ? SolveStatus::Infeasible : SolveStatus::Optimal, iter);
      }

      Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
      for_column(q, [&](int i, double v) { a[i] += v; });
      const Eigen::VectorXd alpha = ftran(std::move(a));

      // Harris pass 1: largest step keeping basics within relaxed bounds.
      double theta_max = kInfinity;
      auto target_of = [&](int p, double rate, double& target) {
        const int k = head[p];
        const double v = x[k];
        if (rate > 0) {
          if (v < lo[k] - ftol) {
            target = lo[k];
          } else if (v > up[k] + ftol) {
            return false;
          } else {
            target = up[k];
          }
        } else {
          if (v > up[k] + ftol) {
            target = up[k];
          } else if (v < lo[k] - ftol) {
            return false;
          } else {
            target = lo[k];
          }
        }
        return std::isfinite(target);
      };
      for (int p = 0; p < m; ++p) {
        if (std::abs(alpha[p]) < kPivotTol) continue;
        const double rate = -dir * alpha[p];
        double target;
        if (!target_of(p, rate, target)) continue;
        const double relaxed = rate > 0 ? (target + ftol - x[head[p]]) / rate
                                         : (target - ftol - x[head[p]]) / rate;
        theta_max = std::min(theta_max, relaxed);
      }
      const double range = up[q] - lo[q];

      int r = -1;
      double theta = 0.0, leave_target = 0.0;
      if (std::isfinite(theta_max) && !(range <= theta_max)) {
        // Pass 2: among blocking rows, the largest pivot.
        double best_pivot = 0.0;
        for (int p = 0; p < m; ++p) {
          if (std::abs(alpha[p]) < kPivotTol) continue;
          const double rate = -dir * alpha[p];
          double target;
          if (!target_of(p, rate, target)) continue;
          const double exact = (target - x[head[p]]) / rate;
          const bool better = std::abs(alpha[p]) > best_pivot ||
                              (bland && r >= 0 && std::abs(alpha[p]) == best_pivot && head[p] < head[r]);
          if (exact <= theta_max && better) {
            best_pivot = std::abs(alpha[p]);
            r = p;
            theta = std::max(0.0, exact);
            leave_target = target;
          }
        }
      }
      if (r < 0 && !std::isfinite(range)) {
        if (phase1) return finish(SolveStatus::IterationLimit, iter);
        return finish(SolveStatus::Unbounded, iter);
      }
      if (r < 0) theta = range;

      ++iter;
      fresh = false;
      x[q] += dir * theta;
      for (int p = 0; p < m; ++p) {
        if (alpha[p] != 0.0) x[head[p]] -= dir * alpha[p] * theta;
      }
      if (r < 0) {
        status[q] = status[q] == kAtLower ? kAtUpper : kAtLower;
        x[q] = nonbasic_value(q);
        continue;
      }
      const int leaving = head[r];
      x[leaving] = leave_target;
      status[leaving] = lo[leaving] == up[leaving] || leave_target == lo[leaving] ? kAtLower : kAtUpper;
      pos[leaving] = -1;
      head[r] = q;
      pos[q] = r;
      status[q] = kBasic;
      push_eta(r, alpha);
    }
  }
};

LpEngine::LpEngine(const MilpModel& model, LpOptions options)
    : impl_(std::make_unique<Impl>(model, options)) {}

LpEngine::~LpEngine() = default;

void LpEngine::set_bounds(int var, double lower, double upper) {
  impl_->lo[var] = lower;
  impl_->up[var] = upper;
  if (impl_->pos[var] < 0) {
    if (impl_->status[var] == kFree || (impl_->status[var] == kAtLower && !std::isfinite(lower)) ||
        (impl_->status[var] == kAtUpper && !std::isfinite(upper))) {
      impl_->status[var] = impl_->resting_status(var);
    }
  }
}

double LpEngine::lower(int var) const { return impl_->lo[var]; }
double LpEngine::upper(int var) const { return impl_->up[var]; }

LpSolution LpEngine::solve() { return impl_->solve(); }

std::vector<std::uint8_t> LpEngine::basis() const { return impl_->status; }

void LpEngine::set_basis(const std::vector<std::uint8_t>& b) {
  Impl& s = *impl_;
  const int total = s.n + s.m;
  int basics = 0;
  if (static_cast<int>(b.size()) == total) {
    basics = static_cast<int>(std::count(b.begin(), b.end(), kBasic));
  }
  if (basics != s.m) {
    s.slack_basis();
    return;
  }
  bool same = s.factored;
  for (int j = 0; same && j < total; ++j) same = (b[j] == kBasic) == (s.pos[j] >= 0);
  s.status = b;
  if (same) {
    // Same basic set: keep the head order and its factorization.
    for (int j = 0; j < total; ++j) {
      if (s.pos[j] >= 0) {
        s.status[j] = kBasic;
      } else if ((b[j] == kAtLower && !std::isfinite(s.lo[j])) || (b[j] == kAtUpper && !std::isfinite(s.up[j])) ||
                 b[j] == kFree) {
        s.status[j] = s.resting_status(j);
      }
    }
    return;
  }
  s.factored = false;
  int p = 0;
  for (int j = 0; j < total; ++j) {
    if (b[j] == kBasic) {
      s.head[p] = j;
      s.pos[j] = p++;
    } else {
      s.pos[j] = -1;
      // Bounds may have moved since the snapshot.
      if ((b[j] == kAtLower && !std::isfinite(s.lo[j])) || (b[j] == kAtUpper && !std::isfinite(s.up[j])) ||
          b[j] == kFree) {
        s.status[j] = s.resting_status(j);
      }
    }
  }
  s.etas.clear();
}

LpSolution lp_solve(const MilpModel& model, const LpOptions& options) {
  LpEngine engine(model, options);
  LpSolution sol = engine.solve();
  if (sol.status == SolveStatus::Optimal &&
      max_violation(model, sol.values, false) > options.feasibility_tol) {
    // Drifted past tolerance; refuse rather than report a wrong optimum.
    sol.status = SolveStatus::IterationLimit;
  }
  return sol;
}

}  // namespace cqsta
