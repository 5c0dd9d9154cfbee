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

#include "period_optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

namespace cqsta {

namespace {

constexpr double kCheckTol = 1e-6;

// Sums coefficients of repeated variables (self-loop stages touch one FF twice).
std::vector<Term> merged(std::vector<Term> terms) {
  std::map<int, double> acc;
  for (const Term& t : terms) acc[t.var] += t.coef;
  std::vector<Term> out;
  for (const auto& [v, c] : acc) {
    if (c != 0.0) out.push_back({v, c});
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Polygon index with the smallest worst-case delay; lowest index on ties.
int most_stable(const std::vector<int>& candidates, const PiecewiseDelayModel& model) {
  int best = candidates.front();
  for (int k : candidates) {
    if (model.polygons[k].max_delay() < model.polygons[best].max_delay()) best = k;
  }
  return best;
}

// Minimum-T LP with one fixed polygon per FF. Layout: T, then (s_i, h_i).
MilpModel residual_lp(const StageGraph& graph, const PiecewiseDelayModel& model,
                      const std::vector<int>& assignment, double t_floor) {
  MilpModel lp;
  lp.add_variable("T", VarKind::Continuous, t_floor, kInfinity);
  for (std::size_t i = 0; i < graph.flipflops.size(); ++i) {
    const Polygon& p = model.polygons[assignment[i]];
    const int s = lp.add_variable("s_" + graph.flipflops[i], VarKind::Continuous, p.s_l, p.s_u);
    const int h = lp.add_variable("h_" + graph.flipflops[i], VarKind::Continuous, p.h_l, p.h_u);
    if (p.hypotenuse) {
      lp.add_constraint("tri_" + graph.flipflops[i], {{h, 1.0}, {s, -p.hypotenuse->c_ts}},
                        Sense::GreaterEqual, p.hypotenuse->c_t);
    }
  }
  auto s_of = [](std::size_t i) { return static_cast<int>(1 + 2 * i); };
  auto h_of = [](std::size_t i) { return static_cast<int>(2 + 2 * i); };
  for (const Stage& st : graph.stages) {
    const PlaneCoefficients& f = model.polygons[assignment[st.src]].plane;
    lp.add_constraint("setup",
                      merged({{s_of(st.dst), 1.0}, {s_of(st.src), f.c_s}, {h_of(st.src), f.c_h}, {0, -1.0}}),
                      Sense::LessEqual, -st.d_max - f.c);
    lp.add_constraint("hold",
                      merged({{h_of(st.dst), 1.0}, {s_of(st.src), -f.c_s}, {h_of(st.src), -f.c_h}}),
                      Sense::LessEqual, st.d_min + f.c);
  }
  lp.objective = {{0, 1.0}};
  return lp;
}

std::string stage_name(const StageGraph& g, const Stage& st) {
  return "'" + g.flipflops[st.src] + "' -> '" + g.flipflops[st.dst] + "'";
}

// Names the first stage that is infeasible on its own, for the error report.
std::string diagnose_infeasible(const TrimmedProblem& problem, const PiecewiseDelayModel& model,
                                const BbOptions& bb) {
  for (const Stage& st : problem.graph.stages) {
    TrimmedProblem sub;
    std::vector<std::size_t> local;
    for (std::size_t f : {st.src, st.dst}) {
      if (std::find(local.begin(), local.end(), f) != local.end()) continue;
      local.push_back(f);
      sub.graph.flipflops.push_back(problem.graph.flipflops[f]);
      sub.polygons.push_back(problem.polygons[f]);
    }
    auto idx = [&](std::size_t f) {
      return static_cast<std::size_t>(std::find(local.begin(), local.end(), f) - local.begin());
    };
    sub.graph.stages.push_back({idx(st.src), idx(st.dst), st.d_max, st.d_min});
    const BuiltMilp b = build_milp(sub, model);
    if (bb_solve(b.model, bb).status == SolveStatus::Infeasible) {
      return "stage " + stage_name(problem.graph, st) + " cannot meet its hold constraint (dmin=" +
             fmt(st.d_min) + ")";
    }
  }
  return "no single stage is infeasible on its own; the conflict spans several stages";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

namespace {

// Delay range of the model's planes; equals [f_lower, f_upper] for a model
// whose planes stay inside the characterized band.
std::pair<double, double> delay_range(const PiecewiseDelayModel& model) {
  double lo = model.f_lower, hi = model.f_upper;
  for (const Polygon& p : model.polygons) {
    lo = std::min(lo, p.min_delay());
    hi = std::max(hi, p.max_delay());
  }
  return {lo, hi};
}

struct FanIn {
  double max_dmax = -kInfinity, min_dmax = kInfinity;
  double max_dmin = -kInfinity, min_dmin = kInfinity;
  bool any() const { return max_dmax > -kInfinity; }
};

std::vector<FanIn> fan_in(const StageGraph& graph) {
  std::vector<FanIn> f(graph.flipflops.size());
  for (const Stage& st : graph.stages) {
    FanIn& x = f[st.dst];
    x.max_dmax = std::max(x.max_dmax, st.d_max);
    x.min_dmax = std::min(x.min_dmax, st.d_max);
    x.max_dmin = std::max(x.max_dmin, st.d_min);
    x.min_dmin = std::min(x.min_dmin, st.d_min);
  }
  return f;
}

// Lowest plane value over the polygon's bounding box at a fixed coordinate
// along one axis: a lower bound on the polygon's delay there.
struct Line {
  double a = 0.0, b = 0.0;  // value = a + b * x
};

Line lower_line(const Polygon& p, bool along_s) {
  const PlaneCoefficients& f = p.plane;
  if (along_s) {
    const double h = f.c_h <= 0.0 ? p.h_u : p.h_l;
    return {f.c + f.c_h * h, f.c_s};
  }
  const double s = f.c_s <= 0.0 ? p.s_u : p.s_l;
  return {f.c + f.c_s * s, f.c_h};
}

// True when every point of `p` can be traded for a point of some rectangle in
// `keep` with no larger delay, moving only along the other axis and staying
// under `cap` there. Along s means the trade keeps s and changes h.
bool dominated(const Polygon& p, const std::vector<const Polygon*>& keep, bool along_s, double cap) {
  const double lo = along_s ? p.s_l : p.h_l;
  const double hi = along_s ? p.s_u : p.h_u;
  const Line pl = lower_line(p, along_s);
  std::vector<std::pair<double, double>> cover;
  for (const Polygon* q : keep) {
    if (q == &p || q->hypotenuse) continue;
    const double q_lo = along_s ? q->h_l : q->s_l;
    const double q_hi = std::min(along_s ? q->h_u : q->s_u, cap);
    if (q_lo > q_hi) continue;
    const PlaneCoefficients& f = q->plane;
    const double slope_other = along_s ? f.c_h : f.c_s;
    const double other = slope_other <= 0.0 ? q_hi : q_lo;
    const Line ql = along_s ? Line{f.c + f.c_h * other, f.c_s} : Line{f.c + f.c_s * other, f.c_h};
    double a = std::max(lo, along_s ? q->s_l : q->h_l);
    double b = std::min(hi, along_s ? q->s_u : q->h_u);
    if (a > b) continue;
    // Keep the part where ql <= pl.
    const double d0 = pl.a - ql.a, d1 = pl.b - ql.b;  // pl - ql = d0 + d1 x
    if (d1 == 0.0) {
      if (d0 < -1e-12) continue;
    } else {
      const double root = -d0 / d1;
      if (d1 > 0.0) a = std::max(a, root);
      else b = std::min(b, root);
      if (a > b) continue;
    }
    cover.emplace_back(a, b);
  }
  std::sort(cover.begin(), cover.end());
  double reach = lo;
  for (const auto& [a, b] : cover) {
    if (a > reach + 1e-9) break;
    reach = std::max(reach, b);
  }
  return reach >= hi - 1e-9;
}

// Lowest delay the kept polygons offer at slacks no larger than the caps:
// any such point is reachable whatever the other FFs do.
double best_reachable(const std::vector<const Polygon*>& keep, const Polygon* skip, double s_cap,
                      double h_cap) {
  double best = kInfinity;
  for (const Polygon* q : keep) {
    if (q == skip) continue;
    if (q->hypotenuse) {
      for (const SlackPoint& v : q->vertices()) {
        if (v.setup <= s_cap && v.hold <= h_cap) best = std::min(best, q->plane.at(v));
      }
      continue;
    }
    const double s_hi = std::min(q->s_u, s_cap), h_hi = std::min(q->h_u, h_cap);
    if (q->s_l > s_hi || q->h_l > h_hi) continue;
    for (double sv : {q->s_l, s_hi}) {
      for (double hv : {q->h_l, h_hi}) best = std::min(best, q->plane.at({sv, hv}));
    }
  }
  return best;
}

std::optional<double> constant_delay(const std::vector<int>& polys, const PiecewiseDelayModel& model) {
  std::optional<double> c;
  for (int k : polys) {
    const Polygon& p = model.polygons[k];
    if (p.hypotenuse || p.plane.c_s != 0.0 || p.plane.c_h != 0.0) return std::nullopt;
    if (c && *c != p.plane.c) return std::nullopt;
    c = p.plane.c;
  }
  return c;
}

}  // namespace

TrimBounds compute_trim_bounds(const StageGraph& graph, const PiecewiseDelayModel& model) {
  TrimBounds b;
  const std::size_t n = graph.flipflops.size();
  b.ff.assign(n, SlackRange{model.s_min, model.s_max, model.h_min, model.h_max});
  if (graph.stages.empty()) return b;

  const auto [d_lo, d_hi] = delay_range(model);
  b.t_low = -kInfinity;
  b.t_high = -kInfinity;
  for (const Stage& st : graph.stages) {
    b.t_low = std::max(b.t_low, d_lo + st.d_max + model.s_min);
    b.t_high = std::max(b.t_high, d_hi + st.d_max + model.s_max);
  }
  const std::vector<FanIn> fin = fan_in(graph);
  for (std::size_t j = 0; j < n; ++j) {
    if (!fin[j].any()) continue;
    SlackRange& r = b.ff[j];
    r.s_lo = std::max(0.0, b.t_low - d_hi - fin[j].max_dmax);
    r.s_hi = b.t_high - d_lo - fin[j].min_dmax;
    r.h_lo = std::max(0.0, d_lo + fin[j].min_dmin);
    r.h_hi = d_hi + fin[j].max_dmin;
  }
  return b;
}

TrimmedProblem untrimmed_problem(const StageGraph& graph, const PiecewiseDelayModel& model) {
  TrimmedProblem p;
  p.graph = graph;
  std::vector<int> all(model.polygons.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
  for (std::size_t i = 0; i < graph.flipflops.size(); ++i) {
    p.origin.push_back(i);
    p.polygons.push_back(all);
    p.active.push_back(all);
  }
  return p;
}

TrimmedProblem trim(const StageGraph& graph, const PiecewiseDelayModel& model,
                    const TrimBounds& bounds) {
  const std::size_t n = graph.flipflops.size();
  const auto [d_lo, d_hi] = delay_range(model);
  TrimmedProblem p;
  p.active.resize(n);

  // Lowering an FF's delay is harmless when no hold check it launches can
  // bind; only then may polygons below its box be traded away.
  const std::vector<FanIn> fin = fan_in(graph);
  std::vector<bool> holds_loose(n, true);
  for (const Stage& st : graph.stages) {
    if (d_lo + st.d_min < model.h_max) holds_loose[st.src] = false;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const SlackRange& r = bounds.ff[i];
    // Lower ends past the model's reach would drop every polygon, though a
    // larger slack only helps; keep the top polygons reachable.
    const double s_lo = std::min(r.s_lo, model.s_max);
    const double h_lo = std::min(r.h_lo, model.h_max);
    std::vector<const Polygon*> inside, below;
    for (const Polygon& poly : model.polygons) {
      if (poly.s_l > r.s_hi || poly.h_l > r.h_hi) continue;  // unreachable
      if (poly.s_u < s_lo || poly.h_u < h_lo) below.push_back(&poly);
      else inside.push_back(&poly);
    }
    // Trades chain: a dropped polygon may be dominated by one dropped later,
    // as long as every chain ends in a kept polygon. Farthest go first so
    // nearer polygons can still serve them.
    std::vector<const Polygon*> kept = inside;
    kept.insert(kept.end(), below.begin(), below.end());
    if (holds_loose[i]) {
      // Without fan-in nothing caps the FF's slacks.
      const double s_cap = fin[i].any() ? r.s_lo : kInfinity;
      const double h_cap = fin[i].any() ? r.h_lo : kInfinity;
      std::vector<const Polygon*> order = kept;
      std::sort(order.begin(), order.end(), [](const Polygon* x, const Polygon* y) {
        return x->s_u + x->h_u < y->s_u + y->h_u;
      });
      for (const Polygon* poly : order) {
        const auto self = std::find(kept.begin(), kept.end(), poly);
        const bool drop = best_reachable(kept, poly, s_cap, h_cap) <= poly->min_delay() ||
                          (poly->h_u < h_lo && dominated(*poly, kept, true, h_cap)) ||
                          (poly->s_u < s_lo && dominated(*poly, kept, false, s_cap));
        if (drop) kept.erase(self);
      }
    }
    for (const Polygon* poly : kept) p.active[i].push_back(static_cast<int>(poly - model.polygons.data()));
    std::sort(p.active[i].begin(), p.active[i].end());
    if (p.active[i].empty()) {
      throw InfeasibleError("flip-flop '" + graph.flipflops[i] +
                            "' has no polygon inside its slack bounds");
    }
  }

  // An FF whose polygons and predecessors all have one constant delay
  // contributes nothing but a constant to T: its incoming stages fold into
  // t_floor and it keeps the polygon realizing that constant.
  std::vector<std::optional<double>> konst(n);
  for (std::size_t i = 0; i < n; ++i) konst[i] = constant_delay(p.active[i], model);
  std::vector<std::vector<const Stage*>> incoming(n);
  for (const Stage& st : graph.stages) incoming[st.dst].push_back(&st);
  std::vector<bool> folded(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (!konst[j] || incoming[j].empty()) continue;
    bool ok = true;
    double hold_cap = kInfinity;
    for (const Stage* st : incoming[j]) {
      if (!konst[st->src]) ok = false;
      else hold_cap = std::min(hold_cap, *konst[st->src] + st->d_min);
    }
    if (!ok) continue;
    int best = -1;
    double best_floor = kInfinity;
    for (int k : p.active[j]) {
      const Polygon& poly = model.polygons[k];
      if (poly.h_l > hold_cap) continue;
      double need = 0.0;
      for (const Stage* st : incoming[j]) need = std::max(need, *konst[st->src] + st->d_max + poly.s_l);
      if (need < best_floor) {
        best_floor = need;
        best = k;
      }
    }
    if (best < 0) {
      throw InfeasibleError("hold slack of flip-flop '" + graph.flipflops[j] +
                            "' cannot fit any polygon (limit " + fmt(hold_cap) + ")");
    }
    folded[j] = true;
    p.active[j] = {best};
    p.t_floor = std::max(p.t_floor, best_floor);
  }

  std::vector<Stage> kept;
  for (const Stage& st : graph.stages) {
    if (folded[st.dst]) ++p.removed_stages;
    else kept.push_back(st);
  }
  std::vector<std::size_t> reduced(n, SIZE_MAX);
  for (const Stage& st : kept) {
    for (std::size_t f : {st.src, st.dst}) reduced[f] = 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (reduced[i] == SIZE_MAX) {
      ++p.removed_ffs;
      continue;
    }
    reduced[i] = p.origin.size();
    p.origin.push_back(i);
    p.graph.flipflops.push_back(graph.flipflops[i]);
    p.polygons.push_back(p.active[i]);
  }
  for (const Stage& st : kept) {
    p.graph.stages.push_back({reduced[st.src], reduced[st.dst], st.d_max, st.d_min});
  }
  return p;
}

BuiltMilp build_milp(const TrimmedProblem& problem, const PiecewiseDelayModel& model) {
  BuiltMilp b;
  MilpModel& m = b.model;
  const StageGraph& g = problem.graph;
  if (problem.polygons.size() != g.flipflops.size()) {
    throw std::invalid_argument("polygon lists do not match the flip-flop count");
  }
  b.T = m.add_variable("T", VarKind::Continuous, problem.t_floor, kInfinity);
  b.vars.resize(g.flipflops.size());

  for (std::size_t i = 0; i < g.flipflops.size(); ++i) {
    if (problem.polygons[i].empty()) {
      throw InfeasibleError("flip-flop '" + g.flipflops[i] + "' has no polygon");
    }
    std::vector<Term> one_hot;
    for (int k : problem.polygons[i]) {
      const Polygon& p = model.polygons.at(k);
      const std::string tag = g.flipflops[i] + "_" + std::to_string(p.id);
      PolygonVars v;
      v.z = m.add_variable("z_" + tag, VarKind::Binary, 0.0, 1.0);
      v.s = m.add_variable("s_" + tag, VarKind::Continuous);
      v.h = m.add_variable("h_" + tag, VarKind::Continuous);
      one_hot.push_back({v.z, 1.0});
      m.add_constraint("slo_" + tag, {{v.s, 1.0}, {v.z, -p.s_l}}, Sense::GreaterEqual, 0.0);
      m.add_constraint("sup_" + tag, {{v.s, 1.0}, {v.z, -p.s_u}}, Sense::LessEqual, 0.0);
      m.add_constraint("hlo_" + tag, {{v.h, 1.0}, {v.z, -p.h_l}}, Sense::GreaterEqual, 0.0);
      m.add_constraint("hup_" + tag, {{v.h, 1.0}, {v.z, -p.h_u}}, Sense::LessEqual, 0.0);
      if (p.hypotenuse) {
        if (!(p.hypotenuse->c_t > 0.0)) {
          throw std::invalid_argument("polygon " + std::to_string(p.id) +
                                      ": hypotenuse intercept must be positive");
        }
        m.add_constraint("tri_" + tag,
                         {{v.h, 1.0}, {v.s, -p.hypotenuse->c_ts}, {v.z, -p.hypotenuse->c_t}},
                         Sense::GreaterEqual, 0.0);
      }
      b.vars[i].push_back(v);
    }
    m.add_constraint("one_" + g.flipflops[i], std::move(one_hot), Sense::Equal, 1.0);
  }

  for (const Stage& st : g.stages) {
    // d_i = sum_k c z + c_s s + c_h h over the source's polygons.
    std::vector<Term> delay;
    for (std::size_t a = 0; a < problem.polygons[st.src].size(); ++a) {
      const PlaneCoefficients& f = model.polygons[problem.polygons[st.src][a]].plane;
      const PolygonVars& v = b.vars[st.src][a];
      delay.push_back({v.z, f.c});
      delay.push_back({v.s, f.c_s});
      delay.push_back({v.h, f.c_h});
    }
    const std::string tag = g.flipflops[st.src] + "_" + g.flipflops[st.dst];
    std::vector<Term> setup = delay;
    setup.push_back({b.T, -1.0});
    std::vector<Term> hold;
    for (const Term& t : delay) hold.push_back({t.var, -t.coef});
    for (const PolygonVars& v : b.vars[st.dst]) {
      setup.push_back({v.s, 1.0});
      hold.push_back({v.h, 1.0});
    }
    m.add_constraint("setup_" + tag, merged(std::move(setup)), Sense::LessEqual, -st.d_max);
    m.add_constraint("hold_" + tag, merged(std::move(hold)), Sense::LessEqual, st.d_min);
  }
  m.objective = {{b.T, 1.0}};
  return b;
}

namespace {

struct Extracted {
  double T = 0.0;
  std::vector<int> assignment;  // reduced FF -> polygon index
};

Extracted extract(const BuiltMilp& b, const TrimmedProblem& problem, const MilpSolution& sol) {
  Extracted e;
  e.T = sol.values[b.T];
  for (std::size_t i = 0; i < b.vars.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < b.vars[i].size(); ++a) {
      if (sol.values[b.vars[i][a].z] > sol.values[b.vars[i][best].z]) best = a;
    }
    e.assignment.push_back(problem.polygons[i][best]);
  }
  return e;
}

}  // namespace

Solution solve_min_period(const StageGraph& graph, const PiecewiseDelayModel& model,
                          const OptimizeOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  graph.validate();
  if (model.polygons.empty()) throw std::invalid_argument("model has no polygons");

  Solution out;
  out.n_ff = graph.flipflops.size();

  auto run = [&](const TrimmedProblem& problem) {
    const BuiltMilp built = build_milp(problem, model);
    const MilpSolution sol = bb_solve(built.model, options.bb);
    out.nodes += sol.nodes;
    out.lp_iterations += sol.lp_iterations;
    if (sol.status == SolveStatus::Infeasible) {
      throw InfeasibleError("no polygon assignment meets the stage constraints: " +
                            diagnose_infeasible(problem, model, options.bb));
    }
    if (sol.status == SolveStatus::Unbounded) {
      throw std::runtime_error("period model is unbounded; the model is malformed");
    }
    if (sol.values.empty()) {
      throw SolverLimitError(std::string("solver stopped without a feasible point (") +
                               to_string(sol.status) + ")");
    }
    out.status = sol.status;
    out.gap = sol.gap;
    return extract(built, problem, sol);
  };

  // Expands a reduced assignment to every FF and re-solves the continuous
  // part on the full graph, so the reported point is feasible untrimmed.
  auto full_check = [&](const TrimmedProblem& problem, const Extracted& e) -> std::optional<LpSolution> {
    std::vector<int> assignment(graph.flipflops.size(), -1);
    for (std::size_t r = 0; r < problem.origin.size(); ++r) assignment[problem.origin[r]] = e.assignment[r];
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] < 0) assignment[i] = most_stable(problem.active[i], model);
    }
    const MilpModel lp = residual_lp(graph, model, assignment, 0.0);
    LpSolution s = lp_solve(lp, options.bb.lp);
    if (s.status != SolveStatus::Optimal) return std::nullopt;
    out.points.assign(graph.flipflops.size(), {});
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      WorkingPoint& w = out.points[i];
      const Polygon& p = model.polygons[assignment[i]];
      w.polygon = p.id;
      w.s = s.values[1 + 2 * i];
      w.h = s.values[2 + 2 * i];
      w.d_cq = p.plane.at({w.s, w.h});
    }
    return s;
  };

  auto record_stats = [&](const TrimmedProblem& problem) {
    out.n_ff_trimmed = problem.graph.flipflops.size();
    out.removed_stages = problem.removed_stages;
    out.t_floor = problem.t_floor;
    std::size_t total = 0;
    for (const auto& list : problem.polygons) total += list.size();
    out.avg_polygons = problem.polygons.empty() ? 0.0 : static_cast<double>(total) / problem.polygons.size();
  };

  const TrimBounds bounds = compute_trim_bounds(graph, model);
  const TrimmedProblem problem = options.trim
                                     ? trim(graph, model, bounds)
                                     : untrimmed_problem(graph, model);
  record_stats(problem);
  Extracted e = run(problem);
  std::optional<LpSolution> check = full_check(problem, e);
  // Trimming assumed T <= t_high when cutting unreachable polygons.
  const bool agrees = check && std::abs(check->objective - e.T) <= kCheckTol * std::max(1.0, std::abs(e.T)) &&
                      (graph.stages.empty() || e.T <= bounds.t_high + kCheckTol);
  if (options.trim && !agrees) {
    out.trim_fallback = true;
    const TrimmedProblem full = untrimmed_problem(graph, model);
    e = run(full);
    check = full_check(full, e);
  }
  if (!check) throw std::runtime_error("selected polygons fail the untrimmed feasibility check");
  out.T = check->objective;
  out.runtime_seconds = seconds_since(t0);
  return out;
}

ValidationVerdict validate_solution(const Solution& solution, const StageGraph& graph,
                                    const PiecewiseDelayModel& model, const DelayOracle& oracle) {
  ValidationVerdict v;
  const std::size_t n = graph.flipflops.size();
  auto fail = [&](bool& flag, std::string msg) {
    flag = false;
    v.failures.push_back(std::move(msg));
  };
  if (solution.points.size() != n) {
    fail(v.constraints_ok, "solution has " + std::to_string(solution.points.size()) +
                               " working points for " + std::to_string(n) + " flip-flops");
    return v;
  }

  std::vector<std::optional<double>> true_delay(n);
  for (std::size_t i = 0; i < n; ++i) {
    const WorkingPoint& w = solution.points[i];
    const std::string& name = graph.flipflops[i];
    const Polygon* poly = nullptr;
    try {
      poly = &model.polygon_by_id(w.polygon);
    } catch (const std::exception&) {
      fail(v.constraints_ok, "ff " + name + ": unknown polygon " + std::to_string(w.polygon));
      continue;
    }
    if (w.s < -kCheckTol || w.h < -kCheckTol || !poly->contains({w.s, w.h}, kCheckTol)) {
      fail(v.constraints_ok, "ff " + name + ": point (" + fmt(w.s) + ", " + fmt(w.h) +
                                 ") outside polygon " + std::to_string(w.polygon));
    }
    const double plane = poly->plane.at({w.s, w.h});
    if (std::abs(plane - w.d_cq) > kCheckTol) {
      fail(v.constraints_ok, "ff " + name + ": d_cq " + fmt(w.d_cq) + " differs from plane " + fmt(plane));
    }
    try {
      const OracleResponse r = oracle.query({w.s, w.h});
      if (r.is_metastable()) {
        fail(v.oracle_valid, "ff " + name + ": oracle reports metastable at (" + fmt(w.s) + ", " + fmt(w.h) + ")");
        continue;
      }
      true_delay[i] = r.delay();
    } catch (const DomainError& e) {
      fail(v.oracle_valid, "ff " + name + ": " + e.what());
      continue;
    }
    const double err = std::abs(w.d_cq - *true_delay[i]);
    v.max_model_error = std::max(v.max_model_error, err);
    if (err > model.d_th + 1e-9) {
      fail(v.model_error_ok, "ff " + name + ": model delay " + fmt(w.d_cq) + " vs oracle " +
                                 fmt(*true_delay[i]) + " exceeds d_th " + fmt(model.d_th));
    }
  }

  for (const Stage& st : graph.stages) {
    const WorkingPoint& src = solution.points[st.src];
    const WorkingPoint& dst = solution.points[st.dst];
    const std::string name = stage_name(graph, st);
    const double setup_rhs = solution.T - src.d_cq - st.d_max;
    const double hold_rhs = src.d_cq + st.d_min;
    if (dst.s > setup_rhs + kCheckTol) {
      fail(v.constraints_ok, "stage " + name + ": setup slack " + fmt(dst.s) + " exceeds " + fmt(setup_rhs));
    }
    if (dst.h > hold_rhs + kCheckTol) {
      fail(v.constraints_ok, "stage " + name + ": hold slack " + fmt(dst.h) + " exceeds " + fmt(hold_rhs));
    }
    if (!true_delay[st.src]) continue;
    const double implied_s = solution.T - *true_delay[st.src] - st.d_max;
    const double implied_h = *true_delay[st.src] + st.d_min;
    if (implied_s < dst.s - model.d_th - 1e-9) {
      fail(v.propagation_ok, "stage " + name + ": oracle setup slack " + fmt(implied_s) +
                                 " below claimed " + fmt(dst.s) + " minus d_th");
    }
    if (implied_h < dst.h - model.d_th - 1e-9) {
      fail(v.propagation_ok, "stage " + name + ": oracle hold slack " + fmt(implied_h) +
                                 " below claimed " + fmt(dst.h) + " minus d_th");
    }
  }
  return v;
}

double brute_force_min_period(const TrimmedProblem& problem, const PiecewiseDelayModel& model) {
  const std::size_t n = problem.graph.flipflops.size();
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = problem.polygons[i].size();
    if (k == 0) throw InfeasibleError("flip-flop '" + problem.graph.flipflops[i] + "' has no polygon");
    if (count > kEnumerationLimit / k) {
      throw EnumerationLimitError("more than " + std::to_string(kEnumerationLimit) +
                                  " polygon assignments; refusing to enumerate");
    }
    count *= k;
  }
  std::vector<std::size_t> digit(n, 0);
  std::vector<int> assignment(n);
  double best = kInfinity;
  for (std::uint64_t c = 0; c < count; ++c) {
    for (std::size_t i = 0; i < n; ++i) assignment[i] = problem.polygons[i][digit[i]];
    const LpSolution s = lp_solve(residual_lp(problem.graph, model, assignment, problem.t_floor));
    if (s.status == SolveStatus::Optimal) best = std::min(best, s.objective);
    for (std::size_t i = 0; i < n; ++i) {
      if (++digit[i] < problem.polygons[i].size()) break;
      digit[i] = 0;
    }
  }
  if (best == kInfinity) throw InfeasibleError("no polygon assignment is feasible");
  return best;
}

}  // namespace cqsta
