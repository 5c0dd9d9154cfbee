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

#include "classic_sta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace cqsta {

namespace {

constexpr double kTol = 1e-9;

}  // namespace

ClassicFFParams characterize_classic(const DelayOracle& oracle, double degradation_factor,
                                     const CharConfig& cfg) {
  cfg.validate();
  if (!(degradation_factor >= 1.0) || !std::isfinite(degradation_factor)) {
    throw std::invalid_argument("degradation factor must be >= 1");
  }
  const double anchor = cfg.anchor_slack;
  const OracleResponse rg = oracle.query({anchor, anchor});
  if (rg.is_metastable()) throw CharacterizationError("flip-flop is metastable at the anchor slack");
  const double limit = degradation_factor * rg.delay();
  if (limit > oracle.metastable_threshold()) {
    throw CharacterizationError("degraded delay exceeds the metastable threshold");
  }

  const SlackBox box = oracle.domain();
  auto search = [&](bool setup_axis) {
    auto ok = [&](double x) {
      const OracleResponse r = oracle.query(setup_axis ? SlackPoint{x, anchor} : SlackPoint{anchor, x});
      return r.is_valid() && r.delay() <= limit;
    };
    double lo = std::max(0.0, setup_axis ? box.s_lo : box.h_lo), hi = anchor;
    if (ok(lo)) return lo;
    while (hi - lo > cfg.search_resolution) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? hi : lo) = mid;
    }
    return hi;
  };

  ClassicFFParams p;
  p.degradation_factor = degradation_factor;
  p.d_cq = limit;
  p.t_su = search(true);
  p.t_h = search(false);
  return p;
}

ClassicPeriod min_period_classic(const StageGraph& graph, const ClassicFFParams& params) {
  ClassicPeriod out;
  if (graph.stages.empty()) {
    out.no_stages = true;
    return out;
  }
  out.T = -std::numeric_limits<double>::infinity();
  for (const auto& st : graph.stages) out.T = std::max(out.T, params.d_cq + st.d_max + params.t_su);
  return out;
}

ViolationCounts count_violations(const StageGraph& graph, const ClassicFFParams& params,
                                 double target_T) {
  if (!(target_T > 0)) throw std::invalid_argument("target period must be > 0");
  ViolationCounts v;
  std::set<std::size_t> setup_ffs, hold_ffs;
  for (const auto& st : graph.stages) {
    if (params.d_cq + st.d_max + params.t_su > target_T + kTol) {
      ++v.setup_paths;
      setup_ffs.insert(st.dst);
    }
    if (params.d_cq + st.d_min < params.t_h - kTol) {
      ++v.hold_paths;
      hold_ffs.insert(st.dst);
    }
  }
  v.setup_ffs = setup_ffs.size();
  v.hold_ffs = hold_ffs.size();
  return v;
}

}  // namespace cqsta
