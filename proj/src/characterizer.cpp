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

#include "characterizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace cqsta {

namespace {

constexpr double kGeomEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

SlackPoint midpoint(SlackPoint a, SlackPoint b) {
  return {0.5 * (a.setup + b.setup), 0.5 * (a.hold + b.hold)};
}

bool near(double a, double b) { return std::abs(a - b) <= kGeomEps * std::max(1.0, std::abs(a)); }

// Largest t >= 0 with from + t * dir inside the box.
double max_travel(const SlackBox& box, SlackPoint from, SlackPoint dir) {
  double t = kInf;
  auto limit = [&](double x, double d, double lo, double hi) {
    if (d < 0) t = std::min(t, (x - lo) / -d);
    if (d > 0) t = std::min(t, (hi - x) / d);
  };
  limit(from.setup, dir.setup, box.s_lo, box.s_hi);
  limit(from.hold, dir.hold, box.h_lo, box.h_hi);
  return std::max(0.0, t);
}

SlackPoint along(SlackPoint from, SlackPoint dir, double t) {
  return {from.setup + t * dir.setup, from.hold + t * dir.hold};
}

bool is_valid(const DelayOracle& oracle, SlackPoint p) { return oracle.query(p).is_valid(); }

// Unit normal of a down-right segment pointing toward smaller slacks.
SlackPoint boundary_normal(SlackPoint a, SlackPoint b) {
  const double dx = b.setup - a.setup;
  const double dy = b.hold - a.hold;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return {-M_SQRT1_2, -M_SQRT1_2};
  return {dy / len, -dx / len};
}

DelaySample sample(const DelayOracle& oracle, SlackPoint p) { return {p, oracle.query(p)}; }

Polygon make_rectangle(double sl, double su, double hl, double hu, PlaneCoefficients plane) {
  Polygon r;
  r.kind = PolygonKind::Rectangle;
  r.s_l = sl;
  r.s_u = su;
  r.h_l = hl;
  r.h_u = hu;
  r.plane = plane;
  return r;
}

struct RectFit {
  PlaneCoefficients plane;
  double error = kInf;     // estimated worst error over the box
  double error_s = 0.0;    // chord error along the setup edge through the top corner
  double error_h = 0.0;    // same along the hold edge
};

// Peak of a chord error sampled at t = 1/4, 3/8, 1/2 from the steep end,
// refined by the vertex of the parabola through the three probes.
template <class F>
double chord_peak(F&& error_at) {
  const double e0 = error_at(0.25), e1 = error_at(0.375), e2 = error_at(0.5);
  double peak = std::max({e0, e1, e2});
  const double curv = e0 - 2.0 * e1 + e2;
  if (curv < 0.0) {
    // Offset from 3/8 in units of 1/8.
    const double x = std::clamp(0.5 * (e0 - e2) / curv, -1.0, 1.0);
    peak = std::max(peak, e1 + 0.5 * (e2 - e0) * x + 0.5 * curv * x * x);
  }
  return peak;
}

// Fits the box from its corners. Empty when a corner is metastable.
//
// A center probe alone underestimates the error of long boxes, where the
// chord error of a convex surface peaks off center. The two edges through
// the highest corner are chords of the plane, so probing them measures the
// setup and hold parts of the error separately; their sum
// bounds the interior error of a separable surface.
std::optional<RectFit> fit_rectangle(const DelayOracle& oracle, double sl, double su, double hl,
                                     double hu) {
  std::array<DelaySample, 4> corners = {sample(oracle, {sl, hl}), sample(oracle, {su, hl}),
                                        sample(oracle, {sl, hu}), sample(oracle, {su, hu})};
  for (const auto& c : corners) {
    if (c.response.is_metastable()) return std::nullopt;
  }
  RectFit fit;
  fit.plane = fit_plane(corners);
  SlackPoint top = corners[0].point;
  double top_delay = corners[0].response.delay();
  for (const auto& c : corners) {
    if (c.response.delay() > top_delay) {
      top_delay = c.response.delay();
      top = c.point;
    }
  }
  auto error_at = [&](SlackPoint p) {
    const OracleResponse r = oracle.query(p);
    return r.is_valid() ? std::abs(fit.plane.at(p) - r.delay()) : kInf;
  };
  const double far_s = top.setup == sl ? su : sl, far_h = top.hold == hl ? hu : hl;
  fit.error_s = chord_peak([&](double t) {
    return error_at({top.setup + t * (far_s - top.setup), top.hold});
  });
  fit.error_h = chord_peak([&](double t) {
    return error_at({top.setup, top.hold + t * (far_h - top.hold)});
  });
  fit.error = std::max(error_at({0.5 * (sl + su), 0.5 * (hl + hu)}), fit.error_s + fit.error_h);
  return fit;
}

}  // namespace

// ---------------------------------------------------------------------------
// Polygon

std::vector<SlackPoint> Polygon::vertices() const {
  std::vector<SlackPoint> poly = {{s_l, h_l}, {s_u, h_l}, {s_u, h_u}, {s_l, h_u}};
  if (!hypotenuse) return poly;
  // Clip the box against h - c_ts * s - c_t >= 0.
  auto side = [&](SlackPoint p) { return p.hold - hypotenuse->c_ts * p.setup - hypotenuse->c_t; };
  std::vector<SlackPoint> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const SlackPoint cur = poly[i];
    const SlackPoint nxt = poly[(i + 1) % poly.size()];
    const double fc = side(cur), fn = side(nxt);
    if (fc >= -kGeomEps) out.push_back(cur);
    if ((fc > kGeomEps && fn < -kGeomEps) || (fc < -kGeomEps && fn > kGeomEps)) {
      const double t = fc / (fc - fn);
      out.push_back({cur.setup + t * (nxt.setup - cur.setup), cur.hold + t * (nxt.hold - cur.hold)});
    }
  }
  return out;
}

bool Polygon::contains(SlackPoint p, double tol) const {
  if (p.setup < s_l - tol || p.setup > s_u + tol || p.hold < h_l - tol || p.hold > h_u + tol) {
    return false;
  }
  if (hypotenuse) return p.hold >= hypotenuse->c_t + hypotenuse->c_ts * p.setup - tol;
  return true;
}

double Polygon::min_delay() const {
  double v = kInf;
  for (const auto& p : vertices()) v = std::min(v, plane.at(p));
  return v;
}

double Polygon::max_delay() const {
  double v = -kInf;
  for (const auto& p : vertices()) v = std::max(v, plane.at(p));
  return v;
}

void PiecewiseDelayModel::update_extremes() {
  if (polygons.empty()) {
    s_min = s_max = h_min = h_max = 0.0;
    return;
  }
  s_min = h_min = kInf;
  s_max = h_max = -kInf;
  for (const auto& p : polygons) {
    s_min = std::min(s_min, p.s_l);
    s_max = std::max(s_max, p.s_u);
    h_min = std::min(h_min, p.h_l);
    h_max = std::max(h_max, p.h_u);
  }
}

const Polygon& PiecewiseDelayModel::polygon_by_id(int id) const {
  for (const auto& p : polygons) {
    if (p.id == id) return p;
  }
  throw std::out_of_range("no polygon with id " + std::to_string(id));
}

void CharConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid characterization setting: ") + what);
  };
  require(anchor_slack > 0, "anchor_slack must be > 0");
  require(k_th > 0, "k_th must be > 0");
  require(d_th > 0, "d_th must be > 0");
  require(search_resolution > 0, "search_resolution must be > 0");
  require(search_resolution < k_th, "search_resolution must be < k_th");
  require(stable_step > 0, "stable_step must be > 0");
  require(stable_epsilon > 0, "stable_epsilon must be > 0");
  require(max_split_depth >= 1, "max_split_depth must be >= 1");
}

// ---------------------------------------------------------------------------
// Plane fitting

PlaneCoefficients fit_plane(std::span<const DelaySample> corners) {
  if (corners.size() != 3 && corners.size() != 4) {
    throw std::invalid_argument("fit_plane takes 3 or 4 samples");
  }
  for (const auto& c : corners) {
    if (c.response.is_metastable()) throw std::invalid_argument("fit_plane on a metastable sample");
  }
  std::array<std::size_t, 4> order = {0, 1, 2, 3};
  if (corners.size() == 4) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = corners[a];
      const auto& y = corners[b];
      if (x.response.delay() != y.response.delay()) return x.response.delay() > y.response.delay();
      if (x.point.setup != y.point.setup) return x.point.setup < y.point.setup;
      return x.point.hold < y.point.hold;
    });
  }
  const DelaySample& p1 = corners[order[0]];
  const DelaySample& p2 = corners[order[1]];
  const DelaySample& p3 = corners[order[2]];
  const double ds2 = p2.point.setup - p1.point.setup, dh2 = p2.point.hold - p1.point.hold;
  const double ds3 = p3.point.setup - p1.point.setup, dh3 = p3.point.hold - p1.point.hold;
  const double dd2 = p2.response.delay() - p1.response.delay();
  const double dd3 = p3.response.delay() - p1.response.delay();
  const double det = ds2 * dh3 - ds3 * dh2;
  const double scale = std::max({std::abs(ds2), std::abs(dh2), std::abs(ds3), std::abs(dh3), 1e-300});
  if (std::abs(det) <= 1e-12 * scale * scale) {
    throw DegenerateFitError("plane fit through collinear slack points");
  }
  PlaneCoefficients pl;
  pl.c_s = (dd2 * dh3 - dd3 * dh2) / det;
  pl.c_h = (ds2 * dd3 - ds3 * dd2) / det;
  pl.c = p1.response.delay() - pl.c_s * p1.point.setup - pl.c_h * p1.point.hold;
  return pl;
}

// ---------------------------------------------------------------------------
// Boundary

namespace {

// Smallest valid x in [lo, hi] along `at`, assuming at(hi) is valid.
template <class At>
SlackPoint bisect_valid(const DelayOracle& oracle, At&& at, double lo, double hi, double resolution) {
  if (is_valid(oracle, at(lo))) return at(lo);
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (is_valid(oracle, at(mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return at(hi);
}

}  // namespace

SlackPoint find_axis_anchor(const DelayOracle& oracle, SlackAxis axis, const CharConfig& cfg) {
  const double anchor = cfg.anchor_slack;
  const SlackPoint g{anchor, anchor};
  if (!is_valid(oracle, g)) {
    throw CharacterizationError("flip-flop is metastable at the anchor slack; nothing to search");
  }
  const SlackBox box = oracle.domain();
  auto at = [&](double x) { return axis == SlackAxis::Hold ? SlackPoint{anchor, x} : SlackPoint{x, anchor}; };
  const double lo = std::max(0.0, axis == SlackAxis::Hold ? box.h_lo : box.s_lo);
  return bisect_valid(oracle, at, lo, anchor, cfg.search_resolution);
}

PerpendicularHit perpendicular_search(const DelayOracle& oracle, SlackPoint from,
                                      SlackPoint direction, const CharConfig& cfg) {
  const SlackBox box = oracle.domain();
  if (is_valid(oracle, from)) {
    const double t_max = max_travel(box, from, direction);
    if (t_max <= 0.0 || is_valid(oracle, along(from, direction, t_max))) return {from, 0.0};
    double lo = 0.0, hi = t_max;  // lo valid, hi metastable
    while (hi - lo > cfg.search_resolution) {
      const double mid = 0.5 * (lo + hi);
      if (is_valid(oracle, along(from, direction, mid))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return {along(from, direction, lo), lo};
  }
  // Start point already metastable: walk back toward the valid side.
  const SlackPoint back{-direction.setup, -direction.hold};
  const double t_max = max_travel(box, from, back);
  if (t_max <= 0.0 || !is_valid(oracle, along(from, back, t_max))) return {from, 0.0};
  double lo = 0.0, hi = t_max;  // lo metastable, hi valid
  while (hi - lo > cfg.search_resolution) {
    const double mid = 0.5 * (lo + hi);
    if (is_valid(oracle, along(from, back, mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {along(from, back, hi), hi};
}

namespace {

void refine_segment(const DelayOracle& oracle, SlackPoint a, SlackPoint b, int depth,
                    const CharConfig& cfg, std::vector<BoundarySegment>& out) {
  if (depth < cfg.max_split_depth) {
    const PerpendicularHit hit = perpendicular_search(oracle, midpoint(a, b), boundary_normal(a, b), cfg);
    const SlackPoint d = hit.point;
    if (hit.distance > cfg.k_th && d.setup > a.setup && d.setup < b.setup) {
      refine_segment(oracle, a, d, depth + 1, cfg, out);
      refine_segment(oracle, d, b, depth + 1, cfg, out);
      return;
    }
  }
  out.push_back({a, b});
}

}  // namespace

std::vector<BoundarySegment> refine_boundary(const DelayOracle& oracle, SlackPoint a, SlackPoint b,
                                             const CharConfig& cfg) {
  if (a.setup > b.setup) std::swap(a, b);
  std::vector<BoundarySegment> out;
  refine_segment(oracle, a, b, 0, cfg, out);
  return out;
}

namespace {

void triangulate_segment(const DelayOracle& oracle, SlackPoint p, SlackPoint q, int depth,
                         const CharConfig& cfg, std::vector<Polygon>& out) {
  // Vertical or horizontal pieces of the boundary enclose no area.
  if (q.setup - p.setup <= kGeomEps || p.hold - q.hold <= kGeomEps) return;

  const SlackBox box = oracle.domain();
  SlackPoint corner{q.setup, p.hold};
  OracleResponse rc = oracle.query(corner);
  for (int attempt = 0; rc.is_metastable(); ++attempt) {
    if (attempt >= cfg.max_split_depth) {
      std::ostringstream os;
      os << "right-angle corner near (" << q.setup << ", " << p.hold << ") stays metastable";
      throw CharacterizationError(os.str());
    }
    corner = {std::min(corner.setup + cfg.search_resolution, box.s_hi),
              std::min(corner.hold + cfg.search_resolution, box.h_hi)};
    rc = oracle.query(corner);
  }
  const std::array<DelaySample, 3> corners = {sample(oracle, p), sample(oracle, q),
                                              DelaySample{corner, rc}};
  if (corners[0].response.is_metastable() || corners[1].response.is_metastable()) {
    throw CharacterizationError("boundary segment end point is metastable");
  }
  const PlaneCoefficients plane = fit_plane(corners);

  const SlackPoint mid = midpoint(p, q);
  const OracleResponse rm = oracle.query(mid);
  const double err = rm.is_valid() ? std::abs(plane.at(mid) - rm.delay()) : kInf;
  if (err > cfg.d_th && depth < cfg.max_split_depth) {
    const PerpendicularHit hit = perpendicular_search(oracle, mid, boundary_normal(p, q), cfg);
    SlackPoint d = hit.distance > 0.0 ? hit.point : mid;
    if (!(d.setup > p.setup + kGeomEps && d.setup < q.setup - kGeomEps && d.hold < p.hold - kGeomEps &&
          d.hold > q.hold + kGeomEps)) {
      d = mid;
    }
    triangulate_segment(oracle, p, d, depth + 1, cfg, out);
    triangulate_segment(oracle, d, q, depth + 1, cfg, out);
    return;
  }

  Polygon tri;
  tri.kind = PolygonKind::Triangle;
  tri.s_l = p.setup;
  tri.s_u = corner.setup;
  tri.h_l = q.hold;
  tri.h_u = corner.hold;
  tri.plane = plane;
  const double slope = (q.hold - p.hold) / (q.setup - p.setup);
  tri.hypotenuse = Hypotenuse{p.hold - slope * p.setup, slope};
  out.push_back(tri);
}

}  // namespace

std::vector<Polygon> build_boundary_triangles(const DelayOracle& oracle,
                                              std::span<const BoundarySegment> segments,
                                              const CharConfig& cfg) {
  std::vector<Polygon> out;
  for (const auto& seg : segments) triangulate_segment(oracle, seg.a, seg.b, 0, cfg, out);
  return out;
}

// ---------------------------------------------------------------------------
// Plateau and rectangles

SlackPoint find_stable_corner(const DelayOracle& oracle, const CharConfig& cfg) {
  const SlackPoint g{cfg.anchor_slack, cfg.anchor_slack};
  const OracleResponse rg = oracle.query(g);
  if (rg.is_metastable()) throw CharacterizationError("anchor point is metastable");
  const double limit = rg.delay() + cfg.stable_epsilon;
  const SlackBox box = oracle.domain();
  const double s_floor = std::max(0.0, box.s_lo), h_floor = std::max(0.0, box.h_lo);

  SlackPoint p = g;
  for (;;) {
    const SlackPoint next{std::max(s_floor, p.setup - cfg.stable_step),
                          std::max(h_floor, p.hold - cfg.stable_step)};
    if (next == p) return p;
    const OracleResponse r = oracle.query(next);
    if (r.is_metastable() || r.delay() > limit) return p;
    p = next;
  }
}

namespace {

// Halves only the axes that carry the error.
void split_rectangle(const DelayOracle& oracle, double sl, double su, double hl, double hu, int depth,
                     const CharConfig& cfg, std::vector<Polygon>& out) {
  const auto fit = fit_rectangle(oracle, sl, su, hl, hu);
  if (!fit) return;  // touches the metastable region; the triangles cover it
  if (fit->error > cfg.d_th && depth < cfg.max_split_depth) {
    const double sm = 0.5 * (sl + su), hm = 0.5 * (hl + hu);
    const bool cut_s = !(fit->error_h > 2.0 * fit->error_s);
    const bool cut_h = !(fit->error_s > 2.0 * fit->error_h);
    std::vector<std::pair<double, double>> s_parts{{sl, su}}, h_parts{{hl, hu}};
    if (cut_s) s_parts = {{sl, sm}, {sm, su}};
    if (cut_h) h_parts = {{hl, hm}, {hm, hu}};
    for (const auto& [h0, h1] : h_parts) {
      for (const auto& [s0, s1] : s_parts) split_rectangle(oracle, s0, s1, h0, h1, depth + 1, cfg, out);
    }
    return;
  }
  out.push_back(make_rectangle(sl, su, hl, hu, fit->plane));
}

// Boundary chain by increasing setup, from the triangle hypotenuses and any
// extra segment end points (axis-parallel pieces leave no triangle).
std::vector<SlackPoint> boundary_chain(std::span<const Polygon> triangles,
                                       std::span<const BoundarySegment> boundary) {
  std::vector<SlackPoint> chain;
  for (const auto& t : triangles) {
    if (!t.hypotenuse) continue;
    const Hypotenuse& hy = *t.hypotenuse;
    chain.push_back({t.s_l, hy.c_t + hy.c_ts * t.s_l});
    chain.push_back({(t.h_l - hy.c_t) / hy.c_ts, t.h_l});
  }
  for (const auto& seg : boundary) {
    chain.push_back(seg.a);
    chain.push_back(seg.b);
  }
  std::sort(chain.begin(), chain.end(), [](SlackPoint a, SlackPoint b) {
    return a.setup != b.setup ? a.setup < b.setup : a.hold > b.hold;
  });
  std::vector<SlackPoint> out;
  for (const auto& p : chain) {
    if (out.empty() || !near(out.back().setup, p.setup) || !near(out.back().hold, p.hold)) {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

std::vector<Polygon> build_rectangles(const DelayOracle& oracle, std::span<const Polygon> triangles,
                                      SlackPoint h_corner, const CharConfig& cfg,
                                      std::span<const BoundarySegment> boundary) {
  const double s_top = cfg.anchor_slack, h_top = cfg.anchor_slack;
  const OracleResponse rg = oracle.query({s_top, h_top});
  if (rg.is_metastable()) throw CharacterizationError("anchor point is metastable");

  std::vector<Polygon> out;
  if (h_corner.setup < s_top - kGeomEps && h_corner.hold < h_top - kGeomEps) {
    out.push_back(make_rectangle(h_corner.setup, s_top, h_corner.hold, h_top, {rg.delay(), 0.0, 0.0}));
  }

  // Rows to the right of each vertical staircase leg below the plateau, and
  // columns above each horizontal leg left of it. Together with the stable
  // rectangle they tile everything north-east of the staircase.
  std::vector<SlackPoint> chain = boundary_chain(triangles, boundary);
  if (!chain.empty()) {
    // Sentinels close the staircase at the anchor lines, for walls that
    // end on the domain floor instead.
    chain.insert(chain.begin(), SlackPoint{chain.front().setup, h_top});
    chain.push_back({s_top, chain.back().hold});
  }
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    const SlackPoint hi_pt = chain[k];      // smaller setup, larger hold
    const SlackPoint lo_pt = chain[k + 1];  // larger setup, smaller hold
    const double row_top = std::min(hi_pt.hold, h_corner.hold);
    if (lo_pt.hold < row_top - kGeomEps && lo_pt.setup < s_top - kGeomEps) {
      split_rectangle(oracle, lo_pt.setup, s_top, lo_pt.hold, row_top, 0, cfg, out);
    }
    const double col_right = std::min(lo_pt.setup, h_corner.setup);
    const double col_bottom = std::max(hi_pt.hold, h_corner.hold);
    if (hi_pt.setup < col_right - kGeomEps && col_bottom < h_top - kGeomEps) {
      split_rectangle(oracle, hi_pt.setup, col_right, col_bottom, h_top, 0, cfg, out);
    }
  }
  return out;
}

std::vector<Polygon> merge_rectangles(const DelayOracle& oracle, std::vector<Polygon> rects,
                                      const CharConfig& cfg) {
  auto try_merge = [&](const Polygon& a, const Polygon& b) -> std::optional<Polygon> {
    const double sl = std::min(a.s_l, b.s_l), su = std::max(a.s_u, b.s_u);
    const double hl = std::min(a.h_l, b.h_l), hu = std::max(a.h_u, b.h_u);
    const auto fit = fit_rectangle(oracle, sl, su, hl, hu);
    if (!fit || fit->error > cfg.d_th) return std::nullopt;
    return make_rectangle(sl, su, hl, hu, fit->plane);
  };

  bool changed = true;
  while (changed) {
    changed = false;
    std::sort(rects.begin(), rects.end(), [](const Polygon& a, const Polygon& b) {
      if (a.h_l != b.h_l) return a.h_l < b.h_l;
      return a.s_l < b.s_l;
    });
    std::vector<char> gone(rects.size(), 0);
    for (std::size_t i = 0; i < rects.size(); ++i) {
      if (gone[i]) continue;
      bool merged = false;
      // Right neighbor first, then the upper one.
      for (int dir = 0; dir < 2 && !merged; ++dir) {
        for (std::size_t j = 0; j < rects.size() && !merged; ++j) {
          if (j == i || gone[j]) continue;
          const Polygon& a = rects[i];
          const Polygon& b = rects[j];
          const bool adjacent =
              dir == 0 ? near(b.s_l, a.s_u) && near(b.h_l, a.h_l) && near(b.h_u, a.h_u)
                       : near(b.h_l, a.h_u) && near(b.s_l, a.s_l) && near(b.s_u, a.s_u);
          if (!adjacent) continue;
          if (auto m = try_merge(a, b)) {
            rects[i] = *m;
            gone[j] = 1;
            merged = true;
            changed = true;
          }
        }
      }
    }
    std::vector<Polygon> kept;
    kept.reserve(rects.size());
    for (std::size_t i = 0; i < rects.size(); ++i) {
      if (!gone[i]) kept.push_back(rects[i]);
    }
    rects = std::move(kept);
  }
  return rects;
}

// ---------------------------------------------------------------------------
// Pipeline

PiecewiseDelayModel characterize(const DelayOracle& oracle, const CharConfig& cfg) {
  cfg.validate();
  CachedOracle cached(oracle);
  const SlackBox box = oracle.domain();
  if (!box.contains({cfg.anchor_slack, cfg.anchor_slack}, 0.0)) {
    throw CharacterizationError("anchor slack lies outside the oracle domain");
  }
  const OracleResponse rg = cached.query({cfg.anchor_slack, cfg.anchor_slack});
  if (rg.is_metastable()) throw CharacterizationError("anchor point is metastable");

  SlackPoint a = find_axis_anchor(cached, SlackAxis::Hold, cfg);
  SlackPoint b = find_axis_anchor(cached, SlackAxis::Setup, cfg);
  // A wall that never reaches the anchor line meets the domain floor
  // instead; anchor the chain there so the band below it is tiled too.
  const double s_floor = std::max(0.0, box.s_lo), h_floor = std::max(0.0, box.h_lo);
  if (a.hold <= h_floor) {
    a = bisect_valid(cached, [&](double x) { return SlackPoint{x, h_floor}; }, s_floor,
                     cfg.anchor_slack, cfg.search_resolution);
  }
  if (b.setup <= s_floor) {
    b = bisect_valid(cached, [&](double x) { return SlackPoint{s_floor, x}; }, h_floor,
                     cfg.anchor_slack, cfg.search_resolution);
  }
  const auto segments = refine_boundary(cached, b, a, cfg);
  std::vector<Polygon> triangles = build_boundary_triangles(cached, segments, cfg);
  const SlackPoint h = find_stable_corner(cached, cfg);
  std::vector<Polygon> rects = build_rectangles(cached, triangles, h, cfg, segments);

  // The stable rectangle keeps its constant plane; only the band is merged.
  std::optional<Polygon> stable;
  if (!rects.empty() && rects.front().plane == PlaneCoefficients{rg.delay(), 0.0, 0.0} &&
      near(rects.front().s_l, h.setup) && near(rects.front().h_l, h.hold)) {
    stable = rects.front();
    rects.erase(rects.begin());
  }
  rects = merge_rectangles(cached, std::move(rects), cfg);

  PiecewiseDelayModel model;
  auto inside_stable = [&](const Polygon& p) {
    return stable && p.s_l >= stable->s_l - kGeomEps && p.s_u <= stable->s_u + kGeomEps &&
           p.h_l >= stable->h_l - kGeomEps && p.h_u <= stable->h_u + kGeomEps;
  };
  for (auto& t : triangles) {
    if (!inside_stable(t)) model.polygons.push_back(t);
  }
  if (stable) model.polygons.push_back(*stable);
  for (auto& r : rects) {
    if (!inside_stable(r)) model.polygons.push_back(r);
  }
  if (model.polygons.empty()) throw CharacterizationError("characterization produced no polygons");
  for (std::size_t i = 0; i < model.polygons.size(); ++i) model.polygons[i].id = static_cast<int>(i);

  model.f_lower = rg.delay();
  model.f_upper = oracle.metastable_threshold();
  model.d_th = cfg.d_th;
  model.k_th = cfg.k_th;
  model.update_extremes();
  model.query_count = cached.query_count();
  return model;
}

ValidationReport validate_model(const PiecewiseDelayModel& model, const DelayOracle& oracle,
                                double grid_resolution, const std::function<bool(SlackPoint)>& include) {
  if (model.polygons.empty()) throw std::invalid_argument("validate_model on an empty model");
  if (!(grid_resolution > 0)) throw std::invalid_argument("grid resolution must be > 0");
  ValidationReport rep;
  rep.grid_resolution = grid_resolution;
  const SlackBox dom = oracle.domain();
  const auto ns = static_cast<long>(std::floor((model.s_max - model.s_min) / grid_resolution + 1e-9));
  const auto nh = static_cast<long>(std::floor((model.h_max - model.h_min) / grid_resolution + 1e-9));
  for (long i = 0; i <= ns; ++i) {
    for (long j = 0; j <= nh; ++j) {
      const SlackPoint p{model.s_min + i * grid_resolution, model.h_min + j * grid_resolution};
      if (!dom.contains(p, 0.0)) continue;
      const OracleResponse r = oracle.query(p);
      if (r.is_metastable()) continue;
      if (include && !include(p)) continue;
      ++rep.valid_points;
      double best = kInf;
      for (const auto& poly : model.polygons) {
        if (poly.contains(p)) best = std::min(best, std::abs(poly.plane.at(p) - r.delay()));
      }
      if (best == kInf) continue;
      if (++rep.covered_points == 1 || best > rep.max_abs_error) {
        rep.max_abs_error = best;
        rep.worst_point = p;
      }
    }
  }
  rep.coverage_fraction =
      rep.valid_points > 0 ? static_cast<double>(rep.covered_points) / rep.valid_points : 0.0;
  return rep;
}

}  // namespace cqsta

namespace cqsta {

CoarsenResult characterize_to_polygon_target(const DelayOracle& oracle, const CharConfig& cfg,
                                             std::size_t target) {
  if (target == 0) throw std::invalid_argument("polygon target must be positive");
  CharConfig c = cfg;
  CoarsenResult best{characterize(oracle, c), c.d_th};
  if (best.model.polygons.size() <= target) return best;
  // Grow d_th until the count fits, then bisect for the finest fitting value.
  double lo = c.d_th, hi = c.d_th;
  std::optional<CoarsenResult> fit;
  for (int i = 0; i < 16 && !fit; ++i) {
    lo = hi;
    hi *= 2.0;
    c.d_th = hi;
    PiecewiseDelayModel m = characterize(oracle, c);
    if (m.polygons.size() <= target) fit = CoarsenResult{std::move(m), hi};
  }
  if (!fit) throw CharacterizationError("no accuracy setting reaches " + std::to_string(target) + " polygons");
  for (int i = 0; i < 12; ++i) {
    c.d_th = 0.5 * (lo + hi);
    PiecewiseDelayModel m = characterize(oracle, c);
    if (m.polygons.size() <= target) {
      hi = c.d_th;
      fit = CoarsenResult{std::move(m), hi};
    } else {
      lo = c.d_th;
    }
  }
  return *fit;
}

}  // namespace cqsta
