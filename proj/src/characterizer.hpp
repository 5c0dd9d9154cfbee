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

// Piecewise-linear clock-to-q model construction.
//
// The valid (non-metastable) part of the slack plane is covered in three
// passes:
//   1. The metastable boundary is traced by a chain of segments whose end
//      points lie on the boundary. Each segment becomes the hypotenuse of a
//      right triangle whose right-angle corner points into the valid region.
//   2. A diagonal walk from the large-slack anchor finds where the delay
//      starts to rise; everything beyond is one constant "stable" rectangle.
//      The band between the triangle staircase and the stable rectangle is
//      tiled with rectangles that are quartered until their center error is
//      within d_th.
//   3. Edge-adjacent rectangles are merged while the merged plane still
//      passes its center check.
// Planes are fit through oracle samples at polygon corners, so every polygon
// is exact at its fitting corners.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracle.hpp"

namespace cqsta {

// delay(s, h) = c + c_s * s + c_h * h
struct PlaneCoefficients {
  double c = 0.0;
  double c_s = 0.0;
  double c_h = 0.0;

  double at(SlackPoint p) const { return c + c_s * p.setup + c_h * p.hold; }
  friend bool operator==(const PlaneCoefficients&, const PlaneCoefficients&) = default;
};

enum class PolygonKind { Triangle, Rectangle };

// Region h >= c_t + c_ts * s, the valid side of a boundary segment.
struct Hypotenuse {
  double c_t = 0.0;
  double c_ts = 0.0;
  friend bool operator==(const Hypotenuse&, const Hypotenuse&) = default;
};

struct Polygon {
  int id = 0;
  PolygonKind kind = PolygonKind::Rectangle;
  double s_l = 0.0, s_u = 0.0;
  double h_l = 0.0, h_u = 0.0;
  PlaneCoefficients plane;
  std::optional<Hypotenuse> hypotenuse;  // present iff kind == Triangle

  bool contains(SlackPoint p, double tol = 1e-9) const;
  // Plane extremes over the region (attained at a vertex).
  double min_delay() const;
  double max_delay() const;
  std::vector<SlackPoint> vertices() const;

  friend bool operator==(const Polygon&, const Polygon&) = default;
};

struct PiecewiseDelayModel {
  std::vector<Polygon> polygons;
  double f_lower = 0.0;  // stable delay
  double f_upper = 0.0;  // metastable threshold
  double s_min = 0.0, s_max = 0.0;
  double h_min = 0.0, h_max = 0.0;
  double d_th = 0.0;
  double k_th = 0.0;
  std::int64_t query_count = 0;

  // Recomputes the slack extremes from the polygon list.
  void update_extremes();
  const Polygon& polygon_by_id(int id) const;
};

struct CharConfig {
  double anchor_slack = 150.0;
  double k_th = 5.0;
  double d_th = 2.0;
  double search_resolution = 0.25;
  double stable_step = 4.0;
  double stable_epsilon = 0.5;
  int max_split_depth = 10;

  void validate() const;
};

class CharacterizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SlackAxis { Setup, Hold };

// End points ordered by increasing setup slack (a.setup <= b.setup).
struct BoundarySegment {
  SlackPoint a;
  SlackPoint b;
};

// Binary search for the smallest valid slack on `axis` while the other slack
// is held at cfg.anchor_slack.
SlackPoint find_axis_anchor(const DelayOracle& oracle, SlackAxis axis, const CharConfig& cfg);

// Boundary point on the line through `from` along `direction` (unit vector),
// found by binary search toward the metastable side. `distance` is the
// traveled length, 0 when no crossing exists inside the domain.
struct PerpendicularHit {
  SlackPoint point;
  double distance = 0.0;
};
PerpendicularHit perpendicular_search(const DelayOracle& oracle, SlackPoint from,
                                      SlackPoint direction, const CharConfig& cfg);

std::vector<BoundarySegment> refine_boundary(const DelayOracle& oracle, SlackPoint a,
                                             SlackPoint b, const CharConfig& cfg);

std::vector<Polygon> build_boundary_triangles(const DelayOracle& oracle,
                                              std::span<const BoundarySegment> segments,
                                              const CharConfig& cfg);

SlackPoint find_stable_corner(const DelayOracle& oracle, const CharConfig& cfg);

// Returns the stable rectangle first, followed by the band rectangles.
// `boundary` adds chain points that left no triangle (axis-parallel walls).
std::vector<Polygon> build_rectangles(const DelayOracle& oracle,
                                      std::span<const Polygon> triangles, SlackPoint h_corner,
                                      const CharConfig& cfg,
                                      std::span<const BoundarySegment> boundary = {});

std::vector<Polygon> merge_rectangles(const DelayOracle& oracle, std::vector<Polygon> rects,
                                      const CharConfig& cfg);

class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plane through three samples, or through the three largest of four
// (ties: smaller setup, then smaller hold). Samples must be valid.
PlaneCoefficients fit_plane(std::span<const DelaySample> corners);

PiecewiseDelayModel characterize(const DelayOracle& oracle, const CharConfig& cfg);

struct CoarsenResult {
  PiecewiseDelayModel model;
  double d_th = 0.0;
};

// Raises d_th until the model has at most `target` polygons; returns the
// finest such model found by bisection.
CoarsenResult characterize_to_polygon_target(const DelayOracle& oracle, const CharConfig& cfg,
                                             std::size_t target);

struct ValidationReport {
  double grid_resolution = 0.0;
  double max_abs_error = 0.0;
  double coverage_fraction = 0.0;
  SlackPoint worst_point;
  std::int64_t valid_points = 0;
  std::int64_t covered_points = 0;
};

// Grid sweep over the model's slack extremes. `include`, when given,
// restricts which valid points take part in both statistics.
ValidationReport validate_model(const PiecewiseDelayModel& model, const DelayOracle& oracle,
                                double grid_resolution,
                                const std::function<bool(SlackPoint)>& include = {});

// JSON model file.
std::string serialize_model(const PiecewiseDelayModel& model);
PiecewiseDelayModel parse_model(const std::string& text);

}  // namespace cqsta
