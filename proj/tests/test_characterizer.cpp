#include <algorithm>
#include <array>
#include <cmath>

#include "characterizer.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"
#include "text_util.hpp"

using namespace cqsta;
using cqsta::testing::FunctionOracle;
using cqsta::testing::rectangle;
using cqsta::testing::ref45_model;

namespace {

const AnalyticOracle& ref45() {
  static const AnalyticOracle o{AnalyticParams{}};
  return o;
}

FunctionOracle constant_oracle() {
  return FunctionOracle([](SlackPoint) { return 100.0; });
}

// Valid points where no point within radius k lies on the metastable side.
bool far_from_boundary(const DelayOracle& o, SlackPoint p, double k) {
  const SlackBox box = o.domain();
  for (int i = 0; i <= 90; ++i) {
    const double a = M_PI + i * (M_PI / 2) / 90;  // toward smaller slacks
    SlackPoint q{std::clamp(p.setup + k * std::cos(a), box.s_lo, box.s_hi),
                 std::clamp(p.hold + k * std::sin(a), box.h_lo, box.h_hi)};
    if (o.query(q).is_metastable()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("axis anchors land on the REF45 walls") {
  const double wall = 8.0 * std::log(10.0);
  CharConfig cfg;
  SlackPoint a = find_axis_anchor(ref45(), SlackAxis::Hold, cfg);
  CHECK(a.setup == 150.0);
  CHECK(std::abs(a.hold - wall) <= 0.25);
  SlackPoint b = find_axis_anchor(ref45(), SlackAxis::Setup, cfg);
  CHECK(b.hold == 150.0);
  CHECK(std::abs(b.setup - wall) <= 0.25);
  CHECK(ref45().query(a).is_valid());
  CHECK(ref45().query(b).is_valid());
}

TEST_CASE("axis anchor on a constant oracle reaches the lower bound") {
  auto o = constant_oracle();
  SlackPoint a = find_axis_anchor(o, SlackAxis::Hold, CharConfig{});
  CHECK(a.hold == 0.0);
}

TEST_CASE("straight boundary yields a single segment") {
  FunctionOracle o([](SlackPoint p) { return p.setup + p.hold >= 100 ? 100.0 : 300.0; });
  CharConfig cfg;
  auto segs = refine_boundary(o, {0, 100}, {100, 0}, cfg);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].a == SlackPoint{0, 100});
  CHECK(segs[0].b == SlackPoint{100, 0});
}

TEST_CASE("REF45 boundary end points sit on the wall") {
  CharConfig cfg;
  const double r = cfg.search_resolution;
  SlackPoint a = find_axis_anchor(ref45(), SlackAxis::Hold, cfg);
  SlackPoint b = find_axis_anchor(ref45(), SlackAxis::Setup, cfg);
  auto segs = refine_boundary(ref45(), b, a, cfg);
  CHECK(segs.size() > 1);
  for (const auto& s : segs) {
    for (SlackPoint p : {s.a, s.b}) {
      CHECK(ref45().query(p).is_valid());
      const SlackPoint in{std::max(0.0, p.setup - r), std::max(0.0, p.hold - r)};
      CHECK(ref45().query(in).is_metastable());
    }
  }
}

TEST_CASE("segment count grows as k_th shrinks") {
  auto count = [](double k) {
    CharConfig cfg;
    cfg.k_th = k;
    SlackPoint a = find_axis_anchor(ref45(), SlackAxis::Hold, cfg);
    SlackPoint b = find_axis_anchor(ref45(), SlackAxis::Setup, cfg);
    return refine_boundary(ref45(), b, a, cfg).size();
  };
  CHECK(count(2) >= count(5));
  CHECK(count(5) >= count(20));
}

TEST_CASE("boundary triangle has its right angle at the componentwise max") {
  FunctionOracle o([](SlackPoint p) { return 250.0 - 0.5 * (p.setup + p.hold); });
  BoundarySegment seg{{18.4, 150}, {150, 18.4}};
  auto tris = build_boundary_triangles(o, std::span(&seg, 1), CharConfig{});
  REQUIRE(tris.size() == 1);
  const Polygon& t = tris[0];
  CHECK(t.kind == PolygonKind::Triangle);
  CHECK(t.s_u == 150.0);
  CHECK(t.h_u == 150.0);
  CHECK(t.plane.c == doctest::Approx(250));
  CHECK(t.plane.c_s == doctest::Approx(-0.5));
  CHECK(t.plane.c_h == doctest::Approx(-0.5));
  REQUIRE(t.hypotenuse.has_value());
  CHECK(t.hypotenuse->c_ts == doctest::Approx(-1.0));
  CHECK(t.contains({150, 150}));
  CHECK(!t.contains({20, 20}));
}

TEST_CASE("REF45 triangles pass their midpoint check") {
  const auto& m = ref45_model();
  int triangles = 0;
  for (const auto& p : m.polygons) {
    if (p.kind != PolygonKind::Triangle) continue;
    ++triangles;
    const SlackPoint mid{0.5 * (p.s_l + p.s_u), 0.5 * (p.h_l + p.h_u)};
    // Midpoint of the hypotenuse.
    const SlackPoint hm{mid.setup, p.hypotenuse->c_t + p.hypotenuse->c_ts * mid.setup};
    const auto r = ref45().query(hm);
    REQUIRE(r.is_valid());
    CHECK(std::abs(p.plane.at(hm) - r.delay()) <= m.d_th + 1e-9);
  }
  CHECK(triangles > 0);
}

TEST_CASE("stable corner walk") {
  CharConfig cfg;
  SlackPoint h = find_stable_corner(ref45(), cfg);
  CAPTURE(h.setup);
  CAPTURE(h.hold);
  // The excess 2000 e^(-s/8) reaches 0.5 at s = 8 ln 4000; H is the last
  // step of the 4 ps walk before it.
  const double crossing = 8 * std::log(4000.0);
  CHECK(h.setup == h.hold);
  CHECK(h.setup >= crossing);
  CHECK(h.setup - cfg.stable_step < crossing);
  auto c = constant_oracle();
  CHECK(find_stable_corner(c, cfg) == SlackPoint{0, 0});
  CharConfig loose = cfg;
  loose.stable_epsilon = 50;
  SlackPoint h2 = find_stable_corner(ref45(), loose);
  CHECK(h2.setup < h.setup);
  CHECK(h2.hold < h.hold);
}

TEST_CASE("plane fitting") {
  SUBCASE("flat") {
    std::array<DelaySample, 4> c = {DelaySample{{0, 0}, OracleResponse::valid(100)},
                                    DelaySample{{1, 0}, OracleResponse::valid(100)},
                                    DelaySample{{0, 1}, OracleResponse::valid(100)},
                                    DelaySample{{1, 1}, OracleResponse::valid(100)}};
    auto p = fit_plane(c);
    CHECK(p.c == doctest::Approx(100));
    CHECK(p.c_s == doctest::Approx(0));
    CHECK(p.c_h == doctest::Approx(0));
  }
  SUBCASE("four corners keep the three largest") {
    std::array<DelaySample, 4> c = {DelaySample{{20, 20}, OracleResponse::valid(120)},
                                    DelaySample{{40, 20}, OracleResponse::valid(110)},
                                    DelaySample{{20, 40}, OracleResponse::valid(110)},
                                    DelaySample{{40, 40}, OracleResponse::valid(100)}};
    auto p = fit_plane(c);
    CHECK(p.c == doctest::Approx(140));
    CHECK(p.c_s == doctest::Approx(-0.5));
    CHECK(p.c_h == doctest::Approx(-0.5));
    // Center agrees with the bilinear average of the four corners.
    CHECK(p.at({30, 30}) == doctest::Approx(110));
  }
  SUBCASE("triangle") {
    std::array<DelaySample, 3> c = {DelaySample{{10, 10}, OracleResponse::valid(150)},
                                    DelaySample{{30, 10}, OracleResponse::valid(120)},
                                    DelaySample{{10, 30}, OracleResponse::valid(120)}};
    auto p = fit_plane(c);
    CHECK(p.c == doctest::Approx(180));
    CHECK(p.c_s == doctest::Approx(-1.5));
    CHECK(p.c_h == doctest::Approx(-1.5));
  }
  SUBCASE("collinear samples are rejected") {
    std::array<DelaySample, 3> c = {DelaySample{{0, 0}, OracleResponse::valid(150)},
                                    DelaySample{{1, 1}, OracleResponse::valid(120)},
                                    DelaySample{{2, 2}, OracleResponse::valid(120)}};
    CHECK_THROWS_AS(fit_plane(c), DegenerateFitError);
  }
}

TEST_CASE("merging rectangles") {
  auto o = constant_oracle();
  CharConfig cfg;
  SUBCASE("adjacent pieces of a constant surface merge") {
    auto out = merge_rectangles(o, {rectangle(0, 0, 10, 0, 10, 100), rectangle(1, 10, 20, 0, 10, 100)}, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].s_l == 0);
    CHECK(out[0].s_u == 20);
  }
  SUBCASE("separated pieces stay apart") {
    auto out = merge_rectangles(o, {rectangle(0, 0, 10, 0, 10, 100), rectangle(1, 30, 40, 0, 10, 100)}, cfg);
    CHECK(out.size() == 2);
  }
}

TEST_CASE("REF45 rectangles pass their center check and merging shrinks the band") {
  CharConfig cfg;
  CachedOracle o(ref45());
  SlackPoint a = find_axis_anchor(o, SlackAxis::Hold, cfg);
  SlackPoint b = find_axis_anchor(o, SlackAxis::Setup, cfg);
  auto segs = refine_boundary(o, b, a, cfg);
  auto tris = build_boundary_triangles(o, segs, cfg);
  auto rects = build_rectangles(o, tris, find_stable_corner(o, cfg), cfg, segs);
  REQUIRE(rects.size() > 2);
  for (const auto& r : rects) {
    const SlackPoint c{0.5 * (r.s_l + r.s_u), 0.5 * (r.h_l + r.h_u)};
    auto resp = o.query(c);
    REQUIRE(resp.is_valid());
    CHECK(std::abs(r.plane.at(c) - resp.delay()) <= cfg.d_th + 1e-9);
  }
  std::vector<Polygon> band(rects.begin() + 1, rects.end());
  const auto before = band.size();
  auto merged = merge_rectangles(o, band, cfg);
  CHECK(merged.size() < before);
}

TEST_CASE("constant oracle characterizes to one rectangle") {
  auto o = constant_oracle();
  auto m = characterize(o, CharConfig{});
  REQUIRE(m.polygons.size() == 1);
  CHECK(m.polygons[0].kind == PolygonKind::Rectangle);
  auto rep = validate_model(m, o, 5.0);
  CHECK(rep.max_abs_error == 0.0);
  CHECK(rep.coverage_fraction == 1.0);
}

TEST_CASE("REF45 default model accuracy, coverage and economy") {
  const auto& m = ref45_model();
  auto rep = validate_model(m, ref45(), 1.0);
  CHECK(rep.max_abs_error <= m.d_th);
  auto far = validate_model(m, ref45(), 1.0, [&](SlackPoint p) { return far_from_boundary(ref45(), p, m.k_th); });
  CHECK(far.coverage_fraction >= 0.98);
  CHECK(m.query_count < 2000);
  CHECK(m.f_lower == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(m.f_upper == 200.0);
  // Every polygon corner is a valid point and polygons stay inside the domain.
  for (const auto& p : m.polygons) {
    CHECK(p.s_l >= 0);
    CHECK(p.h_u <= 300);
    CHECK(p.min_delay() <= p.max_delay());
  }
}

TEST_CASE("model file round trip and strict parsing") {
  const auto& m = ref45_model();
  auto back = parse_model(serialize_model(m));
  CHECK(back.polygons == m.polygons);
  CHECK(back.f_lower == m.f_lower);
  CHECK(back.query_count == m.query_count);
  CHECK(serialize_model(back) == serialize_model(m));

  std::string text = serialize_model(m);
  std::string empty = serialize_model([&] {
    PiecewiseDelayModel e = m;
    e.polygons.clear();
    return e;
  }());
  CHECK_THROWS_AS(parse_model(empty), ParseError);
  std::string extra = text;
  extra.insert(extra.find('{') + 1, "\"bogus\": 1,");
  CHECK_THROWS_AS(parse_model(extra), ParseError);
  CHECK_THROWS_AS(parse_model("{ not json"), ParseError);
}

TEST_CASE("coarsening honors the polygon target") {
  for (std::size_t target : {16u, 32u}) {
    auto r = characterize_to_polygon_target(ref45(), CharConfig{}, target);
    CHECK(r.model.polygons.size() <= target);
    CHECK(r.d_th >= 2.0);
  }
}

TEST_CASE("characterization config is validated") {
  CharConfig c;
  c.d_th = 0;
  CHECK_THROWS(c.validate());
  c = {};
  c.search_resolution = -1;
  CHECK_THROWS(c.validate());
}
