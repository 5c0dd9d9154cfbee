// Shared test instances.

#pragma once

#include <functional>
#include <utility>

#include "characterizer.hpp"
#include "oracle.hpp"
#include "timing_graph.hpp"

namespace cqsta::testing {

// Oracle backed by a closure over [0, max]^2; metastable above f_bar.
class FunctionOracle final : public DelayOracle {
 public:
  FunctionOracle(std::function<double(SlackPoint)> f, double f_bar = 200.0, double max = 300.0)
      : f_(std::move(f)), f_bar_(f_bar), max_(max) {}
  OracleResponse query(SlackPoint p) const override {
    if (!domain().contains(p, 0.0)) throw DomainError("outside test domain");
    const double d = f_(p);
    return d > f_bar_ ? OracleResponse::metastable() : OracleResponse::valid(d);
  }
  double metastable_threshold() const override { return f_bar_; }
  SlackBox domain() const override { return {0.0, max_, 0.0, max_}; }

 private:
  std::function<double(SlackPoint)> f_;
  double f_bar_;
  double max_;
};

inline Polygon rectangle(int id, double sl, double su, double hl, double hu, double d) {
  Polygon p;
  p.id = id;
  p.kind = PolygonKind::Rectangle;
  p.s_l = sl;
  p.s_u = su;
  p.h_l = hl;
  p.h_u = hu;
  p.plane = {d, 0.0, 0.0};
  return p;
}

// Chain F1 -> F2 -> F3.
inline StageGraph cc1_graph() {
  return parse_stage_graph(
      "ff F1\nff F2\nff F3\n"
      "stage F1 F2 dmax=500 dmin=50\n"
      "stage F2 F3 dmax=300 dmin=50\n");
}

// Two constant rectangles: P0 is the stable plateau, P1 trades 20 ps of
// setup slack for 20 ps of clock-to-q delay.
inline PiecewiseDelayModel cc1_model() {
  PiecewiseDelayModel m;
  m.polygons = {rectangle(0, 30, 200, 30, 200, 100), rectangle(1, 10, 30, 30, 200, 120)};
  m.f_lower = 100.0;
  m.f_upper = 200.0;
  m.d_th = 2.0;
  m.k_th = 5.0;
  m.update_extremes();
  return m;
}

inline const PiecewiseDelayModel& ref45_model() {
  static const PiecewiseDelayModel m = characterize(AnalyticOracle(AnalyticParams{}), CharConfig{});
  return m;
}

}  // namespace cqsta::testing
