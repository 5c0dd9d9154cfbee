#include <cmath>

#include "classic_sta.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace cqsta;

TEST_CASE("classic characterization of REF45") {
  AnalyticOracle o{AnalyticParams{}};
  const double stable = o.query({150, 150}).delay();
  auto p = characterize_classic(o, kDefaultFactor, CharConfig{});
  CHECK(std::abs(p.t_su - 8 * std::log(100.0)) <= 0.25);
  CHECK(std::abs(p.t_h - 8 * std::log(100.0)) <= 0.25);
  CHECK(p.d_cq == doctest::Approx(1.1 * stable).epsilon(1e-12));
  CHECK(std::abs(p.d_cq - 110.0) <= 1e-6 * 110.0);

  auto onset = characterize_classic(o, kOnsetFactor, CharConfig{});
  CHECK(std::abs(onset.t_su - 8 * std::log(1000.0)) <= 0.25);
  CHECK(std::abs(onset.d_cq - 101.0) <= 1e-6 * 101.0);
  CHECK(onset.t_su > p.t_su);
}

TEST_CASE("classic minimum period") {
  ClassicFFParams p{30, 0, 100, 1.1};
  auto g = testing::cc1_graph();
  auto t = min_period_classic(g, p);
  CHECK(t.T == 630.0);
  CHECK(!t.no_stages);

  auto self = parse_stage_graph("ff A\nstage A A dmax=0 dmin=0\n");
  CHECK(min_period_classic(self, p).T == 130.0);

  auto none = parse_stage_graph("ff A\n");
  CHECK(min_period_classic(none, p).no_stages);
}

TEST_CASE("classic period leaves every stage satisfied") {
  ClassicFFParams p{36.8, 36.8, 110, 1.1};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomGraphSpec spec;
    spec.n_ff = 12;
    spec.n_stage = 30;
    spec.seed = seed;
    auto g = generate_random_stage_graph(spec);
    const double T = min_period_classic(g, p).T;
    bool tight = false;
    for (const auto& st : g.stages) {
      CHECK(p.d_cq + st.d_max + p.t_su <= T + 1e-9);
      tight = tight || p.d_cq + st.d_max + p.t_su == T;
    }
    CHECK(tight);
    CHECK(count_violations(g, p, T).setup_paths == 0);
  }
}

TEST_CASE("violation counting") {
  auto g = parse_stage_graph("ff A\nff B\nstage A B dmax=500 dmin=10\n");
  ClassicFFParams p{30, 0, 100, 1.1};
  auto v = count_violations(g, p, 610);
  CHECK(v.setup_paths == 1);
  CHECK(v.setup_ffs == 1);
  CHECK(count_violations(g, p, 630) == ViolationCounts{});

  ClassicFFParams hold{0, 120, 100, 1.1};
  auto h = count_violations(g, hold, 1000);
  CHECK(h.hold_paths == 1);
  CHECK(h.hold_ffs == 1);
  CHECK(h.setup_paths == 0);

  auto fan = parse_stage_graph("ff A\nff B\nff C\nstage A C dmax=500 dmin=0\nstage B C dmax=500 dmin=0\n");
  auto f = count_violations(fan, p, 600);
  CHECK(f.setup_paths == 2);
  CHECK(f.setup_ffs == 1);
}
