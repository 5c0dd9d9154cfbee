#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "support/fixtures.hpp"
#include "text_util.hpp"

using namespace cqsta;

TEST_CASE("analytic delay on the plateau and near the setup wall") {
  AnalyticParams p;
  CHECK(analytic_delay({150, 150}, p) == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(analytic_delay({20, 150}, p) ==
        doctest::Approx(100.0 + 1000.0 * std::exp(-2.5) + 1000.0 * std::exp(-150.0 / 8)).epsilon(1e-9));
  CHECK(std::abs(analytic_delay({20, 150}, p) - 182.085) < 1e-3);
}

TEST_CASE("analytic delay is symmetric in setup and hold") {
  AnalyticParams p;
  for (double a : {0.0, 7.5, 18.0, 40.0, 299.0}) {
    for (double b : {0.0, 3.0, 25.0, 120.0}) {
      CHECK(analytic_delay({a, b}, p) == doctest::Approx(analytic_delay({b, a}, p)).epsilon(1e-15));
    }
  }
}

TEST_CASE("analytic oracle classifies valid and metastable points") {
  AnalyticOracle o{AnalyticParams{}};
  auto r = o.query({150, 150});
  REQUIRE(r.is_valid());
  CHECK(r.delay() == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(o.query({0, 150}).is_metastable());
  // Wall at s = 8 ln 10 when the hold term vanishes.
  CHECK(o.query({18.42, 150}).is_metastable());
  CHECK(o.query({18.43, 150}).is_valid());
  CHECK(o.metastable_threshold() == 200.0);
}

TEST_CASE("analytic oracle rejects points outside its domain") {
  AnalyticOracle o{AnalyticParams{}};
  CHECK_THROWS_AS(o.query({-1, 10}), DomainError);
  CHECK_THROWS_AS(o.query({10, 300.5}), DomainError);
  CHECK_THROWS_AS(o.query({NAN, 10}), DomainError);
}

TEST_CASE("analytic parameters are validated") {
  AnalyticParams p;
  p.f_bar = 50;
  CHECK_THROWS_AS(AnalyticOracle{p}, std::invalid_argument);
  p = {};
  p.tau_s = 0;
  CHECK_THROWS_AS(AnalyticOracle{p}, std::invalid_argument);
}

TEST_CASE("delay is monotone non-increasing in each slack") {
  AnalyticParams p;
  for (double s = 0; s < 300; s += 7.3) {
    for (double h = 0; h < 300; h += 11.1) {
      CHECK(analytic_delay({s + 1, h}, p) <= analytic_delay({s, h}, p));
      CHECK(analytic_delay({s, h + 1}, p) <= analytic_delay({s, h}, p));
    }
  }
}

TEST_CASE("grid oracle interpolates") {
  SUBCASE("constant grid") {
    std::vector<DelaySample> g;
    for (double s : {0.0, 10.0, 20.0}) {
      for (double h : {0.0, 5.0}) g.push_back({{s, h}, OracleResponse::valid(100)});
    }
    GridOracle o(g, 200);
    auto r = o.query({13.7, 2.2});
    REQUIRE(r.is_valid());
    CHECK(r.delay() == doctest::Approx(100));
  }
  SUBCASE("node identity and cell center") {
    std::vector<DelaySample> g = {{{0, 0}, OracleResponse::valid(100)},
                                  {{10, 0}, OracleResponse::valid(110)},
                                  {{0, 10}, OracleResponse::valid(110)},
                                  {{10, 10}, OracleResponse::valid(120)}};
    GridOracle o(g, 200);
    CHECK(o.query({10, 0}).delay() == doctest::Approx(110));
    CHECK(o.query({10, 10}).delay() == doctest::Approx(120));
    CHECK(o.query({5, 5}).delay() == doctest::Approx(110));
    CHECK_THROWS_AS(o.query({11, 5}), DomainError);
  }
  SUBCASE("metastable corner taints its cells") {
    std::vector<DelaySample> g = {{{0, 0}, OracleResponse::metastable()},
                                  {{10, 0}, OracleResponse::valid(110)},
                                  {{0, 10}, OracleResponse::valid(110)},
                                  {{10, 10}, OracleResponse::valid(120)}};
    GridOracle o(g, 200);
    CHECK(o.query({5, 5}).is_metastable());
    CHECK(o.query({10, 10}).is_valid());
  }
  SUBCASE("incomplete or duplicate grids are rejected") {
    std::vector<DelaySample> g = {{{0, 0}, OracleResponse::valid(100)},
                                  {{10, 0}, OracleResponse::valid(110)},
                                  {{0, 10}, OracleResponse::valid(110)}};
    CHECK_THROWS_AS(GridOracle(g, 200), OracleError);
    g.push_back({{0, 0}, OracleResponse::valid(100)});
    CHECK_THROWS_AS(GridOracle(g, 200), OracleError);
  }
}

TEST_CASE("sweep dump round trip reproduces the analytic oracle on nodes") {
  AnalyticOracle a{AnalyticParams{}};
  const auto samples = sweep(a, {0, 300, 0, 300}, 5.0);
  CHECK(samples.size() == 61u * 61u);
  const auto back = parse_sweep_dump(write_sweep_dump(samples));
  REQUIRE(back.size() == samples.size());
  GridOracle g(back, 200);
  for (std::size_t i = 0; i < samples.size(); i += 37) {
    CHECK(g.query(samples[i].point) == samples[i].response);
  }
}

TEST_CASE("sweep dump parser reports the failing line") {
  try {
    parse_sweep_dump("0 0 100\n0 5 oops\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_sweep_dump("1 2\n"), ParseError);
}

TEST_CASE("cached oracle counts distinct points") {
  AnalyticOracle a{AnalyticParams{}};
  CachedOracle c(a);
  c.query({1, 2});
  c.query({1, 2});
  c.query({1.0000000001, 2});
  c.query({3, 4});
  CHECK(c.query_count() == 2);
  CHECK(c.query({3, 4}) == a.query({3, 4}));
}
