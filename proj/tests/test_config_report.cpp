#include "config.hpp"
#include "doctest.h"
#include "json.hpp"
#include "report.hpp"
#include "support/fixtures.hpp"
#include "text_util.hpp"

using namespace cqsta;

namespace {

bool is_json(const std::string& text) { return nlohmann::json::accept(text); }

}  // namespace

TEST_CASE("settings parsing") {
  auto s = parse_settings("# run\nd_th = 3.5\nk_th=4\nt_su = 30\nt_h = 0\nd_cq = 100\ngrid_file = sweep.txt\n");
  CHECK(s.characterization.d_th == 3.5);
  CHECK(s.characterization.k_th == 4);
  REQUIRE(s.grid_file.has_value());
  CHECK(*s.grid_file == "sweep.txt");
  auto c = explicit_classic(s);
  REQUIRE(c.has_value());
  CHECK(c->t_su == 30);
  CHECK(c->d_cq == 100);

  auto partial = parse_settings("t_su = 30\n");
  CHECK(!explicit_classic(partial));
}

TEST_CASE("settings errors") {
  auto line_of = [](const char* text) {
    try {
      parse_settings(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("d_th = 2\nbogus = 1\n") == 2);
  CHECK(line_of("d_th 2\n") == 1);
  CHECK(line_of("d_th = x\n") == 1);
  CHECK(line_of("max_split_depth = 2.5\n") == 1);
  CHECK_THROWS_AS(parse_settings("d_th = -1\n"), ParseError);
  CHECK_THROWS_AS(parse_settings("f_bar = 50\n"), ParseError);
}

TEST_CASE("settings round trip") {
  auto s = parse_settings("d_th = 3.5\nanchor_slack = 120\ntau_s = 9\ngrid_f_bar = 190\n");
  auto back = parse_settings(write_settings(s));
  CHECK(back.characterization.d_th == 3.5);
  CHECK(back.characterization.anchor_slack == 120);
  CHECK(back.analytic.tau_s == 9);
  CHECK(back.grid_f_bar == 190);
  CHECK(write_settings(back) == write_settings(s));
}

TEST_CASE("compare rows") {
  Solution s;
  s.T = 610;
  s.n_ff = 3;
  s.n_ff_trimmed = 2;
  s.avg_polygons = 1.5;
  s.status = SolveStatus::Optimal;
  s.runtime_seconds = 0.25;
  ViolationCounts v{1, 1, 0, 0};
  auto row = make_compare_row("cc1", s, 630, 650, v, 2);
  CHECK(row.t_s == doctest::Approx(100.0 * 20 / 630));
  CHECK(row.t_s_onset == doctest::Approx(100.0 * 40 / 650));
  CHECK(row.status == "optimal");

  const std::string json = render_compare({row, row}, ReportFormat::Json);
  auto parsed = nlohmann::json::parse(json);
  CHECK(parsed.dump().find("\"t'_s\"") != std::string::npos);
  auto back = parse_compare_json(json);
  REQUIRE(back.size() == 2);
  CHECK(back[0].circuit == "cc1");
  CHECK(back[0].T_ilp == 610);
  CHECK(back[0].t_s == doctest::Approx(row.t_s));
  CHECK(back[0].violations == v);
  CHECK(back[0].n_t == 2);
  CHECK(render_compare(back, ReportFormat::Json) == json);

  const std::string text = render_compare({row}, ReportFormat::Text);
  CHECK(text.find("cc1") != std::string::npos);
}

TEST_CASE("solution and classic reports") {
  auto g = testing::cc1_graph();
  Solution s;
  s.T = 610;
  s.status = SolveStatus::Optimal;
  s.points = {{0, 30, 30, 100}, {1, 10, 150, 120}, {0, 190, 170, 100}};
  const std::string text = render_solution(s, g, nullptr, ReportFormat::Text);
  CHECK(text.find("610") != std::string::npos);
  CHECK(text.find("F2") != std::string::npos);
  auto j = nlohmann::json::parse(render_solution(s, g, nullptr, ReportFormat::Json));
  CHECK(j.contains("T"));

  ClassicFFParams p{30, 0, 100, 1.1};
  const std::string c = render_classic(p, {630, false}, ReportFormat::Text);
  CHECK(c.find("630") != std::string::npos);
  CHECK(is_json(render_classic(p, {630, false}, ReportFormat::Json)));
  CHECK(is_json(render_violations({1, 1, 0, 0}, 610, ReportFormat::Json)));
  CHECK(is_json(render_sweep({{8, 8, 35.3, 640, 0.1, "optimal"}}, ReportFormat::Json)));
}
