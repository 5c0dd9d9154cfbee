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

#include "report.hpp"

#include <cstdio>

#include "json.hpp"

namespace cqsta {

namespace {

using nlohmann::ordered_json;

std::string line(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

double percent(double base, double value) { return base > 0.0 ? (base - value) / base * 100.0 : 0.0; }

}  // namespace

std::string render_validation(const ValidationReport& r, double d_th, ReportFormat f) {
  if (f == ReportFormat::Json) {
    return dump({{"grid_resolution", r.grid_resolution},
                 {"max_abs_error", r.max_abs_error},
                 {"d_th", d_th},
                 {"coverage_fraction", r.coverage_fraction},
                 {"valid_points", r.valid_points},
                 {"covered_points", r.covered_points},
                 {"worst_point", {r.worst_point.setup, r.worst_point.hold}}});
  }
  std::string out;
  out += line("grid resolution   %.4g ps\n", r.grid_resolution);
  out += line("max abs error     %.4f ps (d_th %.4g)\n", r.max_abs_error, d_th);
  out += line("worst point       s=%.3f h=%.3f\n", r.worst_point.setup, r.worst_point.hold);
  out += line("coverage          %.4f (%lld of %lld valid points)\n", r.coverage_fraction,
              static_cast<long long>(r.covered_points), static_cast<long long>(r.valid_points));
  return out;
}

std::string render_classic(const ClassicFFParams& p, const ClassicPeriod& t, ReportFormat f) {
  if (f == ReportFormat::Json) {
    return dump({{"t_su", p.t_su},
                 {"t_h", p.t_h},
                 {"d_cq", p.d_cq},
                 {"factor", p.degradation_factor},
                 {"T", t.T},
                 {"no_stages", t.no_stages}});
  }
  std::string out = line("t_su  %.4f ps\nt_h   %.4f ps\nd_cq  %.4f ps\n", p.t_su, p.t_h, p.d_cq);
  out += t.no_stages ? "T     0 (no stages)\n" : line("T     %.4f ps\n", t.T);
  return out;
}

std::string render_violations(const ViolationCounts& v, double target_T, ReportFormat f) {
  if (f == ReportFormat::Json) {
    return dump({{"target_T", target_T},
                 {"v_p^s", v.setup_paths},
                 {"v_f^s", v.setup_ffs},
                 {"v_p^h", v.hold_paths},
                 {"v_f^h", v.hold_ffs}});
  }
  return line("target T %.4f ps\nsetup violations  %zu paths, %zu FFs\nhold violations   %zu paths, %zu FFs\n",
              target_T, v.setup_paths, v.setup_ffs, v.hold_paths, v.hold_ffs);
}

std::string render_solution(const Solution& s, const StageGraph& g, const ValidationVerdict* verdict,
                            ReportFormat f) {
  if (f == ReportFormat::Json) {
    ordered_json ffs = ordered_json::array();
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const WorkingPoint& w = s.points[i];
      ffs.push_back({{"name", g.flipflops[i]}, {"polygon", w.polygon}, {"s", w.s}, {"h", w.h}, {"d_cq", w.d_cq}});
    }
    ordered_json j = {{"T", s.T},
                      {"status", to_string(s.status)},
                      {"gap", s.gap},
                      {"n_s", s.n_ff},
                      {"n_t", s.n_ff_trimmed},
                      {"g_t", s.avg_polygons},
                      {"removed_stages", s.removed_stages},
                      {"t_floor", s.t_floor},
                      {"trim_fallback", s.trim_fallback},
                      {"nodes", s.nodes},
                      {"lp_iterations", s.lp_iterations},
                      {"runtime", s.runtime_seconds},
                      {"flipflops", ffs}};
    if (verdict) j["validation"] = {{"ok", verdict->ok()}, {"failures", verdict->failures}};
    return dump(j);
  }
  std::size_t width = 4;
  for (const auto& n : g.flipflops) width = std::max(width, n.size());
  std::string out = line("T = %.6f ps  status %s  gap %.3g\n", s.T, to_string(s.status), s.gap);
  out += line("n_s %zu  n_t %zu  g_t %.2f  removed stages %zu  t_floor %.4f%s\n", s.n_ff, s.n_ff_trimmed,
              s.avg_polygons, s.removed_stages, s.t_floor, s.trim_fallback ? "  (trim fallback)" : "");
  out += line("nodes %lld  lp iterations %lld  runtime %.3f s\n\n", static_cast<long long>(s.nodes),
              static_cast<long long>(s.lp_iterations), s.runtime_seconds);
  out += line("%-*s %7s %10s %10s %10s\n", static_cast<int>(width), "ff", "polygon", "s", "h", "d_cq");
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const WorkingPoint& w = s.points[i];
    out += line("%-*s %7d %10.4f %10.4f %10.4f\n", static_cast<int>(width), g.flipflops[i].c_str(), w.polygon,
                w.s, w.h, w.d_cq);
  }
  if (verdict) {
    out += verdict->ok() ? "\nvalidation: pass\n" : "\nvalidation: FAIL\n";
    for (const auto& msg : verdict->failures) out += "  " + msg + "\n";
  }
  return out;
}

CompareRow make_compare_row(std::string circuit, const Solution& s, double T_classic, double T_onset,
                            const ViolationCounts& v, std::size_t n_polygons) {
  CompareRow r;
  r.circuit = std::move(circuit);
  r.n_s = s.n_ff;
  r.n_t = s.n_ff_trimmed;
  r.n_p = n_polygons;
  r.g_t = s.avg_polygons;
  r.T_classic = T_classic;
  r.T_onset = T_onset;
  r.T_ilp = s.T;
  r.t_s = percent(T_classic, s.T);
  r.t_s_onset = percent(T_onset, s.T);
  r.violations = v;
  r.runtime = s.runtime_seconds;
  r.status = to_string(s.status);
  return r;
}

std::string render_compare(const std::vector<CompareRow>& rows, ReportFormat f) {
  if (f == ReportFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const CompareRow& r : rows) {
      arr.push_back({{"circuit", r.circuit},   {"n_s", r.n_s},
                     {"n_t", r.n_t},           {"n_p", r.n_p},
                     {"g_t", r.g_t},           {"T_classic", r.T_classic},
                     {"T_onset", r.T_onset},   {"T_ilp", r.T_ilp},
                     {"t_s", r.t_s},           {"t'_s", r.t_s_onset},
                     {"v_p^s", r.violations.setup_paths}, {"v_f^s", r.violations.setup_ffs},
                     {"v_p^h", r.violations.hold_paths},  {"v_f^h", r.violations.hold_ffs},
                     {"runtime", r.runtime},   {"status", r.status}});
    }
    return dump(arr);
  }
  std::string out = line("%-12s %5s %5s %6s %11s %11s %11s %7s %7s %5s %5s %5s %5s %8s\n", "circuit", "n_s",
                         "n_t", "g_t", "T_classic", "T_onset", "T_ilp", "t_s%", "t'_s%", "v_p^s", "v_f^s",
                         "v_p^h", "v_f^h", "runtime");
  for (const CompareRow& r : rows) {
    out += line("%-12s %5zu %5zu %6.2f %11.4f %11.4f %11.4f %7.3f %7.3f %5zu %5zu %5zu %5zu %8.3f\n",
                r.circuit.c_str(), r.n_s, r.n_t, r.g_t, r.T_classic, r.T_onset, r.T_ilp, r.t_s, r.t_s_onset,
                r.violations.setup_paths, r.violations.setup_ffs, r.violations.hold_paths,
                r.violations.hold_ffs, r.runtime);
  }
  return out;
}

std::vector<CompareRow> parse_compare_json(const std::string& text) {
  const auto arr = nlohmann::json::parse(text);
  std::vector<CompareRow> rows;
  for (const auto& j : arr) {
    CompareRow r;
    r.circuit = j.at("circuit").get<std::string>();
    r.n_s = j.at("n_s").get<std::size_t>();
    r.n_t = j.at("n_t").get<std::size_t>();
    r.n_p = j.at("n_p").get<std::size_t>();
    r.g_t = j.at("g_t").get<double>();
    r.T_classic = j.at("T_classic").get<double>();
    r.T_onset = j.at("T_onset").get<double>();
    r.T_ilp = j.at("T_ilp").get<double>();
    r.t_s = j.at("t_s").get<double>();
    r.t_s_onset = j.at("t'_s").get<double>();
    r.violations = {j.at("v_p^s").get<std::size_t>(), j.at("v_f^s").get<std::size_t>(),
                    j.at("v_p^h").get<std::size_t>(), j.at("v_f^h").get<std::size_t>()};
    r.runtime = j.at("runtime").get<double>();
    r.status = j.at("status").get<std::string>();
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string render_sweep(const std::vector<SweepRow>& rows, ReportFormat f) {
  if (f == ReportFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const SweepRow& r : rows) {
      arr.push_back({{"target", r.target},
                     {"polygons", r.polygons},
                     {"d_th", r.d_th},
                     {"T", r.T},
                     {"runtime", r.runtime},
                     {"status", r.status}});
    }
    return dump(arr);
  }
  std::string out = line("%7s %9s %8s %12s %9s %s\n", "target", "polygons", "d_th", "T", "runtime", "status");
  for (const SweepRow& r : rows) {
    out += line("%7zu %9zu %8.4f %12.4f %9.3f %s\n", r.target, r.polygons, r.d_th, r.T, r.runtime,
                r.status.c_str());
  }
  return out;
}

}  // namespace cqsta
