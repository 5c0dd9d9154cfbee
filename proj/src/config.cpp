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

#include "config.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "text_util.hpp"

namespace cqsta {

namespace {

std::string trim_ws(std::string_view v) {
  const auto b = v.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = v.find_last_not_of(" \t");
  return std::string(v.substr(b, e - b + 1));
}

double number(const std::string& v, int line, const std::string& key) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(x)) {
    throw ParseError(line, "key '" + key + "' needs a number, got '" + v + "'");
  }
  return x;
}

}  // namespace

RunSettings parse_settings(std::string_view text) {
  RunSettings s;
  CharConfig& c = s.characterization;
  AnalyticParams& a = s.analytic;
  const std::map<std::string, double*> numeric = {
      {"anchor_slack", &c.anchor_slack},   {"k_th", &c.k_th},
      {"d_th", &c.d_th},                   {"search_resolution", &c.search_resolution},
      {"stable_step", &c.stable_step},     {"stable_epsilon", &c.stable_epsilon},
      {"d0", &a.d0},                       {"amp_s", &a.amp_s},
      {"amp_h", &a.amp_h},                 {"tau_s", &a.tau_s},
      {"tau_h", &a.tau_h},                 {"f_bar", &a.f_bar},
      {"domain_max", &a.domain_max},       {"grid_f_bar", &s.grid_f_bar},
  };
  const std::map<std::string, std::optional<double>*> classic = {
      {"t_su", &s.t_su}, {"t_h", &s.t_h}, {"d_cq", &s.d_cq}};

  int line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    const std::string line = trim_ws(strip_comment(raw));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key = trim_ws(std::string_view(line).substr(0, eq));
    const std::string value = trim_ws(std::string_view(line).substr(eq + 1));
    if (auto it = numeric.find(key); it != numeric.end()) {
      *it->second = number(value, line_no, key);
    } else if (auto jt = classic.find(key); jt != classic.end()) {
      *jt->second = number(value, line_no, key);
    } else if (key == "max_split_depth") {
      const double d = number(value, line_no, key);
      if (d != std::floor(d) || d < 0 || d > 64) throw ParseError(line_no, "max_split_depth must be an integer in [0, 64]");
      c.max_split_depth = static_cast<int>(d);
    } else if (key == "grid_file") {
      if (value.empty()) throw ParseError(line_no, "grid_file needs a path");
      s.grid_file = value;
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  try {
    c.validate();
    a.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
  return s;
}

std::string write_settings(const RunSettings& s) {
  std::ostringstream out;
  out.precision(17);
  const CharConfig& c = s.characterization;
  const AnalyticParams& a = s.analytic;
  out << "anchor_slack = " << c.anchor_slack << "\nk_th = " << c.k_th << "\nd_th = " << c.d_th
      << "\nsearch_resolution = " << c.search_resolution << "\nstable_step = " << c.stable_step
      << "\nstable_epsilon = " << c.stable_epsilon << "\nmax_split_depth = " << c.max_split_depth
      << "\nd0 = " << a.d0 << "\namp_s = " << a.amp_s << "\namp_h = " << a.amp_h
      << "\ntau_s = " << a.tau_s << "\ntau_h = " << a.tau_h << "\nf_bar = " << a.f_bar
      << "\ndomain_max = " << a.domain_max << "\ngrid_f_bar = " << s.grid_f_bar << "\n";
  if (s.grid_file) out << "grid_file = " << *s.grid_file << "\n";
  if (s.t_su) out << "t_su = " << *s.t_su << "\n";
  if (s.t_h) out << "t_h = " << *s.t_h << "\n";
  if (s.d_cq) out << "d_cq = " << *s.d_cq << "\n";
  return out.str();
}

std::optional<ClassicFFParams> explicit_classic(const RunSettings& s) {
  if (!s.t_su || !s.t_h || !s.d_cq) return std::nullopt;
  return ClassicFFParams{*s.t_su, *s.t_h, *s.d_cq, 0.0};
}

}  // namespace cqsta
