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

#include <algorithm>
#include <cmath>
#include <set>

#include "characterizer.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace cqsta {

using nlohmann::json;

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw ParseError(0, "model " + path + ": " + msg);
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, "missing key '" + key + "'");
  if (!it->is_number()) schema_error(path + "/" + key, "expected a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) schema_error(path + "/" + key, "non-finite number");
  return v;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) schema_error(path, "unknown key '" + it.key() + "'");
  }
}

}  // namespace

std::string serialize_model(const PiecewiseDelayModel& model) {
  json polys = json::array();
  for (const auto& p : model.polygons) {
    json j;
    j["id"] = p.id;
    j["kind"] = p.kind == PolygonKind::Triangle ? "triangle" : "rectangle";
    j["s_l"] = p.s_l;
    j["s_u"] = p.s_u;
    j["h_l"] = p.h_l;
    j["h_u"] = p.h_u;
    j["c"] = p.plane.c;
    j["c_s"] = p.plane.c_s;
    j["c_h"] = p.plane.c_h;
    if (p.hypotenuse) {
      j["c_t"] = p.hypotenuse->c_t;
      j["c_ts"] = p.hypotenuse->c_ts;
    }
    polys.push_back(std::move(j));
  }
  json root;
  root["stable_delay"] = model.f_lower;
  root["metastable_threshold"] = model.f_upper;
  root["d_th"] = model.d_th;
  root["k_th"] = model.k_th;
  root["query_count"] = model.query_count;
  root["polygons"] = std::move(polys);
  // One polygon per line keeps diffs and parse diagnostics readable.
  std::string out = "{\n";
  for (const char* key : {"stable_delay", "metastable_threshold", "d_th", "k_th", "query_count"}) {
    out += "  \"" + std::string(key) + "\": " + root[key].dump() + ",\n";
  }
  out += "  \"polygons\": [\n";
  for (std::size_t i = 0; i < root["polygons"].size(); ++i) {
    out += "    " + root["polygons"][i].dump();
    out += i + 1 < root["polygons"].size() ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

PiecewiseDelayModel parse_model(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
  if (!root.is_object()) schema_error("/", "top level must be an object");
  reject_unknown(root,
                 {"stable_delay", "metastable_threshold", "d_th", "k_th", "query_count", "polygons"},
                 "/");
  PiecewiseDelayModel m;
  m.f_lower = number_at(root, "stable_delay", "");
  m.f_upper = number_at(root, "metastable_threshold", "");
  m.d_th = number_at(root, "d_th", "");
  m.k_th = number_at(root, "k_th", "");
  if (root.contains("query_count")) {
    if (!root["query_count"].is_number_integer() || root["query_count"].get<std::int64_t>() < 0) {
      schema_error("/query_count", "expected a non-negative integer");
    }
    m.query_count = root["query_count"].get<std::int64_t>();
  }
  if (!(m.f_lower < m.f_upper)) schema_error("/", "stable_delay must be below metastable_threshold");

  auto it = root.find("polygons");
  if (it == root.end() || !it->is_array()) schema_error("/polygons", "missing polygon array");
  if (it->empty()) schema_error("/polygons", "model must contain at least one polygon");

  std::set<int> ids;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& j = (*it)[i];
    const std::string path = "/polygons/" + std::to_string(i);
    if (!j.is_object()) schema_error(path, "polygon must be an object");
    auto kind_it = j.find("kind");
    if (kind_it == j.end() || !kind_it->is_string()) schema_error(path, "missing string 'kind'");
    Polygon p;
    const std::string kind = kind_it->get<std::string>();
    if (kind == "triangle") {
      p.kind = PolygonKind::Triangle;
      reject_unknown(j, {"id", "kind", "s_l", "s_u", "h_l", "h_u", "c", "c_s", "c_h", "c_t", "c_ts"}, path);
    } else if (kind == "rectangle") {
      p.kind = PolygonKind::Rectangle;
      reject_unknown(j, {"id", "kind", "s_l", "s_u", "h_l", "h_u", "c", "c_s", "c_h"}, path);
    } else {
      schema_error(path + "/kind", "unknown polygon kind '" + kind + "'");
    }
    if (j.contains("id")) {
      if (!j["id"].is_number_integer()) schema_error(path + "/id", "expected an integer");
      p.id = j["id"].get<int>();
    } else {
      p.id = static_cast<int>(i);
    }
    if (!ids.insert(p.id).second) schema_error(path + "/id", "duplicate polygon id");
    p.s_l = number_at(j, "s_l", path);
    p.s_u = number_at(j, "s_u", path);
    p.h_l = number_at(j, "h_l", path);
    p.h_u = number_at(j, "h_u", path);
    p.plane = {number_at(j, "c", path), number_at(j, "c_s", path), number_at(j, "c_h", path)};
    if (p.kind == PolygonKind::Triangle) {
      p.hypotenuse = Hypotenuse{number_at(j, "c_t", path), number_at(j, "c_ts", path)};
      if (!(p.hypotenuse->c_ts < 0)) schema_error(path + "/c_ts", "hypotenuse slope must be negative");
    }
    if (!(p.s_l >= 0 && p.s_l < p.s_u)) schema_error(path, "need 0 <= s_l < s_u");
    if (!(p.h_l >= 0 && p.h_l < p.h_u)) schema_error(path, "need 0 <= h_l < h_u");
    m.polygons.push_back(p);
  }
  m.update_extremes();
  return m;
}

}  // namespace cqsta
