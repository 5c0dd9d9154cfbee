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

#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "text_util.hpp"

namespace cqsta {

void AnalyticParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid analytic parameter: ") + what);
  };
  require(std::isfinite(d0) && d0 > 0, "d0 must be > 0");
  require(std::isfinite(amp_s) && amp_s >= 0, "amp_s must be >= 0");
  require(std::isfinite(amp_h) && amp_h >= 0, "amp_h must be >= 0");
  require(std::isfinite(tau_s) && tau_s > 0, "tau_s must be > 0");
  require(std::isfinite(tau_h) && tau_h > 0, "tau_h must be > 0");
  require(std::isfinite(f_bar) && f_bar > d0, "f_bar must exceed d0");
  require(std::isfinite(domain_max) && domain_max > 0, "domain_max must be > 0");
}

double analytic_delay(SlackPoint p, const AnalyticParams& params) {
  return params.d0 + params.amp_s * std::exp(-p.setup / params.tau_s) +
         params.amp_h * std::exp(-p.hold / params.tau_h);
}

AnalyticOracle::AnalyticOracle(AnalyticParams params) : params_(params) { params_.validate(); }

SlackBox AnalyticOracle::domain() const { return {0.0, params_.domain_max, 0.0, params_.domain_max}; }

OracleResponse AnalyticOracle::query(SlackPoint p) const {
  if (!domain().contains(p, 0.0) || std::isnan(p.setup) || std::isnan(p.hold)) {
    std::ostringstream os;
    os << "slack point (" << p.setup << ", " << p.hold << ") outside [0, " << params_.domain_max
       << "]^2";
    throw DomainError(os.str());
  }
  const double d = analytic_delay(p, params_);
  if (d > params_.f_bar) return OracleResponse::metastable();
  return OracleResponse::valid(d);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Index i such that axis[i] <= x <= axis[i+1]; clamps to the last cell.
std::size_t cell_index(const std::vector<double>& axis, double x) {
  if (axis.size() == 1) return 0;
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t i = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
  return std::min(i, axis.size() - 2);
}

}  // namespace

GridOracle::GridOracle(const std::vector<DelaySample>& samples, double f_bar) : f_bar_(f_bar) {
  if (samples.empty()) throw OracleError("grid oracle needs at least one sample");
  if (!(f_bar > 0) || !std::isfinite(f_bar)) throw OracleError("grid oracle f_bar must be > 0");
  std::vector<double> ss, hs;
  for (const auto& smp : samples) {
    ss.push_back(smp.point.setup);
    hs.push_back(smp.point.hold);
  }
  s_axis_ = unique_sorted(std::move(ss));
  h_axis_ = unique_sorted(std::move(hs));
  const std::size_t ns = s_axis_.size(), nh = h_axis_.size();
  if (ns * nh != samples.size()) {
    std::ostringstream os;
    os << "incomplete grid: " << samples.size() << " samples for a " << ns << " x " << nh
       << " axis product";
    throw OracleError(os.str());
  }
  delays_.assign(ns * nh, std::nullopt);
  std::vector<char> seen(ns * nh, 0);
  for (const auto& smp : samples) {
    auto si = static_cast<std::size_t>(
        std::lower_bound(s_axis_.begin(), s_axis_.end(), smp.point.setup) - s_axis_.begin());
    auto hi = static_cast<std::size_t>(
        std::lower_bound(h_axis_.begin(), h_axis_.end(), smp.point.hold) - h_axis_.begin());
    const std::size_t k = si * nh + hi;
    if (seen[k]) {
      std::ostringstream os;
      os << "duplicate grid sample at (" << smp.point.setup << ", " << smp.point.hold << ")";
      throw OracleError(os.str());
    }
    seen[k] = 1;
    if (smp.response.is_valid()) delays_[k] = smp.response.delay();
  }
}

SlackBox GridOracle::domain() const {
  return {s_axis_.front(), s_axis_.back(), h_axis_.front(), h_axis_.back()};
}

OracleResponse GridOracle::query(SlackPoint p) const {
  if (!domain().contains(p, 0.0) || std::isnan(p.setup) || std::isnan(p.hold)) {
    std::ostringstream os;
    os << "slack point (" << p.setup << ", " << p.hold << ") outside the recorded grid";
    throw DomainError(os.str());
  }
  const std::size_t nh = h_axis_.size();
  const std::size_t si = cell_index(s_axis_, p.setup);
  const std::size_t hi = cell_index(h_axis_, p.hold);
  const std::size_t si1 = std::min(si + 1, s_axis_.size() - 1);
  const std::size_t hi1 = std::min(hi + 1, nh - 1);

  const double ts = si1 == si ? 0.0 : (p.setup - s_axis_[si]) / (s_axis_[si1] - s_axis_[si]);
  const double th = hi1 == hi ? 0.0 : (p.hold - h_axis_[hi]) / (h_axis_[hi1] - h_axis_[hi]);
  const struct {
    std::size_t s, h;
    double w;
  } nodes[4] = {{si, hi, (1 - ts) * (1 - th)},
                {si1, hi, ts * (1 - th)},
                {si, hi1, (1 - ts) * th},
                {si1, hi1, ts * th}};
  double d = 0.0;
  for (const auto& n : nodes) {
    if (n.w <= 0.0) continue;
    const auto& v = delays_[n.s * nh + n.h];
    if (!v) return OracleResponse::metastable();
    d += n.w * *v;
  }
  if (d > f_bar_) return OracleResponse::metastable();
  return OracleResponse::valid(d);
}

std::vector<DelaySample> parse_sweep_dump(std::string_view text) {
  std::vector<DelaySample> out;
  int line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    auto toks = split_ws(strip_comment(line));
    if (toks.empty()) continue;
    if (toks.size() != 3) throw ParseError(line_no, "expected `s h delay|META`");
    SlackPoint p{parse_number(toks[0], line_no), parse_number(toks[1], line_no)};
    if (toks[2] == "META") {
      out.push_back({p, OracleResponse::metastable()});
    } else {
      out.push_back({p, OracleResponse::valid(parse_number(toks[2], line_no))});
    }
  }
  return out;
}

std::string write_sweep_dump(const std::vector<DelaySample>& samples) {
  std::string out;
  for (const auto& smp : samples) {
    out += format_number(smp.point.setup);
    out += ' ';
    out += format_number(smp.point.hold);
    out += ' ';
    out += smp.response.is_valid() ? format_number(smp.response.delay()) : std::string("META");
    out += '\n';
  }
  return out;
}

std::vector<DelaySample> sweep(const DelayOracle& oracle, const SlackBox& box, double step) {
  if (!(step > 0)) throw std::invalid_argument("sweep step must be > 0");
  std::vector<DelaySample> out;
  const auto ns = static_cast<long>(std::floor((box.s_hi - box.s_lo) / step + 1e-9));
  const auto nh = static_cast<long>(std::floor((box.h_hi - box.h_lo) / step + 1e-9));
  for (long i = 0; i <= ns; ++i) {
    for (long j = 0; j <= nh; ++j) {
      SlackPoint p{box.s_lo + i * step, box.h_lo + j * step};
      out.push_back({p, oracle.query(p)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct CachedOracle::Cache {
  struct KeyHash {
    std::size_t operator()(const std::pair<long long, long long>& k) const {
      return std::hash<long long>()(k.first * 1000003LL) ^ std::hash<long long>()(k.second);
    }
  };
  std::unordered_map<std::pair<long long, long long>, OracleResponse, KeyHash> map;
};

CachedOracle::CachedOracle(const DelayOracle& inner)
    : inner_(inner), cache_(std::make_unique<Cache>()) {}

CachedOracle::~CachedOracle() = default;

OracleResponse CachedOracle::query(SlackPoint p) const {
  const std::pair<long long, long long> key{std::llround(p.setup * 1e6),
                                            std::llround(p.hold * 1e6)};
  if (auto it = cache_->map.find(key); it != cache_->map.end()) return it->second;
  OracleResponse r = inner_.query(p);
  cache_->map.emplace(key, r);
  return r;
}

std::int64_t CachedOracle::query_count() const {
  return static_cast<std::int64_t>(cache_->map.size());
}

}  // namespace cqsta
