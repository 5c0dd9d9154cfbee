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

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cqsta {

// All times are picoseconds.

// Distance of the latest (setup) and earliest (hold) data switching from the
// active clock edge.
struct SlackPoint {
  double setup = 0.0;
  double hold = 0.0;

  friend bool operator==(const SlackPoint&, const SlackPoint&) = default;
};

// Result of one clock-to-q measurement. Either a finite delay or metastable.
class OracleResponse {
 public:
  static OracleResponse valid(double clock_to_q) { return OracleResponse(clock_to_q); }
  static OracleResponse metastable() { return OracleResponse(); }

  bool is_valid() const { return delay_.has_value(); }
  bool is_metastable() const { return !delay_.has_value(); }
  // Precondition: is_valid().
  double delay() const { return *delay_; }

  friend bool operator==(const OracleResponse&, const OracleResponse&) = default;

 private:
  OracleResponse() = default;
  explicit OracleResponse(double d) : delay_(d) {}
  std::optional<double> delay_;
};

struct DelaySample {
  SlackPoint point;
  OracleResponse response;
};

// Thrown for queries outside the oracle's modeled slack box.
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SlackBox {
  double s_lo = 0.0, s_hi = 0.0;
  double h_lo = 0.0, h_hi = 0.0;

  bool contains(SlackPoint p, double tol = 1e-9) const {
    return p.setup >= s_lo - tol && p.setup <= s_hi + tol && p.hold >= h_lo - tol &&
           p.hold <= h_hi + tol;
  }
};

// Ground-truth clock-to-q source for characterization. Implementations are
// immutable and must be pure: the same point always yields the same response.
class DelayOracle {
 public:
  virtual ~DelayOracle() = default;
  virtual OracleResponse query(SlackPoint p) const = 0;
  // Delay beyond which the flip-flop is considered metastable.
  virtual double metastable_threshold() const = 0;
  virtual SlackBox domain() const = 0;
};

// d(s,h) = d0 + amp_s * exp(-s/tau_s) + amp_h * exp(-h/tau_h)
struct AnalyticParams {
  double d0 = 100.0;
  double amp_s = 1000.0;
  double amp_h = 1000.0;
  double tau_s = 8.0;
  double tau_h = 8.0;
  double f_bar = 200.0;
  double domain_max = 300.0;

  // Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

double analytic_delay(SlackPoint p, const AnalyticParams& params);

class AnalyticOracle final : public DelayOracle {
 public:
  explicit AnalyticOracle(AnalyticParams params);

  OracleResponse query(SlackPoint p) const override;
  double metastable_threshold() const override { return params_.f_bar; }
  SlackBox domain() const override;
  const AnalyticParams& params() const { return params_; }

 private:
  AnalyticParams params_;
};

// Replays a dense sweep. Queries bilinearly interpolate the enclosing cell and
// report metastable when any enclosing node is metastable or the interpolated
// delay exceeds f_bar.
class GridOracle final : public DelayOracle {
 public:
  GridOracle(const std::vector<DelaySample>& samples, double f_bar);

  OracleResponse query(SlackPoint p) const override;
  double metastable_threshold() const override { return f_bar_; }
  SlackBox domain() const override;

  const std::vector<double>& setup_axis() const { return s_axis_; }
  const std::vector<double>& hold_axis() const { return h_axis_; }

 private:
  std::vector<double> s_axis_;
  std::vector<double> h_axis_;
  std::vector<std::optional<double>> delays_;  // row-major over (s index, h index)
  double f_bar_;
};

// Dense-sweep dump: one `s h delay|META` line per sample.
std::vector<DelaySample> parse_sweep_dump(std::string_view text);
std::string write_sweep_dump(const std::vector<DelaySample>& samples);
std::vector<DelaySample> sweep(const DelayOracle& oracle, const SlackBox& box, double step);

// Memoizing wrapper used during characterization. Points are keyed on their
// coordinates rounded to 1e-6 ps; query_count() is the number of distinct
// points forwarded to the wrapped oracle. Not thread-safe.
class CachedOracle final : public DelayOracle {
 public:
  explicit CachedOracle(const DelayOracle& inner);
  ~CachedOracle() override;

  OracleResponse query(SlackPoint p) const override;
  double metastable_threshold() const override { return inner_.metastable_threshold(); }
  SlackBox domain() const override { return inner_.domain(); }
  std::int64_t query_count() const;

 private:
  struct Cache;
  const DelayOracle& inner_;
  std::unique_ptr<Cache> cache_;
};

}  // namespace cqsta
