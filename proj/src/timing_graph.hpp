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

// Flip-flop level timing graphs.
//
// Stage file:
//   ff <name>
//   stage <src> <dst> dmax=<ps> dmin=<ps>
// Gate netlist:
//   ff <name>
//   gate <name> dmin=<ps> dmax=<ps>
//   net <src> <dst>
// `#` starts a comment. Wires carry no delay.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cqsta {

struct Stage {
  std::size_t src = 0;  // index into StageGraph::flipflops
  std::size_t dst = 0;
  double d_max = 0.0;
  double d_min = 0.0;

  friend bool operator==(const Stage&, const Stage&) = default;
};

struct StageGraph {
  std::vector<std::string> flipflops;
  std::vector<Stage> stages;

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws std::invalid_argument on a broken invariant.
  void validate() const;

  friend bool operator==(const StageGraph&, const StageGraph&) = default;
};

StageGraph parse_stage_graph(std::string_view text);
std::string write_stage_graph(const StageGraph& graph);

struct Gate {
  std::string name;
  double d_min = 0.0;
  double d_max = 0.0;
};

struct Netlist {
  std::vector<std::string> flipflops;
  std::vector<Gate> gates;
  std::vector<std::pair<std::string, std::string>> nets;
};

Netlist parse_gate_netlist(std::string_view text);

// Longest and shortest all-gate path delay for every connected FF pair.
StageGraph extract_stages(const Netlist& netlist);

struct RandomGraphSpec {
  std::size_t n_ff = 10;
  std::size_t n_stage = 20;
  double dmax_lo = 100.0, dmax_hi = 500.0;
  double dmin_frac_lo = 0.2, dmin_frac_hi = 0.6;
  std::uint64_t seed = 1;
};

// Deterministic for a fixed spec. Self-loops count among the n_ff^2 pairs.
StageGraph generate_random_stage_graph(const RandomGraphSpec& spec);

}  // namespace cqsta
