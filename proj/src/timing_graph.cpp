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

#include "timing_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <unordered_map>

#include "text_util.hpp"

namespace cqsta {

namespace {

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

// Reads `dmin=<ps>` and `dmax=<ps>` from the tail of a line, in any order.
std::pair<double, double> parse_delay_pair(std::span<const std::string_view> toks, int line_no) {
  std::optional<double> dmin, dmax;
  for (std::string_view tok : toks) {
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value, got " + quoted(tok));
    const std::string_view key = tok.substr(0, eq);
    const double v = parse_number(tok.substr(eq + 1), line_no);
    std::optional<double>* slot = key == "dmin" ? &dmin : key == "dmax" ? &dmax : nullptr;
    if (!slot) throw ParseError(line_no, "unknown key " + quoted(key));
    if (*slot) throw ParseError(line_no, "repeated key " + quoted(key));
    *slot = v;
  }
  if (!dmin || !dmax) throw ParseError(line_no, "both dmin= and dmax= are required");
  if (*dmin < 0) throw ParseError(line_no, "dmin must be >= 0");
  if (*dmin > *dmax) throw ParseError(line_no, "dmin exceeds dmax");
  return {*dmin, *dmax};
}

void check_name(std::string_view name, int line_no) {
  if (!is_identifier(name)) throw ParseError(line_no, "invalid name " + quoted(name));
}

}  // namespace

std::optional<std::size_t> StageGraph::find(std::string_view name) const {
  auto it = std::find(flipflops.begin(), flipflops.end(), name);
  if (it == flipflops.end()) return std::nullopt;
  return static_cast<std::size_t>(it - flipflops.begin());
}

void StageGraph::validate() const {
  std::set<std::string_view> names;
  for (const auto& n : flipflops) {
    if (!is_identifier(n)) throw std::invalid_argument("invalid flip-flop name " + quoted(n));
    if (!names.insert(n).second) throw std::invalid_argument("duplicate flip-flop " + quoted(n));
  }
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& st : stages) {
    if (st.src >= flipflops.size() || st.dst >= flipflops.size()) {
      throw std::invalid_argument("stage references a missing flip-flop");
    }
    if (!(std::isfinite(st.d_min) && std::isfinite(st.d_max) && 0 <= st.d_min && st.d_min <= st.d_max)) {
      throw std::invalid_argument("stage " + flipflops[st.src] + " -> " + flipflops[st.dst] +
                                  " needs 0 <= dmin <= dmax");
    }
    if (!pairs.insert({st.src, st.dst}).second) {
      throw std::invalid_argument("duplicate stage " + flipflops[st.src] + " -> " + flipflops[st.dst]);
    }
  }
}

StageGraph parse_stage_graph(std::string_view text) {
  StageGraph g;
  std::unordered_map<std::string, std::size_t> index;
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  int line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    const auto toks = split_ws(strip_comment(raw));
    if (toks.empty()) continue;
    if (toks[0] == "ff") {
      if (toks.size() != 2) throw ParseError(line_no, "expected `ff <name>`");
      check_name(toks[1], line_no);
      const std::string name(toks[1]);
      if (index.count(name)) throw ParseError(line_no, "duplicate flip-flop " + quoted(name));
      index.emplace(name, g.flipflops.size());
      g.flipflops.push_back(name);
    } else if (toks[0] == "stage") {
      if (toks.size() != 5) throw ParseError(line_no, "expected `stage <src> <dst> dmax=<ps> dmin=<ps>`");
      std::size_t ends[2];
      for (int k = 0; k < 2; ++k) {
        auto it = index.find(std::string(toks[1 + k]));
        if (it == index.end()) throw ParseError(line_no, "unknown flip-flop " + quoted(toks[1 + k]));
        ends[k] = it->second;
      }
      const auto [dmin, dmax] = parse_delay_pair(std::span(toks).subspan(3), line_no);
      if (!pairs.insert({ends[0], ends[1]}).second) {
        throw ParseError(line_no, "duplicate stage " + quoted(toks[1]) + " -> " + quoted(toks[2]));
      }
      g.stages.push_back({ends[0], ends[1], dmax, dmin});
    } else {
      throw ParseError(line_no, "unknown directive " + quoted(toks[0]));
    }
  }
  return g;
}

std::string write_stage_graph(const StageGraph& graph) {
  std::string out;
  for (const auto& n : graph.flipflops) out += "ff " + n + "\n";
  for (const auto& st : graph.stages) {
    out += "stage " + graph.flipflops[st.src] + " " + graph.flipflops[st.dst] +
           " dmax=" + format_number(st.d_max) + " dmin=" + format_number(st.d_min) + "\n";
  }
  return out;
}

Netlist parse_gate_netlist(std::string_view text) {
  Netlist nl;
  enum class Kind { FlipFlop, Gate };
  std::unordered_map<std::string, std::pair<Kind, std::size_t>> names;
  std::vector<std::pair<int, std::pair<std::string, std::string>>> pending;  // nets resolved at the end
  int line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    const auto toks = split_ws(strip_comment(raw));
    if (toks.empty()) continue;
    if (toks[0] == "ff" || toks[0] == "gate") {
      const bool is_ff = toks[0] == "ff";
      if (is_ff && toks.size() != 2) throw ParseError(line_no, "expected `ff <name>`");
      if (!is_ff && toks.size() != 4) throw ParseError(line_no, "expected `gate <name> dmin=<ps> dmax=<ps>`");
      check_name(toks[1], line_no);
      const std::string name(toks[1]);
      if (names.count(name)) throw ParseError(line_no, "duplicate element " + quoted(name));
      if (is_ff) {
        names.emplace(name, std::pair{Kind::FlipFlop, nl.flipflops.size()});
        nl.flipflops.push_back(name);
      } else {
        const auto [dmin, dmax] = parse_delay_pair(std::span(toks).subspan(2), line_no);
        names.emplace(name, std::pair{Kind::Gate, nl.gates.size()});
        nl.gates.push_back({name, dmin, dmax});
      }
    } else if (toks[0] == "net") {
      if (toks.size() != 3) throw ParseError(line_no, "expected `net <src> <dst>`");
      pending.push_back({line_no, {std::string(toks[1]), std::string(toks[2])}});
    } else {
      throw ParseError(line_no, "unknown directive " + quoted(toks[0]));
    }
  }

  // Nets may precede the declarations they mention.
  const std::size_t ng = nl.gates.size();
  std::vector<std::vector<std::size_t>> fanout(ng);
  std::vector<int> net_line_into(ng, 0);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [ln, net] : pending) {
    for (const auto& end : {net.first, net.second}) {
      if (!names.count(end)) throw ParseError(ln, "net references undeclared element " + quoted(end));
    }
    if (!seen.insert(net).second) continue;
    nl.nets.push_back(net);
    const auto& [sk, si] = names[net.first];
    const auto& [dk, di] = names[net.second];
    if (sk == Kind::Gate && dk == Kind::Gate) {
      fanout[si].push_back(di);
      net_line_into[di] = ln;
    }
  }

  // Gate-only cycle check (iterative DFS, colors 0/1/2).
  std::vector<int> color(ng, 0);
  for (std::size_t root = 0; root < ng; ++root) {
    if (color[root]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    color[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < fanout[v].size()) {
        const std::size_t w = fanout[v][next++];
        if (color[w] == 1) {
          throw ParseError(net_line_into[w], "combinational loop through gate " + quoted(nl.gates[w].name));
        }
        if (color[w] == 0) {
          color[w] = 1;
          stack.push_back({w, 0});
        }
      } else {
        color[v] = 2;
        stack.pop_back();
      }
    }
  }
  return nl;
}

StageGraph extract_stages(const Netlist& nl) {
  StageGraph g;
  g.flipflops = nl.flipflops;
  std::unordered_map<std::string, std::size_t> ff_index, gate_index;
  for (std::size_t i = 0; i < nl.flipflops.size(); ++i) ff_index[nl.flipflops[i]] = i;
  for (std::size_t i = 0; i < nl.gates.size(); ++i) gate_index[nl.gates[i].name] = i;

  const std::size_t ng = nl.gates.size(), nf = nl.flipflops.size();
  std::vector<std::vector<std::size_t>> gate_fanout(ng), ff_to_gate(nf), gate_to_ff(ng);
  std::vector<std::set<std::size_t>> ff_to_ff(nf);
  std::vector<int> indegree(ng, 0);
  for (const auto& [a, b] : nl.nets) {
    const bool a_ff = ff_index.count(a), b_ff = ff_index.count(b);
    if (a_ff && b_ff) {
      ff_to_ff[ff_index[a]].insert(ff_index[b]);
    } else if (a_ff) {
      ff_to_gate[ff_index[a]].push_back(gate_index.at(b));
    } else if (b_ff) {
      gate_to_ff[gate_index.at(a)].push_back(ff_index[b]);
    } else {
      gate_fanout[gate_index.at(a)].push_back(gate_index.at(b));
      ++indegree[gate_index.at(b)];
    }
  }

  std::vector<std::size_t> topo;
  for (std::size_t v = 0; v < ng; ++v) {
    if (indegree[v] == 0) topo.push_back(v);
  }
  for (std::size_t k = 0; k < topo.size(); ++k) {
    for (std::size_t w : gate_fanout[topo[k]]) {
      if (--indegree[w] == 0) topo.push_back(w);
    }
  }
  if (topo.size() != ng) throw std::invalid_argument("netlist has a combinational loop");

  constexpr double kNone = -1.0;
  std::vector<double> longest(ng), shortest(ng);
  for (std::size_t src = 0; src < nf; ++src) {
    std::fill(longest.begin(), longest.end(), kNone);
    std::fill(shortest.begin(), shortest.end(), kNone);
    for (std::size_t v : ff_to_gate[src]) {
      longest[v] = nl.gates[v].d_max;
      shortest[v] = nl.gates[v].d_min;
    }
    std::map<std::size_t, std::pair<double, double>> reach;  // dst -> (d_max, d_min)
    auto arrive = [&](std::size_t dst, double dmax, double dmin) {
      auto [it, fresh] = reach.try_emplace(dst, dmax, dmin);
      if (!fresh) {
        it->second.first = std::max(it->second.first, dmax);
        it->second.second = std::min(it->second.second, dmin);
      }
    };
    for (std::size_t dst : ff_to_ff[src]) arrive(dst, 0.0, 0.0);
    for (std::size_t v : topo) {
      if (longest[v] == kNone) continue;
      for (std::size_t w : gate_fanout[v]) {
        const double lmax = longest[v] + nl.gates[w].d_max, lmin = shortest[v] + nl.gates[w].d_min;
        if (longest[w] == kNone) {
          longest[w] = lmax;
          shortest[w] = lmin;
        } else {
          longest[w] = std::max(longest[w], lmax);
          shortest[w] = std::min(shortest[w], lmin);
        }
      }
      for (std::size_t dst : gate_to_ff[v]) arrive(dst, longest[v], shortest[v]);
    }
    for (const auto& [dst, d] : reach) g.stages.push_back({src, dst, d.first, d.second});
  }
  return g;
}

StageGraph generate_random_stage_graph(const RandomGraphSpec& spec) {
  if (spec.n_ff == 0) throw std::invalid_argument("need at least one flip-flop");
  const std::uint64_t pairs = static_cast<std::uint64_t>(spec.n_ff) * spec.n_ff;
  if (spec.n_stage > pairs) {
    throw std::invalid_argument("cannot place " + std::to_string(spec.n_stage) + " distinct stages on " +
                                std::to_string(spec.n_ff) + " flip-flops (" + std::to_string(pairs) +
                                " ordered pairs)");
  }
  if (!(0 <= spec.dmax_lo && spec.dmax_lo <= spec.dmax_hi)) throw std::invalid_argument("bad dmax range");
  if (!(0 <= spec.dmin_frac_lo && spec.dmin_frac_lo <= spec.dmin_frac_hi && spec.dmin_frac_hi <= 1)) {
    throw std::invalid_argument("bad dmin fraction range");
  }

  std::mt19937_64 rng(spec.seed);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
  };

  StageGraph g;
  for (std::size_t i = 0; i < spec.n_ff; ++i) g.flipflops.push_back("ff" + std::to_string(i));

  std::vector<std::uint64_t> chosen;
  if (spec.n_stage * 2 > pairs) {
    std::vector<std::uint64_t> all(pairs);
    for (std::uint64_t k = 0; k < pairs; ++k) all[k] = k;
    std::shuffle(all.begin(), all.end(), rng);
    chosen.assign(all.begin(), all.begin() + static_cast<long>(spec.n_stage));
  } else {
    std::set<std::uint64_t> used;
    while (chosen.size() < spec.n_stage) {
      const std::uint64_t k = rng() % pairs;
      if (used.insert(k).second) chosen.push_back(k);
    }
  }
  for (std::uint64_t k : chosen) {
    const double dmax = uniform(spec.dmax_lo, spec.dmax_hi);
    const double frac = uniform(spec.dmin_frac_lo, spec.dmin_frac_hi);
    g.stages.push_back({static_cast<std::size_t>(k / spec.n_ff), static_cast<std::size_t>(k % spec.n_ff),
                        dmax, frac * dmax});
  }
  return g;
}

}  // namespace cqsta
