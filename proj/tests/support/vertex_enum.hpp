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

// Brute-force LP reference for tiny bounded problems: every choice of n
// tight constraints is solved as a square system and the best feasible
// vertex wins. Independent of the simplex code on purpose.

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "milp.hpp"

namespace cqsta::testing {

struct Halfspace {
  std::vector<double> a;  // a . x <= b
  double b = 0.0;
};

inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> m,
                                                       std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    if (std::abs(m[piv][c]) < 1e-10) return std::nullopt;
    std::swap(m[piv], m[c]);
    std::swap(rhs[piv], rhs[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
  return x;
}

// Minimum of c.x over a bounded polytope given as halfspaces (variable
// bounds included). Empty when infeasible.
inline std::optional<double> vertex_min(const std::vector<double>& c, const std::vector<Halfspace>& hs) {
  const std::size_t n = c.size(), k = hs.size();
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  if (n > k) return std::nullopt;
  for (;;) {
    std::vector<std::vector<double>> m;
    std::vector<double> rhs;
    for (std::size_t i : pick) {
      m.push_back(hs[i].a);
      rhs.push_back(hs[i].b);
    }
    if (auto x = solve_square(m, rhs)) {
      bool ok = true;
      for (const auto& h : hs) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += h.a[j] * (*x)[j];
        if (lhs > h.b + 1e-7 * (1.0 + std::abs(h.b))) {
          ok = false;
          break;
        }
      }
      if (ok) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) v += c[j] * (*x)[j];
        if (!best || v < *best) best = v;
      }
    }
    // Next combination.
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == k - n + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

// Halfspace form of a model whose variables all have finite bounds.
inline std::vector<Halfspace> halfspaces_of(const MilpModel& model) {
  const std::size_t n = model.variables.size();
  std::vector<Halfspace> hs;
  for (const auto& c : model.constraints) {
    std::vector<double> a(n, 0.0);
    for (const auto& t : c.terms) a[t.var] += t.coef;
    if (c.sense != Sense::GreaterEqual) hs.push_back({a, c.rhs});
    if (c.sense != Sense::LessEqual) {
      for (double& v : a) v = -v;
      hs.push_back({a, -c.rhs});
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> a(n, 0.0);
    a[j] = 1.0;
    hs.push_back({a, model.variables[j].upper});
    a[j] = -1.0;
    hs.push_back({a, -model.variables[j].lower});
  }
  return hs;
}

}  // namespace cqsta::testing
