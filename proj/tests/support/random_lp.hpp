// Seeded small bounded LPs for cross-checking the simplex.

#pragma once

#include <random>

#include "milp.hpp"

namespace cqsta::testing {

inline MilpModel random_bounded_lp(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  MilpModel m;
  const int n = pick(1, 4);
  std::vector<double> anchor(n);
  for (int j = 0; j < n; ++j) {
    const double lo = uni(-5, 5);
    m.add_variable("x" + std::to_string(j), VarKind::Continuous, lo, lo + uni(0.5, 10));
    anchor[j] = uni(lo - 1, lo + 6);  // may sit outside the box
  }
  const int rows = pick(0, 6);
  for (int i = 0; i < rows; ++i) {
    std::vector<Term> terms;
    double at = 0.0;
    for (int j = 0; j < n; ++j) {
      if (pick(0, 3) == 0) continue;
      const double a = std::round(uni(-5, 5) * 4) / 4;
      terms.push_back({j, a});
      at += a * anchor[j];
    }
    const int s = pick(0, 4);
    const Sense sense = s < 2 ? Sense::LessEqual : s < 4 ? Sense::GreaterEqual : Sense::Equal;
    const double slack = sense == Sense::Equal ? 0.0 : uni(-1, 3);
    m.add_constraint("c" + std::to_string(i), terms, sense,
                     sense == Sense::LessEqual ? at + slack : at - slack);
  }
  for (int j = 0; j < n; ++j) m.objective.push_back({j, std::round(uni(-5, 5) * 2) / 2});
  return m;
}

}  // namespace cqsta::testing
