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

// cqsta command-line driver. Exit codes: 0 success, 1 usage, 2 input,
// 3 infeasible, 4 solver or internal limit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cqsta/cqsta.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kInfeasible = 3, kLimit = 4 };

struct Failure {
  int code;
};

int exit_code(cqsta_status s) {
  switch (s) {
    case CQSTA_OK: return kOk;
    case CQSTA_ERR_ARGUMENT: return kUsage;
    case CQSTA_ERR_PARSE:
    case CQSTA_ERR_DOMAIN: return kInput;
    case CQSTA_ERR_INFEASIBLE: return kInfeasible;
    case CQSTA_ERR_LIMIT:
    case CQSTA_ERR_INTERNAL: return kLimit;
  }
  return kLimit;
}

void check(cqsta_status s) {
  if (s == CQSTA_OK) return;
  std::fprintf(stderr, "cqsta: %s\n", cqsta_last_error());
  throw Failure{exit_code(s)};
}

// Owns a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  cqsta_string_free(s);
  return out;
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Settings = Handle<cqsta_settings, cqsta_settings_free>;
using Oracle = Handle<cqsta_oracle, cqsta_oracle_free>;
using Model = Handle<cqsta_model, cqsta_model_free>;
using Circuit = Handle<cqsta_circuit, cqsta_circuit_free>;
using SolutionH = Handle<cqsta_solution, cqsta_solution_free>;
using CompareH = Handle<cqsta_compare_report, cqsta_compare_report_free>;

struct Options {
  std::string config;
  std::string model;
  std::vector<std::string> circuits;
  std::string out;
  std::string format = "text";
  std::string export_lp;
  std::optional<double> target_t;
  double factor = 1.10;
  std::optional<double> d_th, k_th;
  double resolution = 1.0;
  bool no_trim = false;
  bool validate = false;
  long long node_limit = 1'000'000;
  double time_limit = 0.0;
  double gap = 0.0;
  std::vector<std::size_t> targets{8, 16, 32, 64};
  // gen
  std::uint64_t seed = 1;
  std::size_t n_ff = 10, n_stage = 20;
  double dmax_lo = 100, dmax_hi = 500, dmin_lo = 0.2, dmin_hi = 0.6;
};

cqsta_format format_of(const Options& o) {
  return (o.format == "json" || o.format == "machine") ? CQSTA_FORMAT_JSON : CQSTA_FORMAT_TEXT;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!(f << text)) {
    std::fprintf(stderr, "cqsta: cannot write '%s'\n", o.out.c_str());
    throw Failure{kInput};
  }
}

void load_settings(const Options& o, Settings& s) {
  if (o.config.empty()) check(cqsta_settings_default(s.out()));
  else check(cqsta_settings_load(o.config.c_str(), s.out()));
  cqsta_char_config cfg;
  check(cqsta_settings_char_config(s.get(), &cfg));
  if (o.d_th) cfg.d_th = *o.d_th;
  if (o.k_th) cfg.k_th = *o.k_th;
  check(cqsta_settings_set_char_config(s.get(), &cfg));
}

cqsta_char_config char_config(const Settings& s) {
  cqsta_char_config cfg;
  check(cqsta_settings_char_config(s.get(), &cfg));
  return cfg;
}

cqsta_optimize_options optimize_options(const Options& o) {
  cqsta_optimize_options opt;
  cqsta_optimize_options_default(&opt);
  opt.trim = o.no_trim ? 0 : 1;
  opt.node_limit = o.node_limit;
  opt.time_limit_seconds = o.time_limit;
  opt.gap_tolerance = o.gap;
  return opt;
}

const std::string& single_circuit(const Options& o) {
  if (o.circuits.size() != 1) {
    std::fprintf(stderr, "cqsta: exactly one --circuit is required\n");
    throw Failure{kUsage};
  }
  return o.circuits.front();
}

cqsta_classic_params classic_params(const Settings& s, const Oracle& oracle, double factor) {
  int has = 0;
  cqsta_classic_params p;
  check(cqsta_settings_classic(s.get(), &has, &p));
  if (!has) {
    const cqsta_char_config cfg = char_config(s);
    check(cqsta_classic_characterize(oracle.get(), factor, &cfg, &p));
  }
  return p;
}

int run_characterize(const Options& o) {
  Settings s;
  load_settings(o, s);
  Oracle oracle;
  check(cqsta_settings_oracle(s.get(), oracle.out()));
  const cqsta_char_config cfg = char_config(s);
  Model m;
  check(cqsta_characterize(oracle.get(), &cfg, m.out()));
  char* text = nullptr;
  check(cqsta_model_serialize(m.get(), &text));
  emit(o, take(text));
  if (!o.out.empty()) {
    std::printf("polygons %zu  queries %lld  -> %s\n", cqsta_model_polygon_count(m.get()),
                static_cast<long long>(cqsta_model_query_count(m.get())), o.out.c_str());
  }
  return kOk;
}

int run_validate(const Options& o) {
  Settings s;
  load_settings(o, s);
  Oracle oracle;
  check(cqsta_settings_oracle(s.get(), oracle.out()));
  Model m;
  check(cqsta_model_load(o.model.c_str(), m.out()));
  cqsta_validation v;
  check(cqsta_model_validate(m.get(), oracle.get(), o.resolution, &v));
  char* text = nullptr;
  check(cqsta_render_validation(&v, cqsta_model_d_th(m.get()), format_of(o), &text));
  emit(o, take(text));
  return kOk;
}

int run_sta(const Options& o) {
  Settings s;
  load_settings(o, s);
  Oracle oracle;
  check(cqsta_settings_oracle(s.get(), oracle.out()));
  Circuit c;
  check(cqsta_circuit_load(single_circuit(o).c_str(), c.out()));
  const cqsta_classic_params p = classic_params(s, oracle, o.factor);
  double T = 0.0;
  int none = 0;
  check(cqsta_classic_period(c.get(), &p, &T, &none));
  char* text = nullptr;
  check(cqsta_render_classic(&p, T, none, format_of(o), &text));
  emit(o, take(text));
  if (none) std::fprintf(stderr, "cqsta: warning: circuit has no stages\n");
  return kOk;
}

int run_check(const Options& o) {
  Settings s;
  load_settings(o, s);
  Oracle oracle;
  check(cqsta_settings_oracle(s.get(), oracle.out()));
  Circuit c;
  check(cqsta_circuit_load(single_circuit(o).c_str(), c.out()));
  const cqsta_classic_params p = classic_params(s, oracle, o.factor);
  cqsta_violations v;
  check(cqsta_count_violations(c.get(), &p, *o.target_t, &v));
  char* text = nullptr;
  check(cqsta_render_violations(&v, *o.target_t, format_of(o), &text));
  emit(o, take(text));
  return kOk;
}

int run_optimize(const Options& o) {
  Circuit c;
  check(cqsta_circuit_load(single_circuit(o).c_str(), c.out()));
  Model m;
  check(cqsta_model_load(o.model.c_str(), m.out()));
  if (!o.export_lp.empty()) {
    char* lp = nullptr;
    check(cqsta_export_lp(c.get(), m.get(), o.no_trim ? 0 : 1, &lp));
    std::ofstream f(o.export_lp, std::ios::binary);
    if (!(f << take(lp))) {
      std::fprintf(stderr, "cqsta: cannot write '%s'\n", o.export_lp.c_str());
      return kInput;
    }
  }
  const cqsta_optimize_options opt = optimize_options(o);
  SolutionH sol;
  check(cqsta_optimize(c.get(), m.get(), &opt, sol.out()));
  int ok = 1;
  if (o.validate) {
    Settings s;
    load_settings(o, s);
    Oracle oracle;
    check(cqsta_settings_oracle(s.get(), oracle.out()));
    check(cqsta_solution_validate(sol.get(), c.get(), m.get(), oracle.get(), &ok));
  }
  char* text = nullptr;
  check(cqsta_render_solution(sol.get(), c.get(), format_of(o), &text));
  emit(o, take(text));
  cqsta_solution_info info;
  check(cqsta_solution_info_get(sol.get(), &info));
  if (!info.optimal) {
    std::fprintf(stderr, "cqsta: limit reached; best period has relative gap %g\n", info.gap);
    return kLimit;
  }
  return ok ? kOk : kInfeasible;
}

std::string stem(const std::string& path) {
  const auto slash = path.find_last_of('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  return dot == std::string::npos || dot == 0 ? name : name.substr(0, dot);
}

int run_compare(const Options& o) {
  Settings s;
  load_settings(o, s);
  Oracle oracle;
  check(cqsta_settings_oracle(s.get(), oracle.out()));
  Model m;
  check(cqsta_model_load(o.model.c_str(), m.out()));
  const cqsta_char_config cfg = char_config(s);
  const cqsta_optimize_options opt = optimize_options(o);
  CompareH report;
  check(cqsta_compare_report_new(report.out()));
  for (const std::string& path : o.circuits) {
    Circuit c;
    check(cqsta_circuit_load(path.c_str(), c.out()));
    check(cqsta_compare_add(report.get(), stem(path).c_str(), c.get(), m.get(), oracle.get(), &cfg, &opt));
  }
  char* text = nullptr;
  check(cqsta_compare_render(report.get(), format_of(o), &text));
  emit(o, take(text));
  return kOk;
}

int run_gen(const Options& o) {
  cqsta_random_spec spec{o.n_ff, o.n_stage, o.dmax_lo, o.dmax_hi, o.dmin_lo, o.dmin_hi, o.seed};
  Circuit c;
  check(cqsta_circuit_generate(&spec, c.out()));
  char* text = nullptr;
  check(cqsta_circuit_serialize(c.get(), &text));
  emit(o, take(text));
  return kOk;
}

int run_sweep(const Options& o) {
  Settings s;
  load_settings(o, s);
  Oracle oracle;
  check(cqsta_settings_oracle(s.get(), oracle.out()));
  Circuit c;
  check(cqsta_circuit_load(single_circuit(o).c_str(), c.out()));
  const cqsta_char_config cfg = char_config(s);
  const cqsta_optimize_options opt = optimize_options(o);
  std::vector<cqsta_sweep_row> rows(o.targets.size());
  check(cqsta_sweep(c.get(), oracle.get(), &cfg, o.targets.data(), o.targets.size(), &opt, rows.data()));
  char* text = nullptr;
  check(cqsta_render_sweep(rows.data(), rows.size(), format_of(o), &text));
  emit(o, take(text));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clock period analysis with metastability-aware flip-flop delay models"};
  app.require_subcommand(1);
  Options o;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json", "machine"}));
    sub->add_option("--out", o.out, "Write the report to this file");
  };
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "key = value settings file");
    sub->add_option("--d-th", o.d_th, "Model accuracy threshold (ps)")->check(CLI::PositiveNumber);
    sub->add_option("--k-th", o.k_th, "Boundary distance threshold (ps)")->check(CLI::PositiveNumber);
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_flag("--no-trim", o.no_trim, "Solve without trimming");
    sub->add_option("--node-limit", o.node_limit, "Branch-and-bound node limit")->check(CLI::PositiveNumber);
    sub->add_option("--time-limit", o.time_limit, "Solver time limit in seconds (0: none)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--gap", o.gap, "Relative optimality gap to stop at")->check(CLI::NonNegativeNumber);
  };

  auto* characterize = app.add_subcommand("characterize", "Build a piecewise delay model from the oracle");
  add_config(characterize);
  add_format(characterize);

  auto* validate = app.add_subcommand("validate-model", "Compare a model against the oracle on a grid");
  add_config(validate);
  add_format(validate);
  validate->add_option("--model", o.model, "Model file")->required();
  validate->add_option("--resolution", o.resolution, "Grid step (ps)")->check(CLI::PositiveNumber);

  auto* sta = app.add_subcommand("sta", "Classic minimum period with fixed setup/hold/clock-to-q");
  add_config(sta);
  add_format(sta);
  sta->add_option("--circuit", o.circuits, "Stage file or .net gate netlist")->required();
  sta->add_option("--factor", o.factor, "Delay degradation factor")->check(CLI::Range(1.0 + 1e-9, 100.0));

  auto* optimize = app.add_subcommand("optimize", "Minimum period with the piecewise model");
  add_config(optimize);
  add_format(optimize);
  add_solver(optimize);
  optimize->add_option("--circuit", o.circuits, "Stage file or .net gate netlist")->required();
  optimize->add_option("--model", o.model, "Model file")->required();
  optimize->add_option("--export-lp", o.export_lp, "Also write the MILP in LP format");
  optimize->add_flag("--validate", o.validate, "Check the solution against the oracle");

  auto* chk = app.add_subcommand("check", "Classic setup/hold violations at a target period");
  add_config(chk);
  add_format(chk);
  chk->add_option("--circuit", o.circuits, "Stage file or .net gate netlist")->required();
  chk->add_option("--target-t", o.target_t, "Target clock period (ps)")->required()->check(CLI::PositiveNumber);
  chk->add_option("--factor", o.factor, "Delay degradation factor")->check(CLI::Range(1.0 + 1e-9, 100.0));

  auto* compare = app.add_subcommand("compare", "Classic versus optimized period, one row per circuit");
  add_config(compare);
  add_format(compare);
  add_solver(compare);
  compare->add_option("--circuit", o.circuits, "Stage files or .net gate netlists")->required();
  compare->add_option("--model", o.model, "Model file")->required();

  auto* gen = app.add_subcommand("gen", "Seeded random stage graph");
  add_format(gen);
  gen->add_option("--seed", o.seed, "Random seed");
  gen->add_option("--ffs", o.n_ff, "Flip-flop count")->check(CLI::PositiveNumber);
  gen->add_option("--stages", o.n_stage, "Stage count");
  gen->add_option("--dmax-lo", o.dmax_lo, "Smallest max stage delay (ps)");
  gen->add_option("--dmax-hi", o.dmax_hi, "Largest max stage delay (ps)");
  gen->add_option("--dmin-lo", o.dmin_lo, "Smallest min/max delay ratio");
  gen->add_option("--dmin-hi", o.dmin_hi, "Largest min/max delay ratio");

  auto* sweep = app.add_subcommand("sweep", "Runtime and period against model polygon count");
  add_config(sweep);
  add_format(sweep);
  add_solver(sweep);
  sweep->add_option("--circuit", o.circuits, "Stage file or .net gate netlist")->required();
  sweep->add_option("--targets", o.targets, "Polygon count targets")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*characterize) return run_characterize(o);
    if (*validate) return run_validate(o);
    if (*sta) return run_sta(o);
    if (*optimize) return run_optimize(o);
    if (*chk) return run_check(o);
    if (*compare) return run_compare(o);
    if (*gen) return run_gen(o);
    if (*sweep) return run_sweep(o);
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cqsta: %s\n", e.what());
    return kLimit;
  }
  return kUsage;
}
