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

// Exception-to-status boundary for the C interface.

#include "cqsta/cqsta.h"

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "json.hpp"

#include "characterizer.hpp"
#include "classic_sta.hpp"
#include "config.hpp"
#include "oracle.hpp"
#include "period_optimizer.hpp"
#include "report.hpp"
#include "text_util.hpp"
#include "timing_graph.hpp"

struct cqsta_settings {
  cqsta::RunSettings value;
};
struct cqsta_oracle {
  std::unique_ptr<cqsta::DelayOracle> value;
};
struct cqsta_model {
  cqsta::PiecewiseDelayModel value;
};
struct cqsta_circuit {
  cqsta::StageGraph value;
};
struct cqsta_solution {
  cqsta::Solution value;
  std::optional<cqsta::ValidationVerdict> verdict;
};
struct cqsta_compare_report {
  std::vector<cqsta::CompareRow> rows;
};

namespace {

using namespace cqsta;

thread_local std::string g_error;

cqsta_status fail(cqsta_status code, const std::string& msg) {
  g_error = msg;
  return code;
}

template <typename F>
cqsta_status guarded(F&& body) {
  g_error.clear();
  try {
    body();
    return CQSTA_OK;
  } catch (const ParseError& e) {
    return fail(CQSTA_ERR_PARSE, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CQSTA_ERR_PARSE, e.what());
  } catch (const InfeasibleError& e) {
    return fail(CQSTA_ERR_INFEASIBLE, e.what());
  } catch (const EnumerationLimitError& e) {
    return fail(CQSTA_ERR_LIMIT, e.what());
  } catch (const SolverLimitError& e) {
    return fail(CQSTA_ERR_LIMIT, e.what());
  } catch (const DomainError& e) {
    return fail(CQSTA_ERR_DOMAIN, e.what());
  } catch (const CharacterizationError& e) {
    return fail(CQSTA_ERR_PARSE, std::string("characterization failed: ") + e.what());
  } catch (const OracleError& e) {
    return fail(CQSTA_ERR_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(CQSTA_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CQSTA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CQSTA_ERR_INTERNAL, e.what());
  }
}

void require(const void* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string(what) + " must not be null");
}

std::string read_file(const char* path) {
  require(path, "path");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, std::string("cannot read '") + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put_string(char** out, const std::string& s) {
  require(out, "out");
  *out = dup_string(s);
}

CharConfig to_cpp(const cqsta_char_config& c) {
  CharConfig r;
  r.anchor_slack = c.anchor_slack;
  r.k_th = c.k_th;
  r.d_th = c.d_th;
  r.search_resolution = c.search_resolution;
  r.stable_step = c.stable_step;
  r.stable_epsilon = c.stable_epsilon;
  r.max_split_depth = c.max_split_depth;
  return r;
}

cqsta_char_config to_c(const CharConfig& r) {
  return {r.anchor_slack, r.k_th, r.d_th, r.search_resolution, r.stable_step, r.stable_epsilon, r.max_split_depth};
}

CharConfig config_or_default(const cqsta_char_config* c) { return c ? to_cpp(*c) : CharConfig{}; }

ClassicFFParams to_cpp(const cqsta_classic_params& p) { return {p.t_su, p.t_h, p.d_cq, p.degradation_factor}; }

OptimizeOptions to_cpp(const cqsta_optimize_options* o) {
  OptimizeOptions r;
  if (!o) return r;
  r.trim = o->trim != 0;
  if (o->node_limit <= 0) throw std::invalid_argument("node_limit must be positive");
  if (o->gap_tolerance < 0 || o->time_limit_seconds < 0) throw std::invalid_argument("limits must be >= 0");
  r.bb.node_limit = o->node_limit;
  r.bb.gap_tolerance = o->gap_tolerance;
  r.bb.time_limit_seconds = o->time_limit_seconds;
  return r;
}

ReportFormat to_cpp(cqsta_format f) {
  switch (f) {
    case CQSTA_FORMAT_TEXT: return ReportFormat::Text;
    case CQSTA_FORMAT_JSON: return ReportFormat::Json;
  }
  throw std::invalid_argument("unknown report format");
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::unique_ptr<DelayOracle> grid_oracle(const std::string& path, double f_bar) {
  const std::string text = read_file(path.c_str());
  try {
    return std::make_unique<GridOracle>(parse_sweep_dump(text), f_bar);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

}  // namespace

extern "C" {

const char* cqsta_version(void) { return "0.1.0"; }
const char* cqsta_last_error(void) { return g_error.c_str(); }
void cqsta_string_free(char* s) { std::free(s); }

void cqsta_char_config_default(cqsta_char_config* out) {
  if (out) *out = to_c(CharConfig{});
}

void cqsta_analytic_params_default(cqsta_analytic_params* out) {
  if (!out) return;
  const AnalyticParams a;
  *out = {a.d0, a.amp_s, a.amp_h, a.tau_s, a.tau_h, a.f_bar, a.domain_max};
}

void cqsta_random_spec_default(cqsta_random_spec* out) {
  if (!out) return;
  const RandomGraphSpec r;
  *out = {r.n_ff, r.n_stage, r.dmax_lo, r.dmax_hi, r.dmin_frac_lo, r.dmin_frac_hi, r.seed};
}

void cqsta_optimize_options_default(cqsta_optimize_options* out) {
  if (!out) return;
  const BbOptions b;
  *out = {1, b.node_limit, b.gap_tolerance, b.time_limit_seconds};
}

cqsta_status cqsta_settings_parse(const char* text, cqsta_settings** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new cqsta_settings{parse_settings(text)};
  });
}

cqsta_status cqsta_settings_load(const char* path, cqsta_settings** out) {
  return guarded([&] {
    require(out, "out");
    const std::string text = read_file(path);
    try {
      *out = new cqsta_settings{parse_settings(text)};
    } catch (const ParseError& e) {
      throw ParseError(0, std::string(path) + ": " + e.what());
    }
  });
}

cqsta_status cqsta_settings_default(cqsta_settings** out) {
  return guarded([&] {
    require(out, "out");
    *out = new cqsta_settings{};
  });
}

void cqsta_settings_free(cqsta_settings* s) { delete s; }

cqsta_status cqsta_settings_char_config(const cqsta_settings* s, cqsta_char_config* out) {
  return guarded([&] {
    require(s, "settings");
    require(out, "out");
    *out = to_c(s->value.characterization);
  });
}

cqsta_status cqsta_settings_set_char_config(cqsta_settings* s, const cqsta_char_config* cfg) {
  return guarded([&] {
    require(s, "settings");
    require(cfg, "config");
    const CharConfig c = to_cpp(*cfg);
    c.validate();
    s->value.characterization = c;
  });
}

cqsta_status cqsta_settings_classic(const cqsta_settings* s, int* has, cqsta_classic_params* out) {
  return guarded([&] {
    require(s, "settings");
    require(has, "has");
    require(out, "out");
    const auto p = explicit_classic(s->value);
    *has = p ? 1 : 0;
    if (p) *out = {p->t_su, p->t_h, p->d_cq, p->degradation_factor};
  });
}

cqsta_status cqsta_settings_oracle(const cqsta_settings* s, cqsta_oracle** out) {
  return guarded([&] {
    require(s, "settings");
    require(out, "out");
    if (s->value.grid_file) {
      *out = new cqsta_oracle{grid_oracle(*s->value.grid_file, s->value.grid_f_bar)};
    } else {
      *out = new cqsta_oracle{std::make_unique<AnalyticOracle>(s->value.analytic)};
    }
  });
}

cqsta_status cqsta_oracle_analytic(const cqsta_analytic_params* p, cqsta_oracle** out) {
  return guarded([&] {
    require(p, "params");
    require(out, "out");
    AnalyticParams a{p->d0, p->amp_s, p->amp_h, p->tau_s, p->tau_h, p->f_bar, p->domain_max};
    *out = new cqsta_oracle{std::make_unique<AnalyticOracle>(a)};
  });
}

cqsta_status cqsta_oracle_grid_load(const char* path, double f_bar, cqsta_oracle** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new cqsta_oracle{grid_oracle(path, f_bar)};
  });
}

void cqsta_oracle_free(cqsta_oracle* o) { delete o; }

cqsta_status cqsta_oracle_query(const cqsta_oracle* o, double s, double h, int* valid, double* delay) {
  return guarded([&] {
    require(o, "oracle");
    require(valid, "valid");
    require(delay, "delay");
    const OracleResponse r = o->value->query({s, h});
    *valid = r.is_valid() ? 1 : 0;
    if (r.is_valid()) *delay = r.delay();
  });
}

cqsta_status cqsta_characterize(const cqsta_oracle* o, const cqsta_char_config* cfg, cqsta_model** out) {
  return guarded([&] {
    require(o, "oracle");
    require(out, "out");
    *out = new cqsta_model{characterize(*o->value, config_or_default(cfg))};
  });
}

cqsta_status cqsta_characterize_to_target(const cqsta_oracle* o, const cqsta_char_config* cfg, size_t target,
                                          cqsta_model** out, double* d_th) {
  return guarded([&] {
    require(o, "oracle");
    require(out, "out");
    CoarsenResult r = characterize_to_polygon_target(*o->value, config_or_default(cfg), target);
    if (d_th) *d_th = r.d_th;
    *out = new cqsta_model{std::move(r.model)};
  });
}

cqsta_status cqsta_model_parse(const char* text, cqsta_model** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new cqsta_model{parse_model(text)};
  });
}

cqsta_status cqsta_model_load(const char* path, cqsta_model** out) {
  return guarded([&] {
    require(out, "out");
    const std::string text = read_file(path);
    try {
      *out = new cqsta_model{parse_model(text)};
    } catch (const ParseError& e) {
      throw ParseError(0, std::string(path) + ": " + e.what());
    }
  });
}

cqsta_status cqsta_model_serialize(const cqsta_model* m, char** out) {
  return guarded([&] {
    require(m, "model");
    put_string(out, serialize_model(m->value));
  });
}

void cqsta_model_free(cqsta_model* m) { delete m; }
size_t cqsta_model_polygon_count(const cqsta_model* m) { return m ? m->value.polygons.size() : 0; }
int64_t cqsta_model_query_count(const cqsta_model* m) { return m ? m->value.query_count : 0; }
double cqsta_model_d_th(const cqsta_model* m) { return m ? m->value.d_th : 0.0; }

cqsta_status cqsta_model_validate(const cqsta_model* m, const cqsta_oracle* o, double grid_resolution,
                                  cqsta_validation* out) {
  return guarded([&] {
    require(m, "model");
    require(o, "oracle");
    require(out, "out");
    const ValidationReport r = validate_model(m->value, *o->value, grid_resolution);
    *out = {r.grid_resolution, r.max_abs_error, r.coverage_fraction, r.worst_point.setup,
            r.worst_point.hold, r.valid_points, r.covered_points};
  });
}

cqsta_status cqsta_render_validation(const cqsta_validation* v, double d_th, cqsta_format f, char** out) {
  return guarded([&] {
    require(v, "validation");
    ValidationReport r;
    r.grid_resolution = v->grid_resolution;
    r.max_abs_error = v->max_abs_error;
    r.coverage_fraction = v->coverage_fraction;
    r.worst_point = {v->worst_setup, v->worst_hold};
    r.valid_points = v->valid_points;
    r.covered_points = v->covered_points;
    put_string(out, render_validation(r, d_th, to_cpp(f)));
  });
}

cqsta_status cqsta_circuit_parse(const char* text, int is_netlist, cqsta_circuit** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new cqsta_circuit{is_netlist ? extract_stages(parse_gate_netlist(text)) : parse_stage_graph(text)};
  });
}

cqsta_status cqsta_circuit_load(const char* path, cqsta_circuit** out) {
  return guarded([&] {
    require(out, "out");
    const std::string text = read_file(path);
    try {
      const bool netlist = ends_with(path, ".net");
      *out = new cqsta_circuit{netlist ? extract_stages(parse_gate_netlist(text)) : parse_stage_graph(text)};
    } catch (const ParseError& e) {
      throw ParseError(0, std::string(path) + ": " + e.what());
    }
  });
}

cqsta_status cqsta_circuit_generate(const cqsta_random_spec* spec, cqsta_circuit** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    RandomGraphSpec r{spec->n_ff, spec->n_stage, spec->dmax_lo, spec->dmax_hi,
                      spec->dmin_frac_lo, spec->dmin_frac_hi, spec->seed};
    *out = new cqsta_circuit{generate_random_stage_graph(r)};
  });
}

cqsta_status cqsta_circuit_serialize(const cqsta_circuit* c, char** out) {
  return guarded([&] {
    require(c, "circuit");
    put_string(out, write_stage_graph(c->value));
  });
}

void cqsta_circuit_free(cqsta_circuit* c) { delete c; }
size_t cqsta_circuit_ff_count(const cqsta_circuit* c) { return c ? c->value.flipflops.size() : 0; }
size_t cqsta_circuit_stage_count(const cqsta_circuit* c) { return c ? c->value.stages.size() : 0; }

cqsta_status cqsta_classic_characterize(const cqsta_oracle* o, double degradation_factor,
                                        const cqsta_char_config* cfg, cqsta_classic_params* out) {
  return guarded([&] {
    require(o, "oracle");
    require(out, "out");
    const ClassicFFParams p = characterize_classic(*o->value, degradation_factor, config_or_default(cfg));
    *out = {p.t_su, p.t_h, p.d_cq, p.degradation_factor};
  });
}

cqsta_status cqsta_classic_period(const cqsta_circuit* c, const cqsta_classic_params* p, double* T,
                                  int* no_stages) {
  return guarded([&] {
    require(c, "circuit");
    require(p, "params");
    require(T, "T");
    const ClassicPeriod r = min_period_classic(c->value, to_cpp(*p));
    *T = r.T;
    if (no_stages) *no_stages = r.no_stages ? 1 : 0;
  });
}

cqsta_status cqsta_count_violations(const cqsta_circuit* c, const cqsta_classic_params* p, double target_T,
                                    cqsta_violations* out) {
  return guarded([&] {
    require(c, "circuit");
    require(p, "params");
    require(out, "out");
    if (!(target_T > 0)) throw std::invalid_argument("target T must be > 0");
    const ViolationCounts v = count_violations(c->value, to_cpp(*p), target_T);
    *out = {v.setup_paths, v.setup_ffs, v.hold_paths, v.hold_ffs};
  });
}

cqsta_status cqsta_render_classic(const cqsta_classic_params* p, double T, int no_stages, cqsta_format f,
                                  char** out) {
  return guarded([&] {
    require(p, "params");
    put_string(out, render_classic(to_cpp(*p), ClassicPeriod{T, no_stages != 0}, to_cpp(f)));
  });
}

cqsta_status cqsta_render_violations(const cqsta_violations* v, double target_T, cqsta_format f, char** out) {
  return guarded([&] {
    require(v, "violations");
    const ViolationCounts c{v->setup_paths, v->setup_ffs, v->hold_paths, v->hold_ffs};
    put_string(out, render_violations(c, target_T, to_cpp(f)));
  });
}

cqsta_status cqsta_optimize(const cqsta_circuit* c, const cqsta_model* m, const cqsta_optimize_options* opt,
                            cqsta_solution** out) {
  return guarded([&] {
    require(c, "circuit");
    require(m, "model");
    require(out, "out");
    *out = new cqsta_solution{solve_min_period(c->value, m->value, to_cpp(opt)), std::nullopt};
  });
}

void cqsta_solution_free(cqsta_solution* s) { delete s; }

cqsta_status cqsta_solution_info_get(const cqsta_solution* s, cqsta_solution_info* out) {
  return guarded([&] {
    require(s, "solution");
    require(out, "out");
    const Solution& v = s->value;
    *out = {v.T,          v.status == SolveStatus::Optimal ? 1 : 0,
            v.gap,        v.n_ff,
            v.n_ff_trimmed, v.removed_stages,
            v.avg_polygons, v.t_floor,
            v.nodes,      v.runtime_seconds};
  });
}

cqsta_status cqsta_solution_point(const cqsta_solution* s, size_t ff, cqsta_working_point* out) {
  return guarded([&] {
    require(s, "solution");
    require(out, "out");
    if (ff >= s->value.points.size()) throw std::invalid_argument("flip-flop index out of range");
    const WorkingPoint& w = s->value.points[ff];
    *out = {w.polygon, w.s, w.h, w.d_cq};
  });
}

cqsta_status cqsta_solution_validate(cqsta_solution* s, const cqsta_circuit* c, const cqsta_model* m,
                                     const cqsta_oracle* o, int* ok) {
  return guarded([&] {
    require(s, "solution");
    require(c, "circuit");
    require(m, "model");
    require(o, "oracle");
    require(ok, "ok");
    s->verdict = validate_solution(s->value, c->value, m->value, *o->value);
    *ok = s->verdict->ok() ? 1 : 0;
  });
}

cqsta_status cqsta_render_solution(const cqsta_solution* s, const cqsta_circuit* c, cqsta_format f, char** out) {
  return guarded([&] {
    require(s, "solution");
    require(c, "circuit");
    put_string(out, render_solution(s->value, c->value, s->verdict ? &*s->verdict : nullptr, to_cpp(f)));
  });
}

cqsta_status cqsta_export_lp(const cqsta_circuit* c, const cqsta_model* m, int trim_on, char** out) {
  return guarded([&] {
    require(c, "circuit");
    require(m, "model");
    const TrimmedProblem p = trim_on ? trim(c->value, m->value, compute_trim_bounds(c->value, m->value))
                                     : untrimmed_problem(c->value, m->value);
    put_string(out, export_lp_text(build_milp(p, m->value).model));
  });
}

cqsta_status cqsta_compare_report_new(cqsta_compare_report** out) {
  return guarded([&] {
    require(out, "out");
    *out = new cqsta_compare_report{};
  });
}

void cqsta_compare_report_free(cqsta_compare_report* r) { delete r; }

cqsta_status cqsta_compare_add(cqsta_compare_report* r, const char* name, const cqsta_circuit* c,
                               const cqsta_model* m, const cqsta_oracle* o, const cqsta_char_config* cfg,
                               const cqsta_optimize_options* opt) {
  return guarded([&] {
    require(r, "report");
    require(name, "name");
    require(c, "circuit");
    require(m, "model");
    require(o, "oracle");
    const CharConfig cc = config_or_default(cfg);
    const ClassicFFParams def = characterize_classic(*o->value, kDefaultFactor, cc);
    const ClassicFFParams onset = characterize_classic(*o->value, kOnsetFactor, cc);
    const Solution s = solve_min_period(c->value, m->value, to_cpp(opt));
    const ViolationCounts v = count_violations(c->value, def, s.T > 0 ? s.T : 1e-9);
    r->rows.push_back(make_compare_row(name, s, min_period_classic(c->value, def).T,
                                       min_period_classic(c->value, onset).T, v, m->value.polygons.size()));
  });
}

cqsta_status cqsta_compare_render(const cqsta_compare_report* r, cqsta_format f, char** out) {
  return guarded([&] {
    require(r, "report");
    put_string(out, render_compare(r->rows, to_cpp(f)));
  });
}

cqsta_status cqsta_sweep(const cqsta_circuit* c, const cqsta_oracle* o, const cqsta_char_config* cfg,
                         const size_t* targets, size_t n_targets, const cqsta_optimize_options* opt,
                         cqsta_sweep_row* rows) {
  return guarded([&] {
    require(c, "circuit");
    require(o, "oracle");
    require(targets, "targets");
    require(rows, "rows");
    const CharConfig cc = config_or_default(cfg);
    const OptimizeOptions oo = to_cpp(opt);
    for (size_t i = 0; i < n_targets; ++i) {
      const CoarsenResult m = characterize_to_polygon_target(*o->value, cc, targets[i]);
      const Solution s = solve_min_period(c->value, m.model, oo);
      rows[i] = {targets[i], m.model.polygons.size(), m.d_th, s.T, s.runtime_seconds,
                 s.status == SolveStatus::Optimal ? 1 : 0};
    }
  });
}

cqsta_status cqsta_render_sweep(const cqsta_sweep_row* rows, size_t n, cqsta_format f, char** out) {
  return guarded([&] {
    if (n > 0) require(rows, "rows");
    std::vector<SweepRow> v;
    for (size_t i = 0; i < n; ++i) {
      v.push_back({rows[i].target, rows[i].polygons, rows[i].d_th, rows[i].T, rows[i].runtime_seconds,
                   rows[i].optimal ? "optimal" : "feasible"});
    }
    put_string(out, render_sweep(v, to_cpp(f)));
  });
}

}  // extern "C"
