/* Exercises the C interface from plain C. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "cqsta/cqsta.h"

static int failures = 0;

#define CHECK(cond)                                                         \
  do {                                                                      \
    if (!(cond)) {                                                          \
      fprintf(stderr, "%s:%d: CHECK(%s) failed: %s\n", __FILE__, __LINE__, \
              #cond, cqsta_last_error());                                   \
      ++failures;                                                           \
    }                                                                       \
  } while (0)

static const char* data_dir;

static char* path_of(const char* name) {
  static char buf[4096];
  snprintf(buf, sizeof buf, "%s/%s", data_dir, name);
  return buf;
}

static void test_oracle(void) {
  cqsta_analytic_params p;
  cqsta_oracle* o = NULL;
  int valid = -1;
  double d = 0;
  cqsta_analytic_params_default(&p);
  CHECK(cqsta_oracle_analytic(&p, &o) == CQSTA_OK);
  CHECK(cqsta_oracle_query(o, 20, 150, &valid, &d) == CQSTA_OK);
  CHECK(valid == 1 && fabs(d - 182.085) < 1e-3);
  CHECK(cqsta_oracle_query(o, 0, 150, &valid, &d) == CQSTA_OK);
  CHECK(valid == 0);
  CHECK(cqsta_oracle_query(o, -1, 150, &valid, &d) == CQSTA_ERR_DOMAIN);
  CHECK(strlen(cqsta_last_error()) > 0);
  CHECK(cqsta_oracle_query(NULL, 1, 1, &valid, &d) == CQSTA_ERR_ARGUMENT);
  p.f_bar = 10;
  CHECK(cqsta_oracle_analytic(&p, NULL) == CQSTA_ERR_ARGUMENT);
  cqsta_oracle_free(o);
}

static void test_characterize(void) {
  cqsta_oracle* o = NULL;
  cqsta_settings* s = NULL;
  cqsta_char_config cfg;
  cqsta_model* m = NULL;
  cqsta_model* back = NULL;
  cqsta_validation v;
  char* text = NULL;
  char* again = NULL;
  cqsta_classic_params cp;

  CHECK(cqsta_settings_default(&s) == CQSTA_OK);
  CHECK(cqsta_settings_oracle(s, &o) == CQSTA_OK);
  CHECK(cqsta_settings_char_config(s, &cfg) == CQSTA_OK);
  CHECK(cqsta_characterize(o, &cfg, &m) == CQSTA_OK);
  CHECK(cqsta_model_polygon_count(m) > 1);
  CHECK(cqsta_model_query_count(m) > 0 && cqsta_model_query_count(m) <= 4530);
  CHECK(cqsta_model_validate(m, o, 1.0, &v) == CQSTA_OK);
  CHECK(v.max_abs_error <= cqsta_model_d_th(m));
  CHECK(cqsta_model_serialize(m, &text) == CQSTA_OK);
  CHECK(cqsta_model_parse(text, &back) == CQSTA_OK);
  CHECK(cqsta_model_serialize(back, &again) == CQSTA_OK);
  CHECK(text && again && strcmp(text, again) == 0);
  CHECK(cqsta_model_parse("{\"polygons\": []}", NULL) != CQSTA_OK);

  CHECK(cqsta_classic_characterize(o, 1.10, &cfg, &cp) == CQSTA_OK);
  CHECK(fabs(cp.t_su - 8 * log(100.0)) <= 0.25);
  CHECK(fabs(cp.d_cq - 110.0) <= 1e-4);

  cqsta_string_free(text);
  cqsta_string_free(again);
  cqsta_model_free(back);
  cqsta_model_free(m);
  cqsta_oracle_free(o);
  cqsta_settings_free(s);
}

static void test_chain(void) {
  cqsta_circuit* c = NULL;
  cqsta_model* m = NULL;
  cqsta_settings* s = NULL;
  cqsta_solution* sol = NULL;
  cqsta_optimize_options opt;
  cqsta_solution_info info;
  cqsta_working_point wp;
  cqsta_classic_params cp;
  cqsta_violations viol;
  int has = 0, no_stages = 1;
  double T = 0;
  char* lp = NULL;
  char* report = NULL;
  const char* needle = "Binaries";
  size_t binaries = 0;
  const char* at;

  CHECK(cqsta_circuit_load(path_of("cc1.txt"), &c) == CQSTA_OK);
  CHECK(cqsta_circuit_ff_count(c) == 3 && cqsta_circuit_stage_count(c) == 2);
  CHECK(cqsta_model_load(path_of("cc1_model.json"), &m) == CQSTA_OK);
  CHECK(cqsta_settings_load(path_of("cc1_classic.cfg"), &s) == CQSTA_OK);
  CHECK(cqsta_settings_classic(s, &has, &cp) == CQSTA_OK && has == 1);
  CHECK(cqsta_classic_period(c, &cp, &T, &no_stages) == CQSTA_OK);
  CHECK(T == 630.0 && no_stages == 0);

  cqsta_optimize_options_default(&opt);
  CHECK(cqsta_optimize(c, m, &opt, &sol) == CQSTA_OK);
  CHECK(cqsta_solution_info_get(sol, &info) == CQSTA_OK);
  CHECK(fabs(info.T - 610.0) <= 1e-6 && info.optimal);
  CHECK(cqsta_solution_point(sol, 1, &wp) == CQSTA_OK);
  CHECK(wp.polygon == 1 && wp.d_cq == 120.0);
  CHECK(cqsta_solution_point(sol, 3, &wp) == CQSTA_ERR_ARGUMENT);
  CHECK(cqsta_count_violations(c, &cp, info.T, &viol) == CQSTA_OK);
  CHECK(viol.setup_paths >= 1);
  CHECK(cqsta_render_solution(sol, c, CQSTA_FORMAT_JSON, &report) == CQSTA_OK);
  CHECK(report && strstr(report, "610") != NULL);

  CHECK(cqsta_export_lp(c, m, 0, &lp) == CQSTA_OK);
  at = lp ? strstr(lp, needle) : NULL;
  CHECK(at != NULL);
  if (at) {
    at = strchr(at, '\n') + 1;
    while (*at == ' ') {
      ++binaries;
      at = strchr(at, '\n') + 1;
    }
  }
  CHECK(binaries == 6);

  cqsta_string_free(lp);
  cqsta_string_free(report);
  cqsta_solution_free(sol);
  cqsta_settings_free(s);
  cqsta_model_free(m);
  cqsta_circuit_free(c);
}

static void test_errors(void) {
  cqsta_circuit* c = NULL;
  cqsta_random_spec spec;
  CHECK(cqsta_circuit_load("/definitely/missing.txt", &c) == CQSTA_ERR_PARSE);
  CHECK(strstr(cqsta_last_error(), "/definitely/missing.txt") != NULL);
  CHECK(cqsta_circuit_parse("ff A\nstage A A dmax=1 dmin=2\n", 0, &c) == CQSTA_ERR_PARSE);
  CHECK(strstr(cqsta_last_error(), "line 2") != NULL);
  CHECK(cqsta_settings_parse("bogus = 1\n", NULL) != CQSTA_OK);
  cqsta_random_spec_default(&spec);
  spec.n_ff = 2;
  spec.n_stage = 5;
  CHECK(cqsta_circuit_generate(&spec, &c) == CQSTA_ERR_ARGUMENT);
  spec.n_stage = 3;
  CHECK(cqsta_circuit_generate(&spec, &c) == CQSTA_OK);
  CHECK(cqsta_circuit_stage_count(c) == 3);
  cqsta_circuit_free(c);
  CHECK(cqsta_circuit_parse("ff F1\nff F2\ngate g1 dmin=10 dmax=20\nnet F1 g1\nnet g1 F2\n", 1, &c) == CQSTA_OK);
  CHECK(cqsta_circuit_stage_count(c) == 1);
  cqsta_circuit_free(c);
  cqsta_circuit_free(NULL);
  CHECK(cqsta_version() != NULL && strlen(cqsta_version()) > 0);
}

int main(int argc, char** argv) {
  if (argc != 2) {
    fprintf(stderr, "usage: %s <data dir>\n", argv[0]);
    return 2;
  }
  data_dir = argv[1];
  test_oracle();
  test_characterize();
  test_chain();
  test_errors();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C interface checks passed\n");
  return 0;
}
