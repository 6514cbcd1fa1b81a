// Copyright 2026 The lpoffline Authors
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

#include "lpoff/lpoffline.h"

#include "lpoff/case1.hpp"
#include "lpoff/case2.hpp"
#include "lpoff/diagnostics.hpp"
#include "lpoff/harness.hpp"
#include "lpoff/serialize.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <sstream>
#include <string>

struct lpo_mdp {
  lpoff::TabularMdp mdp;
  lpoff::OptimalityProfile profile;
};

struct lpo_dist {
  lpoff::DataDistribution dist;
};

struct lpo_dataset {
  lpoff::Dataset data;
};

namespace {

thread_local std::string g_last_error;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename F>
lpo_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const lpoff::InvalidArgument& e) {
    g_last_error = e.what();
    return LPO_ERR_INVALID_ARGUMENT;
  } catch (const lpoff::ParseError& e) {
    g_last_error = e.what();
    return LPO_ERR_PARSE;
  } catch (const lpoff::NumericError& e) {
    g_last_error = e.what();
    return LPO_ERR_NUMERIC;
  } catch (const IoError& e) {
    g_last_error = e.what();
    return LPO_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LPO_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LPO_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return LPO_ERR_INTERNAL;
  }
}

void require(bool condition, const char* message) {
  if (!condition) throw lpoff::InvalidArgument(message);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void check_pair(const lpo_mdp* mdp, const lpo_dist* dist) {
  require(mdp != nullptr && dist != nullptr, "mdp and dist must be non-null");
  require(dist->dist.mu().size() == mdp->mdp.num_pairs(), "data distribution does not match the MDP");
}

lpoff::EmpiricalModel model_for(const lpo_mdp* mdp, const lpo_dist* dist, const lpo_dataset* data) {
  if (data == nullptr) return lpoff::population_model(mdp->mdp, dist->dist);
  return lpoff::empirical_model(data->data, mdp->mdp.reward(), mdp->mdp.num_states(),
                                mdp->mdp.num_actions(), mdp->mdp.discount());
}

std::int64_t sample_size(const lpo_dataset* data, std::int64_t fallback) {
  const std::int64_t n = data != nullptr ? static_cast<std::int64_t>(data->data.size()) : fallback;
  require(n >= 1, "sample size must be >= 1");
  return n;
}

void dump_lp(const lpoff::LinearProgram& lp, const char* path) {
  if (path == nullptr) return;
  std::ofstream out(path);
  if (!out) throw IoError(std::string("cannot open ") + path);
  lpoff::write_lp_text(lp, out);
}

lpoff::Case1Config case1_config(const lpo_case1_params& p, const lpo_mdp* mdp, const lpo_dist* dist) {
  lpoff::Case1Config cfg;
  cfg.b_w = std::isnan(p.b_w)
                ? std::max(1.0, lpoff::compute_c_star(mdp->mdp, mdp->profile, dist->dist,
                                                      mdp->mdp.initial_dist()))
                : p.b_w;
  cfg.delta = p.delta;
  switch (p.mode) {
    case LPO_THRESHOLD_GENERAL: cfg.mode = lpoff::ThresholdMode::kGeneral; break;
    case LPO_THRESHOLD_TABULAR: cfg.mode = lpoff::ThresholdMode::kTabular; break;
    case LPO_THRESHOLD_EXPLICIT: cfg.mode = lpoff::ThresholdMode::kExplicit; break;
    default: throw lpoff::InvalidArgument("unknown threshold mode");
  }
  cfg.epsilon = p.epsilon;
  cfg.log_card_b = p.log_card_b;
  cfg.log_card_w = p.log_card_w;
  return cfg.resolved(mdp->mdp.num_states(), mdp->mdp.num_actions());
}

lpoff::Case2Config case2_config(const lpo_case2_params& p, const lpo_mdp* mdp, const lpo_dist* dist) {
  lpoff::Case2Config cfg;
  cfg.b_w = std::isnan(p.b_w)
                ? std::max(1.0, lpoff::compute_c_star(mdp->mdp, mdp->profile, dist->dist,
                                                      dist->dist.state_marginal()))
                : p.b_w;
  cfg.delta = p.delta;
  cfg.log_card_w = p.log_card_w;
  cfg.log_card_v = p.log_card_v;
  return cfg.resolved(mdp->mdp.num_states(), mdp->mdp.num_actions());
}

struct Case1Run {
  lpoff::Case1Config cfg;
  lpoff::Case1Solution sol;
  std::string report;
};

Case1Run run_case1(const lpo_mdp* mdp, const lpo_dist* dist, const lpo_dataset* data,
                   const lpo_case1_params& p) {
  Case1Run run;
  run.cfg = case1_config(p, mdp, dist);
  const std::int64_t n = sample_size(data, p.n);
  const auto model = model_for(mdp, dist, data);
  run.sol = lpoff::solve_case1(model, mdp->mdp.initial_dist(), dist->dist.behavior(), run.cfg, n);
  dump_lp(run.sol.program, p.lp_dump_path);

  lpoff::ReportContext ctx;
  ctx.b_w = run.cfg.b_w;
  if (run.sol.optimal()) {
    const auto& mu0 = mdp->mdp.initial_dist();
    ctx.subopt = lpoff::return_of(mdp->mdp, mdp->profile.greedy_policy(), mu0) -
                 lpoff::return_of(mdp->mdp, *run.sol.policy, mu0);
  }
  std::optional<lpoff::TabularThresholdVariants> variants;
  if (run.cfg.mode == lpoff::ThresholdMode::kTabular)
    variants = lpoff::tabular_threshold_variants(run.cfg.b_w, mdp->mdp.num_states(),
                                                 mdp->mdp.num_actions(), run.cfg.delta, n);
  run.report = lpoff::case1_report_json(run.sol, ctx, variants ? &*variants : nullptr);
  return run;
}

struct Case2Run {
  lpoff::Case2Config cfg;
  lpoff::Case2Solution sol;
  lpoff::CoverageAudit coverage;
  lpoff::EmpiricalModel model;
  std::int64_t n = 0;
  std::string report;
};

Case2Run run_case2(const lpo_mdp* mdp, const lpo_dist* dist, const lpo_dataset* data,
                   const lpo_case2_params& p) {
  Case2Run run;
  run.cfg = case2_config(p, mdp, dist);
  run.n = sample_size(data, p.n);
  run.model = model_for(mdp, dist, data);
  const auto& pi_mu = dist->dist.behavior();
  run.sol = lpoff::solve_case2(run.model, pi_mu, run.cfg);
  dump_lp(run.sol.program, p.lp_dump_path);
  run.coverage = lpoff::coverage_audit(mdp->mdp, mdp->profile, dist->dist);

  lpoff::ReportContext ctx;
  ctx.b_w = run.cfg.b_w;
  ctx.delta_q = mdp->profile.gap;
  ctx.c_max = run.coverage.c_max.value;
  if (run.sol.optimal()) {
    const auto pop = lpoff::population_model(mdp->mdp, dist->dist);
    run.sol.delta_pop = lpoff::primal_gap(pop, run.sol.w_d, pi_mu, run.cfg);
    run.sol.inactive_mass = lpoff::inactive_mass(run.sol.w_d, dist->dist.mu(), mdp->profile.inactive);
    const auto& rho = dist->dist.state_marginal();
    ctx.subopt = lpoff::return_of(mdp->mdp, mdp->profile.greedy_policy(), rho) -
                 lpoff::return_of(mdp->mdp, *run.sol.policy, rho);
  }
  const auto bound = lpoff::bound_main2(run.cfg, mdp->mdp.discount(), run.coverage.c_max.value,
                                        mdp->profile.gap, run.n);
  run.report = lpoff::case2_report_json(
      run.sol, bound.degenerate ? std::nan("") : bound.value, ctx);
  return run;
}

}  // namespace

extern "C" {

const char* lpo_version(void) { return "0.1.0"; }

const char* lpo_last_error(void) { return g_last_error.c_str(); }

const char* lpo_status_name(lpo_status status) {
  switch (status) {
    case LPO_OK: return "ok";
    case LPO_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case LPO_ERR_PARSE: return "parse_error";
    case LPO_ERR_NUMERIC: return "numeric_error";
    case LPO_ERR_INFEASIBLE: return "infeasible";
    case LPO_ERR_AUDIT_FAILED: return "audit_failed";
    case LPO_ERR_IO: return "io_error";
    case LPO_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

void lpo_string_free(char* str) { std::free(str); }

lpo_status lpo_mdp_from_json(const char* json, lpo_mdp** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "json and out must be non-null");
    auto mdp = lpoff::mdp_from_json(json);
    auto profile = lpoff::optimal_profile(mdp);
    *out = new lpo_mdp{std::move(mdp), std::move(profile)};
    return LPO_OK;
  });
}

lpo_status lpo_mdp_garnet(int num_states, int num_actions, double gamma, int branching_factor,
                          uint64_t seed, lpo_mdp** out) {
  return guarded([&] {
    require(out != nullptr, "out must be non-null");
    auto mdp = lpoff::generate_garnet({num_states, num_actions, gamma, branching_factor, seed});
    auto profile = lpoff::optimal_profile(mdp);
    *out = new lpo_mdp{std::move(mdp), std::move(profile)};
    return LPO_OK;
  });
}

lpo_status lpo_mdp_to_json(const lpo_mdp* mdp, char** out) {
  return guarded([&] {
    require(mdp != nullptr && out != nullptr, "mdp and out must be non-null");
    *out = copy_string(lpoff::mdp_to_json(mdp->mdp));
    return LPO_OK;
  });
}

int lpo_mdp_num_states(const lpo_mdp* mdp) { return mdp != nullptr ? mdp->mdp.num_states() : 0; }

int lpo_mdp_num_actions(const lpo_mdp* mdp) { return mdp != nullptr ? mdp->mdp.num_actions() : 0; }

lpo_status lpo_mdp_optimal_return(const lpo_mdp* mdp, double* out) {
  return guarded([&] {
    require(mdp != nullptr && out != nullptr, "mdp and out must be non-null");
    *out = (1.0 - mdp->mdp.discount()) * mdp->mdp.initial_dist().dot(mdp->profile.v_star);
    return LPO_OK;
  });
}

void lpo_mdp_free(lpo_mdp* mdp) { delete mdp; }

lpo_status lpo_dist_from_json(const char* json, lpo_dist** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "json and out must be non-null");
    *out = new lpo_dist{lpoff::dist_from_json(json)};
    return LPO_OK;
  });
}

lpo_status lpo_dist_generate(const lpo_mdp* mdp, double alpha, uint64_t seed, lpo_dist** out) {
  return guarded([&] {
    require(mdp != nullptr && out != nullptr, "mdp and out must be non-null");
    *out = new lpo_dist{lpoff::generate_mu(mdp->mdp, mdp->profile, alpha, seed)};
    return LPO_OK;
  });
}

lpo_status lpo_dist_to_json(const lpo_dist* dist, char** out) {
  return guarded([&] {
    require(dist != nullptr && out != nullptr, "dist and out must be non-null");
    *out = copy_string(lpoff::dist_to_json(dist->dist));
    return LPO_OK;
  });
}

void lpo_dist_free(lpo_dist* dist) { delete dist; }

lpo_status lpo_dataset_sample(const lpo_mdp* mdp, const lpo_dist* dist, int64_t n, uint64_t seed,
                              lpo_dataset** out) {
  return guarded([&] {
    check_pair(mdp, dist);
    require(out != nullptr, "out must be non-null");
    *out = new lpo_dataset{lpoff::sample_dataset(mdp->mdp, dist->dist, n, seed)};
    return LPO_OK;
  });
}

lpo_status lpo_dataset_from_csv(const char* csv, lpo_dataset** out) {
  return guarded([&] {
    require(csv != nullptr && out != nullptr, "csv and out must be non-null");
    std::istringstream in(csv);
    *out = new lpo_dataset{lpoff::read_dataset_csv(in)};
    return LPO_OK;
  });
}

lpo_status lpo_dataset_to_csv(const lpo_dataset* dataset, char** out) {
  return guarded([&] {
    require(dataset != nullptr && out != nullptr, "dataset and out must be non-null");
    std::ostringstream text;
    lpoff::write_dataset_csv(dataset->data, text);
    *out = copy_string(text.str());
    return LPO_OK;
  });
}

int64_t lpo_dataset_size(const lpo_dataset* dataset) {
  return dataset != nullptr ? static_cast<int64_t>(dataset->data.size()) : 0;
}

void lpo_dataset_free(lpo_dataset* dataset) { delete dataset; }

void lpo_case1_params_default(lpo_case1_params* params) {
  if (params == nullptr) return;
  params->b_w = std::nan("");
  params->delta = 0.05;
  params->mode = LPO_THRESHOLD_TABULAR;
  params->epsilon = 0.0;
  params->log_card_b = std::nan("");
  params->log_card_w = std::nan("");
  params->n = 0;
  params->lp_dump_path = nullptr;
}

void lpo_case2_params_default(lpo_case2_params* params) {
  if (params == nullptr) return;
  params->b_w = std::nan("");
  params->delta = 0.05;
  params->log_card_w = std::nan("");
  params->log_card_v = std::nan("");
  params->n = 0;
  params->lp_dump_path = nullptr;
}

lpo_status lpo_solve_case1(const lpo_mdp* mdp, const lpo_dist* dist, const lpo_dataset* dataset,
                           const lpo_case1_params* params, char** report_json) {
  return guarded([&] {
    check_pair(mdp, dist);
    require(params != nullptr && report_json != nullptr, "params and report must be non-null");
    const Case1Run run = run_case1(mdp, dist, dataset, *params);
    *report_json = copy_string(run.report);
    if (run.sol.status == lpoff::LpStatus::kInfeasible) {
      g_last_error = "budgeted LP is infeasible";
      return LPO_ERR_INFEASIBLE;
    }
    if (!run.sol.optimal()) {
      g_last_error = "LP solve ended with status " + lpoff::to_string(run.sol.status);
      return LPO_ERR_NUMERIC;
    }
    return LPO_OK;
  });
}

lpo_status lpo_solve_case2(const lpo_mdp* mdp, const lpo_dist* dist, const lpo_dataset* dataset,
                           const lpo_case2_params* params, char** report_json) {
  return guarded([&] {
    check_pair(mdp, dist);
    require(params != nullptr && report_json != nullptr, "params and report must be non-null");
    const Case2Run run = run_case2(mdp, dist, dataset, *params);
    *report_json = copy_string(run.report);
    if (run.sol.violating_state >= 0 || run.sol.status == lpoff::LpStatus::kInfeasible) {
      g_last_error = "minimax LP is infeasible";
      if (run.sol.violating_state >= 0)
        g_last_error += " (state " + std::to_string(run.sol.violating_state) + ")";
      return LPO_ERR_INFEASIBLE;
    }
    if (!run.sol.optimal()) {
      g_last_error = "LP solve ended with status " + lpoff::to_string(run.sol.status);
      return LPO_ERR_NUMERIC;
    }
    return LPO_OK;
  });
}

lpo_status lpo_check(const lpo_mdp* mdp, const lpo_dist* dist, const lpo_dataset* dataset,
                     const lpo_case1_params* case1, const lpo_case2_params* case2,
                     char** report_json) {
  return guarded([&] {
    check_pair(mdp, dist);
    require(case1 != nullptr && case2 != nullptr && report_json != nullptr,
            "params and report must be non-null");
    const Case1Run run1 = run_case1(mdp, dist, dataset, *case1);
    const Case2Run run2 = run_case2(mdp, dist, dataset, *case2);
    if (!run2.sol.optimal()) {
      g_last_error = "minimax LP did not solve; nothing to audit";
      return run2.sol.violating_state >= 0 || run2.sol.status == lpoff::LpStatus::kInfeasible
                 ? LPO_ERR_INFEASIBLE
                 : LPO_ERR_NUMERIC;
    }
    std::optional<lpoff::Case1Evidence> evidence;
    if (run1.sol.optimal()) evidence = lpoff::Case1Evidence{run1.sol.w_d, run1.sol.epsilon};
    const auto report =
        lpoff::check_suite(mdp->mdp, dist->dist, mdp->profile, run2.coverage, run2.model, run2.cfg,
                           run2.sol.w_d, dataset != nullptr ? run2.n : 0, evidence);
    std::string text = "{\n\"case1\": " + run1.report + ",\n\"case2\": " + run2.report +
                       ",\n\"audit\": " + lpoff::audit_report_json(report, &run2.coverage) + "\n}\n";
    *report_json = copy_string(text);
    if (!report.all_pass()) {
      g_last_error = "audit failed";
      return LPO_ERR_AUDIT_FAILED;
    }
    return LPO_OK;
  });
}

lpo_status lpo_sweep(const char* config_json, char** csv) {
  return guarded([&] {
    require(config_json != nullptr && csv != nullptr, "config and out must be non-null");
    const auto config = lpoff::config_from_json(config_json);
    std::ostringstream text;
    lpoff::write_sweep_csv(lpoff::run_sweep(config), text);
    *csv = copy_string(text.str());
    return LPO_OK;
  });
}

lpo_status lpo_fit_rate(const char* csv, int case_id, char** result_json) {
  return guarded([&] {
    require(csv != nullptr && result_json != nullptr, "csv and out must be non-null");
    require(case_id == 1 || case_id == 2, "case_id must be 1 or 2");
    std::istringstream in(csv);
    const auto fit = lpoff::fit_rate(lpoff::read_sweep_csv(in), case_id);
    *result_json = copy_string(lpoff::rate_fit_json(fit));
    return LPO_OK;
  });
}

}  // extern "C"
