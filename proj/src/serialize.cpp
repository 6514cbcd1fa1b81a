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

#include "lpoff/serialize.hpp"

#include "json.hpp"

#include <cmath>
#include <set>

namespace lpoff {

namespace {

using Json = nlohmann::ordered_json;

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double read_number(const Json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::nan("");
  }
  if (j.is_null()) return std::nan("");
  throw ParseError("field '" + key + "' must be a number");
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Vector read_vector(const Json& j, const std::string& key) {
  if (!j.is_array()) throw ParseError("field '" + key + "' must be an array");
  Vector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = read_number(j[i], key);
  return out;
}

Json policy_json(const Policy& policy) {
  Json out = Json::array();
  for (int s = 0; s < policy.num_states(); ++s)
    out.push_back(vector_json(policy.probs().row(s).transpose()));
  return out;
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

const Json& require(const Json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError("missing field '" + key + "'");
  return j.at(key);
}

template <typename T>
T read_integer(const Json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ParseError("field '" + key + "' must be an integer");
  return j.get<T>();
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + " must be a JSON object");
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ParseError("unknown key '" + item.key() + "' in " + where);
}

/// Wraps library exceptions raised while building objects from parsed data.
template <typename F>
auto converting(F&& make) {
  try {
    return make();
  } catch (const Json::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

std::string mdp_to_json(const TabularMdp& mdp) {
  Json j;
  j["num_states"] = mdp.num_states();
  j["num_actions"] = mdp.num_actions();
  j["gamma"] = mdp.discount();
  Json transition = Json::array();
  for (int i = 0; i < mdp.num_pairs(); ++i)
    for (int s = 0; s < mdp.num_states(); ++s) transition.push_back(mdp.transition()(i, s));
  j["transition"] = std::move(transition);
  j["reward"] = vector_json(mdp.reward());
  j["initial_dist"] = vector_json(mdp.initial_dist());
  return j.dump(2);
}

TabularMdp mdp_from_json(std::string_view text) {
  const Json j = parse(text);
  return converting([&] {
    reject_unknown(j, {"num_states", "num_actions", "gamma", "transition", "reward", "initial_dist"},
                   "MDP");
    const int ns = read_integer<int>(require(j, "num_states"), "num_states");
    const int na = read_integer<int>(require(j, "num_actions"), "num_actions");
    if (ns < 1 || na < 1) throw InvalidArgument("num_states and num_actions must be >= 1");
    const Vector flat = read_vector(require(j, "transition"), "transition");
    if (flat.size() != static_cast<Eigen::Index>(ns) * na * ns)
      throw InvalidArgument("transition must have |S|*|A|*|S| entries");
    Matrix transition(ns * na, ns);
    for (int i = 0; i < ns * na; ++i)
      for (int s = 0; s < ns; ++s) transition(i, s) = flat(i * ns + s);
    return TabularMdp(ns, na, std::move(transition), read_vector(require(j, "reward"), "reward"),
                      read_number(require(j, "gamma"), "gamma"),
                      read_vector(require(j, "initial_dist"), "initial_dist"));
  });
}

std::string dist_to_json(const DataDistribution& dist) {
  Json j;
  j["num_actions"] = dist.num_actions();
  j["mu"] = vector_json(dist.mu());
  return j.dump(2);
}

DataDistribution dist_from_json(std::string_view text) {
  const Json j = parse(text);
  return converting([&] {
    reject_unknown(j, {"num_actions", "mu"}, "data distribution");
    return DataDistribution(read_vector(require(j, "mu"), "mu"),
                            read_integer<int>(require(j, "num_actions"), "num_actions"));
  });
}

namespace {

void add_context(Json& j, const ReportContext& ctx) {
  if (!std::isnan(ctx.subopt)) j["subopt"] = number(ctx.subopt);
  if (!std::isnan(ctx.b_w)) j["b_w"] = number(ctx.b_w);
}

}  // namespace

std::string case1_report_json(const Case1Solution& sol, const ReportContext& ctx,
                              const TabularThresholdVariants* variants) {
  Json j;
  j["status"] = to_string(sol.status);
  j["w"] = sol.optimal() ? vector_json(sol.w_d) : Json::array();
  j["l1_residual"] = number(sol.l1_residual);
  j["objective"] = number(sol.objective);
  j["policy"] = sol.policy ? policy_json(*sol.policy) : Json::array();
  j["bound_rhs"] = number(sol.bound_rhs);
  j["epsilon"] = number(sol.epsilon);
  j["iterations"] = sol.iterations;
  add_context(j, ctx);
  if (variants != nullptr) {
    j["threshold_variants"] = {{"display", number(variants->display)},
                               {"proof", number(variants->proof)},
                               {"bound", number(variants->bound)}};
  }
  return j.dump(2);
}

std::string case2_report_json(const Case2Solution& sol, double bound_rhs, const ReportContext& ctx) {
  Json j;
  j["status"] = sol.violating_state >= 0 ? "infeasible" : to_string(sol.status);
  if (sol.violating_state >= 0) j["violating_state"] = sol.violating_state;
  j["w"] = sol.optimal() ? vector_json(sol.w_d) : Json::array();
  j["l1_residual"] = number(sol.l1_residual);
  j["objective"] = number(sol.objective);
  j["policy"] = sol.policy ? policy_json(*sol.policy) : Json::array();
  j["bound_rhs"] = number(bound_rhs);
  j["epsilon"] = nullptr;
  j["iterations"] = sol.iterations;
  j["ell_emp"] = number(sol.ell_emp);
  j["delta_emp"] = number(sol.delta_emp);
  j["delta_pop"] = number(sol.delta_pop);
  j["inactive_mass"] = number(sol.inactive_mass);
  j["delta_q"] = number(ctx.delta_q);
  j["c_max"] = number(ctx.c_max);
  add_context(j, ctx);
  return j.dump(2);
}

std::string audit_report_json(const AuditReport& report, const CoverageAudit* coverage) {
  Json j;
  j["all_pass"] = report.all_pass();
  if (coverage != nullptr) {
    Json c;
    c["c_star"] = number(coverage->c_star);
    c["c_star_mu"] = number(coverage->c_star_mu);
    c["c_max"] = number(coverage->c_max.value);
    c["c_max_enumeration_lower_bound"] = number(coverage->c_max.enumeration_lower_bound);
    c["c_mu"] = number(coverage->c_mu);
    c["s0"] = coverage->s0;
    c["spc_holds"] = coverage->spc_holds;
    c["spc_plus_holds"] = coverage->spc_plus_holds;
    j["coverage"] = std::move(c);
  }
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"check_id", c.check_id},
                      {"statement", c.statement},
                      {"lhs", number(c.lhs)},
                      {"rhs", number(c.rhs)},
                      {"slack", number(c.slack)},
                      {"pass", c.pass}});
  }
  j["checks"] = std::move(checks);
  return j.dump(2);
}

std::string to_string(CaseSelection cases) {
  switch (cases) {
    case CaseSelection::kOne: return "one";
    case CaseSelection::kTwo: return "two";
    case CaseSelection::kBoth: return "both";
  }
  return "both";
}

CaseSelection case_selection_from_string(std::string_view name) {
  if (name == "one" || name == "1") return CaseSelection::kOne;
  if (name == "two" || name == "2") return CaseSelection::kTwo;
  if (name == "both") return CaseSelection::kBoth;
  throw ParseError("case must be one, two or both");
}

std::string to_string(ThresholdMode mode) {
  switch (mode) {
    case ThresholdMode::kGeneral: return "general";
    case ThresholdMode::kTabular: return "tabular";
    case ThresholdMode::kExplicit: return "explicit";
  }
  return "tabular";
}

ThresholdMode threshold_mode_from_string(std::string_view name) {
  if (name == "general") return ThresholdMode::kGeneral;
  if (name == "tabular") return ThresholdMode::kTabular;
  if (name == "explicit") return ThresholdMode::kExplicit;
  throw ParseError("threshold must be general, tabular or explicit");
}

ExperimentConfig config_from_json(std::string_view text, const ExperimentConfig& base) {
  const Json j = parse(text);
  return converting([&] {
    reject_unknown(j,
                   {"mdp_spec", "coverage_alpha", "n_grid", "num_seeds", "first_seed", "delta", "b_w",
                    "case", "threshold", "log_card_w", "log_card_v", "population", "threads",
                    "output_path"},
                   "experiment config");
    ExperimentConfig cfg = base;
    if (j.contains("mdp_spec")) {
      const Json& spec = j.at("mdp_spec");
      reject_unknown(spec, {"num_states", "num_actions", "gamma", "branching_factor", "seed"},
                     "mdp_spec");
      if (spec.contains("num_states"))
        cfg.mdp_spec.num_states = read_integer<int>(spec.at("num_states"), "num_states");
      if (spec.contains("num_actions"))
        cfg.mdp_spec.num_actions = read_integer<int>(spec.at("num_actions"), "num_actions");
      if (spec.contains("gamma")) cfg.mdp_spec.gamma = read_number(spec.at("gamma"), "gamma");
      if (spec.contains("branching_factor"))
        cfg.mdp_spec.branching_factor =
            read_integer<int>(spec.at("branching_factor"), "branching_factor");
      if (spec.contains("seed"))
        cfg.mdp_spec.seed = read_integer<std::uint64_t>(spec.at("seed"), "seed");
    }
    if (j.contains("coverage_alpha"))
      cfg.coverage_alpha = read_number(j.at("coverage_alpha"), "coverage_alpha");
    if (j.contains("n_grid")) {
      cfg.n_grid.clear();
      if (!j.at("n_grid").is_array()) throw ParseError("field 'n_grid' must be an array");
      for (const auto& n : j.at("n_grid")) cfg.n_grid.push_back(read_integer<std::int64_t>(n, "n_grid"));
    }
    if (j.contains("num_seeds")) cfg.num_seeds = read_integer<int>(j.at("num_seeds"), "num_seeds");
    if (j.contains("first_seed"))
      cfg.first_seed = read_integer<std::uint64_t>(j.at("first_seed"), "first_seed");
    if (j.contains("delta")) cfg.delta = read_number(j.at("delta"), "delta");
    if (j.contains("b_w")) cfg.b_w = read_number(j.at("b_w"), "b_w");
    if (j.contains("case")) cfg.cases = case_selection_from_string(j.at("case").get<std::string>());
    if (j.contains("threshold"))
      cfg.threshold = threshold_mode_from_string(j.at("threshold").get<std::string>());
    if (j.contains("log_card_w")) cfg.log_card_w = read_number(j.at("log_card_w"), "log_card_w");
    if (j.contains("log_card_v")) cfg.log_card_v = read_number(j.at("log_card_v"), "log_card_v");
    if (j.contains("population")) cfg.population = j.at("population").get<bool>();
    if (j.contains("threads")) cfg.threads = read_integer<int>(j.at("threads"), "threads");
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
    return cfg;
  });
}

std::string config_to_json(const ExperimentConfig& config) {
  Json j;
  j["mdp_spec"] = {{"num_states", config.mdp_spec.num_states},
                   {"num_actions", config.mdp_spec.num_actions},
                   {"gamma", config.mdp_spec.gamma},
                   {"branching_factor", config.mdp_spec.branching_factor},
                   {"seed", config.mdp_spec.seed}};
  j["coverage_alpha"] = config.coverage_alpha;
  j["n_grid"] = config.n_grid;
  j["num_seeds"] = config.num_seeds;
  j["first_seed"] = config.first_seed;
  j["delta"] = config.delta;
  j["b_w"] = number(config.b_w);
  j["case"] = to_string(config.cases);
  j["threshold"] = to_string(config.threshold);
  j["log_card_w"] = number(config.log_card_w);
  j["log_card_v"] = number(config.log_card_v);
  j["population"] = config.population;
  j["threads"] = config.threads;
  j["output_path"] = config.output_path;
  return j.dump(2);
}

std::string rate_fit_json(const RateFit& fit) {
  Json j;
  j["verdict"] = fit.verdict();
  j["slope"] = number(fit.slope);
  j["intercept"] = number(fit.intercept);
  j["saturated"] = fit.saturated;
  j["nonincreasing"] = fit.nonincreasing;
  j["unsaturated_points"] = fit.unsaturated_points;
  Json medians = Json::array();
  for (const auto& [n, med] : fit.medians) medians.push_back({{"n", n}, {"median_subopt", number(med)}});
  j["medians"] = std::move(medians);
  return j.dump(2);
}

}  // namespace lpoff
