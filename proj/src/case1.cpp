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

#include "lpoff/case1.hpp"

#include <cmath>
#include <vector>

namespace lpoff {

namespace {

void check_n(std::int64_t n) {
  if (n < 1) throw InvalidArgument("sample size must be >= 1");
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
}

double sqrt_n(std::int64_t n) { return std::sqrt(static_cast<double>(n)); }

}  // namespace

void Case1Config::validate() const {
  if (!(b_w >= 1.0)) throw InvalidArgument("B_w must be >= 1");
  check_delta(delta);
  if (mode == ThresholdMode::kExplicit && !(epsilon >= 0.0))
    throw InvalidArgument("explicit epsilon must be >= 0");
}

Case1Config Case1Config::resolved(int num_states, int num_actions) const {
  Case1Config out = *this;
  if (std::isnan(out.log_card_b)) out.log_card_b = num_states * std::log(2.0);
  if (std::isnan(out.log_card_w)) out.log_card_w = num_states * std::log(num_actions + 1.0);
  return out;
}

double threshold_general(const Case1Config& cfg, std::int64_t n) {
  check_n(n);
  check_delta(cfg.delta);
  if (std::isnan(cfg.log_card_b) || std::isnan(cfg.log_card_w))
    throw InvalidArgument("threshold_general needs resolved class cardinalities");
  const double log_term = cfg.log_card_b + cfg.log_card_w - std::log(cfg.delta);
  return cfg.b_w * std::sqrt(2.0 * log_term) / sqrt_n(n);
}

double threshold_tabular(double b_w, int num_states, int num_actions, double delta,
                         std::int64_t n) {
  check_n(n);
  check_delta(delta);
  return b_w * std::sqrt(static_cast<double>(num_states)) *
         std::log(2.0 * num_actions + 2.0) * std::log(1.0 / delta) / sqrt_n(n);
}

TabularThresholdVariants tabular_threshold_variants(double b_w, int num_states, int num_actions,
                                                    double delta, std::int64_t n) {
  check_n(n);
  check_delta(delta);
  const double ns = num_states;
  const double log_a = std::log(2.0 * num_actions + 2.0);
  TabularThresholdVariants out;
  out.display = threshold_tabular(b_w, num_states, num_actions, delta, n);
  out.proof = 2.0 * b_w * std::sqrt(ns * std::log((2.0 * num_actions + 2.0) / delta)) / sqrt_n(n);
  out.bound = b_w * std::sqrt(ns * log_a * std::log(1.0 / delta)) / sqrt_n(n);
  return out;
}

double case1_epsilon(const Case1Config& cfg, int num_states, int num_actions, std::int64_t n) {
  switch (cfg.mode) {
    case ThresholdMode::kGeneral:
      return threshold_general(cfg.resolved(num_states, num_actions), n);
    case ThresholdMode::kTabular:
      return threshold_tabular(cfg.b_w, num_states, num_actions, cfg.delta, n);
    case ThresholdMode::kExplicit:
      return cfg.epsilon;
  }
  return cfg.epsilon;
}

double bound_main1(const Case1Config& cfg, int num_states, int num_actions, std::int64_t n,
                   double gamma) {
  check_n(n);
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in [0,1)");
  if (cfg.mode == ThresholdMode::kGeneral)
    return 2.0 * threshold_general(cfg.resolved(num_states, num_actions), n) / (1.0 - gamma);
  const auto variants = tabular_threshold_variants(cfg.b_w, num_states, num_actions, cfg.delta, n);
  return 2.0 * variants.bound / (1.0 - gamma);
}

Vector sign_vector(const EmpiricalModel& model, const Vector& w, const Vector& mu0) {
  const Vector residual = model.k_d * w - (1.0 - model.discount) * mu0;
  return residual.unaryExpr([](double x) { return x < 0.0 ? -1.0 : 1.0; });
}

LpSolution solve_occupancy_lp(const TabularMdp& mdp, const Vector& rho,
                              const LpOptions& lp_options) {
  if (rho.size() != mdp.num_states()) throw InvalidArgument("rho length mismatch");
  LinearProgram lp(Sense::kMaximize);
  for (int i = 0; i < mdp.num_pairs(); ++i) lp.add_variable(mdp.reward()(i));
  const Matrix m = build_M(mdp);
  for (int s = 0; s < mdp.num_states(); ++s)
    lp.add_dense_constraint(Vector(m.row(s).transpose()), Relation::kEqual,
                          (1.0 - mdp.discount()) * rho(s));
  return solve_lp(lp, lp_options);
}

Case1Solution solve_case1(const EmpiricalModel& model, const Vector& mu0, const Policy& pi_mu,
                          const Case1Config& cfg, std::int64_t n,
                          const LpOptions& lp_options) {
  cfg.validate();
  const int ns = model.num_states;
  const int na = model.num_actions;
  const int m = model.num_pairs();
  if (mu0.size() != ns || pi_mu.num_states() != ns || pi_mu.num_actions() != na)
    throw InvalidArgument("solve_case1: dimension mismatch");

  Case1Solution out;
  out.epsilon = case1_epsilon(cfg, ns, na, n);
  if (!(out.epsilon >= 0.0)) throw InvalidArgument("epsilon must be >= 0");
  out.bound_rhs = bound_main1(cfg, ns, na, n, model.discount);

  LinearProgram& lp = out.program;
  lp = LinearProgram(Sense::kMaximize);
  std::vector<int> w_vars(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) w_vars[static_cast<std::size_t>(i)] = lp.add_variable(model.u_d(i));
  for (int s = 0; s < ns; ++s) {
    std::vector<Term> cap;
    for (int a = 0; a < na; ++a) cap.push_back({w_vars[static_cast<std::size_t>(s * na + a)], 1.0});
    lp.add_constraint(std::move(cap), Relation::kLessEqual, cfg.b_w);
  }
  add_l1_epigraph(lp, w_vars, model.k_d, (1.0 - model.discount) * mu0,
                  L1Budget::summed(out.epsilon));

  const LpSolution sol = solve_lp(lp, lp_options);
  out.status = sol.status;
  out.iterations = sol.iterations;
  if (!sol.optimal()) return out;

  out.w_d = sol.x.head(m);
  out.objective = model.u_d.dot(out.w_d);
  out.l1_residual = (model.k_d * out.w_d - (1.0 - model.discount) * mu0).lpNorm<1>();
  out.theta_tilde = OccupancyMeasure{Vector(m), na};
  for (int s = 0; s < ns; ++s)
    for (int a = 0; a < na; ++a)
      out.theta_tilde.values(s * na + a) = out.w_d(s * na + a) * pi_mu(s, a);
  out.policy = policy_from_theta(out.theta_tilde);
  return out;
}

}  // namespace lpoff
