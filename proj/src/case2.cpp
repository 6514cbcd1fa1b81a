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

#include "lpoff/case2.hpp"

#include <cmath>
#include <string>

namespace lpoff {

namespace {

Vector residual(const EmpiricalModel& model, const Vector& w, const Vector& rho) {
  if (w.size() != model.num_pairs() || rho.size() != model.num_states)
    throw InvalidArgument("dimension mismatch in the minimax objective");
  return model.k_d * w - (1.0 - model.discount) * rho;
}

void check_pi_mu(const EmpiricalModel& model, const Policy& pi_mu) {
  if (pi_mu.num_states() != model.num_states || pi_mu.num_actions() != model.num_actions)
    throw InvalidArgument("pi_mu does not match the model");
}

double log_cards(const Case2Config& cfg) {
  if (std::isnan(cfg.log_card_w) || std::isnan(cfg.log_card_v))
    throw InvalidArgument("class cardinalities are not resolved");
  return cfg.log_card_w + cfg.log_card_v - std::log(cfg.delta);
}

}  // namespace

void Case2Config::validate() const {
  if (!(b_w >= 1.0)) throw InvalidArgument("B_w must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
}

Case2Config Case2Config::resolved(int num_states, int num_actions) const {
  Case2Config out = *this;
  if (std::isnan(out.log_card_w)) out.log_card_w = num_states * num_actions * std::log(2.0);
  if (std::isnan(out.log_card_v)) out.log_card_v = num_states * std::log(2.0);
  return out;
}

double value_box_radius(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in [0,1)");
  return 1.0 / (1.0 - gamma);
}

double ell(const EmpiricalModel& model, const Vector& w, const Vector& v, const Vector& rho) {
  const Vector res = residual(model, w, rho);
  if (v.size() != res.size()) throw InvalidArgument("v length mismatch");
  return -model.u_d.dot(w) + v.dot(res);
}

InnerMax inner_max(const EmpiricalModel& model, const Vector& w, const Vector& rho) {
  const Vector res = residual(model, w, rho);
  const double radius = value_box_radius(model.discount);
  InnerMax out;
  out.v = res.unaryExpr([radius](double x) { return x < 0.0 ? -radius : radius; });
  out.value = -model.u_d.dot(w) + radius * res.lpNorm<1>();
  return out;
}

bool in_case2_class(const Vector& w, const Policy& pi_mu, double b_w, double gamma, double tol) {
  const int na = pi_mu.num_actions();
  if (w.size() != pi_mu.num_states() * na) return false;
  if (w.minCoeff() < -tol || w.maxCoeff() > b_w + tol) return false;
  for (int s = 0; s < pi_mu.num_states(); ++s) {
    double mass = 0.0;
    for (int a = 0; a < na; ++a) mass += w(s * na + a) * pi_mu(s, a);
    if (mass < (1.0 - gamma) - tol) return false;
  }
  return true;
}

Case2Solution solve_case2(const EmpiricalModel& model, const Policy& pi_mu, const Case2Config& cfg,
                          const LpOptions& lp_options) {
  cfg.validate();
  check_pi_mu(model, pi_mu);
  const int ns = model.num_states;
  const int na = model.num_actions;
  const int m = model.num_pairs();
  const double gamma = model.discount;
  const double radius = value_box_radius(gamma);

  Case2Solution out;
  // With w capped at B_w the largest attainable lower-bound mass in s is
  // B_w * sum_a pi_mu(a|s).
  for (int s = 0; s < ns; ++s) {
    if (cfg.b_w * pi_mu.probs().row(s).sum() < (1.0 - gamma) - lp_options.feas_tol) {
      out.violating_state = s;
      return out;
    }
  }

  LinearProgram& lp = out.program;
  lp = LinearProgram(Sense::kMinimize);
  std::vector<int> w_vars(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    w_vars[static_cast<std::size_t>(i)] = lp.add_variable(-model.u_d(i), 0.0, cfg.b_w);
  for (int s = 0; s < ns; ++s) {
    std::vector<Term> lower;
    for (int a = 0; a < na; ++a) {
      if (pi_mu(s, a) != 0.0) lower.push_back({w_vars[static_cast<std::size_t>(s * na + a)], pi_mu(s, a)});
    }
    lp.add_constraint(std::move(lower), Relation::kGreaterEqual, 1.0 - gamma);
  }
  add_l1_epigraph(lp, w_vars, model.k_d, (1.0 - gamma) * model.mu_d_state,
                  L1Budget::weighted(radius));

  const LpSolution sol = solve_lp(lp, lp_options);
  out.status = sol.status;
  out.iterations = sol.iterations;
  if (!sol.optimal()) return out;

  out.w_d = sol.x.head(m).cwiseMax(0.0).cwiseMin(cfg.b_w);
  out.objective = sol.objective_value;
  const InnerMax inner = inner_max(model, out.w_d, model.mu_d_state);
  out.ell_emp = inner.value;
  out.delta_emp = inner.value - out.objective;
  out.l1_residual = residual(model, out.w_d, model.mu_d_state).lpNorm<1>();
  out.policy = extract_policy_case2(out.w_d, pi_mu);
  return out;
}

double case2_min_value(const EmpiricalModel& model, const Policy& pi_mu, const Case2Config& cfg) {
  const Case2Solution sol = solve_case2(model, pi_mu, cfg);
  if (!sol.optimal()) {
    throw NumericError("minimax LP did not solve: " +
                       (sol.violating_state >= 0
                            ? "lower bound unattainable in state " + std::to_string(sol.violating_state)
                            : to_string(sol.status)));
  }
  return sol.objective;
}

double primal_gap(const EmpiricalModel& model, const Vector& w, const Policy& pi_mu,
                  const Case2Config& cfg, std::optional<double> min_value) {
  check_pi_mu(model, pi_mu);
  if (!in_case2_class(w, pi_mu, cfg.b_w, model.discount))
    throw InvalidArgument("primal_gap: w is outside the weight class");
  const double minimum = min_value ? *min_value : case2_min_value(model, pi_mu, cfg);
  return inner_max(model, w, model.mu_d_state).value - minimum;
}

Policy extract_policy_case2(const Vector& w, const Policy& pi_mu) {
  const int ns = pi_mu.num_states();
  const int na = pi_mu.num_actions();
  if (w.size() != ns * na) throw InvalidArgument("w length mismatch");
  if (w.size() > 0 && w.minCoeff() < 0.0) throw InvalidArgument("w must be nonnegative");
  Matrix probs(ns, na);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) probs(s, a) = w(s * na + a) * pi_mu(s, a);
    const double total = probs.row(s).sum();
    if (total > 0.0)
      probs.row(s) /= total;
    else
      probs.row(s).setConstant(1.0 / na);
  }
  return Policy(std::move(probs));
}

Case2Bound bound_main2(const Case2Config& cfg, double gamma, double c_max, double delta_q,
                       std::int64_t n, double c_mu) {
  if (n < 1) throw InvalidArgument("sample size must be >= 1");
  if (!(delta_q > 0.0)) throw InvalidArgument("action gap must be positive");
  if (delta_q == kInfinity) return {0.0, true};
  const double one_minus = 1.0 - gamma;
  const double value = 8.0 * std::sqrt(2.0) * cfg.b_w * c_max /
                       (delta_q * one_minus * one_minus * one_minus) *
                       std::sqrt(log_cards(cfg)) / std::sqrt(static_cast<double>(n));
  return {value * c_mu, false};
}

double generalization_radius(const Case2Config& cfg, double gamma, std::int64_t n) {
  if (n < 1) throw InvalidArgument("sample size must be >= 1");
  return 4.0 * std::sqrt(2.0) * cfg.b_w * std::sqrt(log_cards(cfg)) /
         ((1.0 - gamma) * std::sqrt(static_cast<double>(n)));
}

double inactive_mass(const Vector& w, const Vector& mu, const std::vector<bool>& inactive) {
  if (w.size() != mu.size() || static_cast<std::size_t>(w.size()) != inactive.size())
    throw InvalidArgument("inactive_mass: dimension mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (inactive[static_cast<std::size_t>(i)]) total += w(i) * mu(i);
  return total;
}

}  // namespace lpoff
