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

#include "lpoff/diagnostics.hpp"

#include "lpoff/lp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lpoff {

namespace {

using Choices = std::vector<std::vector<int>>;

/// Number of elements of the product of `choices`, saturating at limit + 1.
std::int64_t product_size(const Choices& choices, std::int64_t limit) {
  std::int64_t total = 1;
  for (const auto& c : choices) {
    total *= static_cast<std::int64_t>(c.size());
    if (total > limit) return limit + 1;
  }
  return total;
}

/// Calls `visit` with every action profile in the product of `choices`.
void for_each_profile(const Choices& choices, const std::function<void(const std::vector<int>&)>& visit) {
  if (choices.empty()) return;
  for (const auto& c : choices)
    if (c.empty()) return;
  std::vector<std::size_t> idx(choices.size(), 0);
  std::vector<int> actions(choices.size());
  while (true) {
    for (std::size_t s = 0; s < choices.size(); ++s) actions[s] = choices[s][idx[s]];
    visit(actions);
    std::size_t s = 0;
    while (s < choices.size() && ++idx[s] == choices[s].size()) idx[s++] = 0;
    if (s == choices.size()) return;
  }
}

bool covered(const DataDistribution& dist, int s, int a) {
  return dist.mu()(s * dist.num_actions() + a) > kSupportTol;
}

/// Optimal actions of s that an occupancy restricted to mu-policies may use.
std::vector<int> allowed_actions(const OptimalityProfile& profile, const DataDistribution& dist,
                                 int s) {
  const auto& opt = profile.argmax_sets[static_cast<std::size_t>(s)];
  if (!dist.in_support(s)) return opt;
  std::vector<int> out;
  for (int a : opt)
    if (covered(dist, s, a)) out.push_back(a);
  return out;
}

/// max_s theta(s)/mu(s) with 0/0 = 0.
double state_concentrability(const Vector& theta_state, const Vector& mu_state) {
  double best = 0.0;
  for (Eigen::Index s = 0; s < theta_state.size(); ++s) {
    if (theta_state(s) <= kSupportTol) continue;
    if (mu_state(s) <= kSupportTol) return kInfinity;
    best = std::max(best, theta_state(s) / mu_state(s));
  }
  return best;
}

AuditCheck make_check(std::string id, std::string statement, double lhs, double rhs) {
  AuditCheck c;
  c.check_id = std::move(id);
  c.statement = std::move(statement);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = (rhs == kInfinity) ? kInfinity : rhs - lhs;
  c.pass = c.slack >= -kAuditTolerance;
  return c;
}

}  // namespace

double compute_c_star(const TabularMdp& mdp, const OptimalityProfile& profile,
                      const DataDistribution& dist, const Vector& rho) {
  if (dist.mu().size() != mdp.num_pairs()) throw InvalidArgument("mu does not match the MDP");
  const Choices& choices = profile.argmax_sets;
  if (product_size(choices, kMaxEnumeratedPolicies) > kMaxEnumeratedPolicies)
    throw InvalidArgument("too many deterministic optimal policies to enumerate");
  double best = kInfinity;
  for_each_profile(choices, [&](const std::vector<int>& actions) {
    const auto theta = occupancy_measure(mdp, Policy::deterministic(actions, mdp.num_actions()), rho);
    best = std::min(best, concentrability(theta.values, dist.mu()));
  });
  return best;
}

CMaxResult compute_c_max(const TabularMdp& mdp, const OptimalityProfile& profile,
                         const DataDistribution& dist) {
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  const int m = mdp.num_pairs();
  if (dist.mu().size() != m) throw InvalidArgument("mu does not match the MDP");
  const Vector& mu_state = dist.state_marginal();
  const Matrix big_m = build_M(mdp);

  LinearProgram lp(Sense::kMaximize);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      const bool blocked = !profile.is_active(s, a) || (dist.in_support(s) && !covered(dist, s, a));
      lp.add_variable(0.0, 0.0, blocked ? 0.0 : kInfinity);
    }
  }
  for (int s = 0; s < ns; ++s)
    lp.add_dense_constraint(Vector(big_m.row(s).transpose()), Relation::kEqual,
                             (1.0 - mdp.discount()) * mu_state(s));

  CMaxResult out;
  out.per_state = Vector::Zero(ns);
  for (int s = 0; s < ns; ++s) {
    for (int i = 0; i < m; ++i) lp.set_cost(i, i / na == s ? 1.0 : 0.0);
    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::kInfeasible) {
      out.feasible = false;
      out.value = kInfinity;
      out.per_state.setConstant(kInfinity);
      break;
    }
    if (!sol.optimal()) throw NumericError("C_max LP failed: " + to_string(sol.status));
    const double mass = std::max(sol.objective_value, 0.0);
    if (mu_state(s) > kSupportTol)
      out.per_state(s) = mass / mu_state(s);
    else
      out.per_state(s) = mass > kSupportTol ? kInfinity : 0.0;
  }
  if (out.feasible) out.value = out.per_state.maxCoeff();

  Choices choices(static_cast<std::size_t>(ns));
  for (int s = 0; s < ns; ++s) choices[static_cast<std::size_t>(s)] = allowed_actions(profile, dist, s);
  const std::int64_t count = product_size(choices, 4096);
  if (count <= 4096) {
    double best = 0.0;
    std::int64_t visited = 0;
    for_each_profile(choices, [&](const std::vector<int>& actions) {
      const auto theta = occupancy_measure(mdp, Policy::deterministic(actions, na), mu_state);
      best = std::max(best, state_concentrability(theta.state_marginal(), mu_state));
      ++visited;
    });
    out.policies_enumerated = visited;
    if (visited > 0) out.enumeration_lower_bound = best;
  }
  return out;
}

bool is_mu_policy(const Policy& policy, const DataDistribution& dist) {
  if (policy.num_states() != dist.num_states() || policy.num_actions() != dist.num_actions())
    throw InvalidArgument("policy does not match the data distribution");
  for (int s = 0; s < policy.num_states(); ++s) {
    if (!dist.in_support(s)) continue;
    for (int a = 0; a < policy.num_actions(); ++a)
      if (policy(s, a) > kSupportTol && !covered(dist, s, a)) return false;
  }
  return true;
}

std::optional<Policy> max_mu_optimal_policy(const OptimalityProfile& profile,
                                            const DataDistribution& dist) {
  const int ns = dist.num_states();
  const int na = dist.num_actions();
  Matrix probs = Matrix::Zero(ns, na);
  for (int s = 0; s < ns; ++s) {
    const auto actions = allowed_actions(profile, dist, s);
    if (actions.empty()) return std::nullopt;
    for (int a : actions) probs(s, a) = 1.0 / static_cast<double>(actions.size());
  }
  return Policy(std::move(probs));
}

Policy construct_tilde_pistar(const Vector& w_d, const TabularMdp& mdp,
                              const DataDistribution& dist, const OptimalityProfile& profile) {
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  if (w_d.size() != mdp.num_pairs()) throw InvalidArgument("w length mismatch");
  const Vector theta = w_d.cwiseProduct(dist.mu());
  Matrix probs = Matrix::Zero(ns, na);
  for (int s = 0; s < ns; ++s) {
    const auto& opt = profile.argmax_sets[static_cast<std::size_t>(s)];
    if (!dist.in_support(s)) {
      probs(s, opt.front()) = 1.0;
      continue;
    }
    const auto targets = allowed_actions(profile, dist, s);
    if (targets.empty())
      throw InvalidArgument("state " + std::to_string(s) + " has no covered optimal action");
    const double total = theta.segment(s * na, na).sum();
    if (!(total > 0.0))
      throw InvalidArgument("state " + std::to_string(s) + " carries no occupancy mass");
    double moved = 0.0;
    for (int a = 0; a < na; ++a) {
      if (profile.is_active(s, a))
        probs(s, a) = theta(s * na + a);
      else
        moved += theta(s * na + a);
    }
    for (int a : targets) probs(s, a) += moved / static_cast<double>(targets.size());
    probs.row(s) /= probs.row(s).sum();
  }
  return Policy(std::move(probs));
}

CoverageAudit coverage_audit(const TabularMdp& mdp, const OptimalityProfile& profile,
                             const DataDistribution& dist) {
  CoverageAudit out;
  out.c_star = compute_c_star(mdp, profile, dist, mdp.initial_dist());
  out.c_star_mu = compute_c_star(mdp, profile, dist, dist.state_marginal());
  out.c_max = compute_c_max(mdp, profile, dist);
  out.c_mu = state_concentrability(mdp.initial_dist(), dist.state_marginal());
  for (int s = 0; s < mdp.num_states(); ++s)
    if (dist.in_support(s)) out.s0.push_back(s);
  out.spc_holds = out.c_star < kInfinity;
  if (const auto candidate = max_mu_optimal_policy(profile, dist)) {
    const auto theta = occupancy_measure(mdp, *candidate, dist.state_marginal());
    out.spc_plus_holds = concentrability(theta.values, dist.mu()) < kInfinity;
  }
  return out;
}

bool AuditReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.pass; });
}

const AuditCheck* AuditReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.check_id == id) return &c;
  return nullptr;
}

AuditReport check_suite(const TabularMdp& mdp, const DataDistribution& dist,
                        const OptimalityProfile& profile, const CoverageAudit& coverage,
                        const EmpiricalModel& model, const Case2Config& cfg,
                        const Vector& w_case2, std::int64_t n,
                        const std::optional<Case1Evidence>& case1) {
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  const double gamma = mdp.discount();
  const double scale = 1.0 - gamma;
  const Vector& mu = dist.mu();
  const Vector& mu_state = dist.state_marginal();
  const Vector& mu0 = mdp.initial_dist();
  const Policy& pi_mu = dist.behavior();
  const Matrix big_m = build_M(mdp);
  const EmpiricalModel pop = population_model(mdp, dist);
  const Case2Config resolved = cfg.resolved(ns, na);

  AuditReport report;
  auto add = [&report](AuditCheck c) { report.checks.push_back(std::move(c)); };

  const Vector theta_d = w_case2.cwiseProduct(mu);
  add(make_check("linking_u", "|u^T w - r^T (w mu)| <= 0",
                 std::abs(pop.u_d.dot(w_case2) - mdp.reward().dot(theta_d)), 0.0));
  add(make_check("linking_k", "||K w - M (w mu)||_inf <= 0",
                 (pop.k_d * w_case2 - big_m * theta_d).lpNorm<Eigen::Infinity>(), 0.0));

  const Policy pi_d = extract_policy_case2(w_case2, pi_mu);
  const auto theta_pi_d = occupancy_measure(mdp, pi_d, mu_state);
  add(make_check("validity", "||M theta_{pi_D,mu} - (1-gamma) mu||_inf <= 0",
                 (big_m * theta_pi_d.values - scale * mu_state).lpNorm<Eigen::Infinity>(), 0.0));
  {
    const Policy back = policy_from_theta(theta_pi_d);
    const Vector marginal = theta_pi_d.state_marginal();
    double worst = 0.0;
    for (int s = 0; s < ns; ++s)
      if (marginal(s) > kSupportTol)
        worst = std::max(worst, (back.probs().row(s) - pi_d.probs().row(s)).cwiseAbs().maxCoeff());
    add(make_check("round_trip", "pi_{theta_{pi,mu}} = pi on visited states", worst, 0.0));
  }
  {
    const OccupancyMeasure theta{theta_d, na};
    const auto theta_back = occupancy_measure(mdp, policy_from_theta(theta), mu_state);
    add(make_check("error_bound",
                   "|r^T (theta - theta_{pi_theta})| <= ||M theta - (1-gamma) mu||_1 / (1-gamma)",
                   std::abs(mdp.reward().dot(theta_d - theta_back.values)),
                   (big_m * theta_d - scale * mu_state).lpNorm<1>() / scale));
  }

  const Policy pi_star = profile.greedy_policy();
  const auto theta_star = occupancy_measure(mdp, pi_star, mu_state);
  add(make_check("lower_bound_occupancy", "sum_a theta_{pi*,mu}(s,a) >= (1-gamma) mu(s)",
                 (scale * mu_state - theta_star.state_marginal()).maxCoeff(), 0.0));
  {
    double mass = 0.0;
    for (int i = 0; i < mdp.num_pairs(); ++i)
      if (profile.inactive[static_cast<std::size_t>(i)]) mass += theta_star.values(i);
    add(make_check("optimal_inactive_zero", "sum_I theta_{pi*,mu} <= 0", mass, 0.0));
  }
  if (mu_state.minCoeff() > kSupportTol) {
    Vector w_star = Vector::Zero(mdp.num_pairs());
    for (int i = 0; i < mdp.num_pairs(); ++i)
      if (mu(i) > kSupportTol) w_star(i) = theta_star.values(i) / mu(i);
    double worst = -kInfinity;
    for (int s = 0; s < ns; ++s) {
      double mass = 0.0;
      for (int a = 0; a < na; ++a) mass += w_star(s * na + a) * pi_mu(s, a);
      worst = std::max(worst, scale - mass);
    }
    add(make_check("lower_bound_class", "sum_a w*(s,a) pi_mu(a|s) >= 1-gamma", worst, 0.0));
  }

  const double min_pop = case2_min_value(pop, pi_mu, cfg);
  const double delta_pop = primal_gap(pop, w_case2, pi_mu, cfg, min_pop);
  const double delta_emp = primal_gap(model, w_case2, pi_mu, cfg);
  const double mass_inactive = inactive_mass(w_case2, mu, profile.inactive);
  const double j_star_mu = return_of(mdp, pi_star, mu_state);
  const double j_d_mu = return_of(mdp, pi_d, mu_state);
  if (profile.degenerate()) {
    add(make_check("inactive_mass", "no inactive pairs", mass_inactive, kInfinity));
    add(make_check("gap_chain", "no inactive pairs", j_star_mu - j_d_mu, kInfinity));
  } else {
    add(make_check("inactive_mass", "sum_I w mu <= Delta(w) / Delta_Q", mass_inactive,
                   delta_pop / profile.gap));
    const double c_max = coverage.c_max.value;
    const double chain = c_max == kInfinity ? kInfinity
                                            : 2.0 * c_max * std::max(delta_pop, 0.0) /
                                                  (scale * scale * profile.gap);
    add(make_check("gap_chain",
                   "J_mu(pi*) - J_mu(pi_D) <= 2 C_max Delta(w) / ((1-gamma)^2 Delta_Q)",
                   j_star_mu - j_d_mu, chain));
  }
  add(make_check("generalization", "|Delta(w) - Delta_D(w)| <= 4 sqrt2 B_w sqrt(log(|V||W|/delta)) / ((1-gamma) sqrt n)",
                 std::abs(delta_pop - delta_emp),
                 n > 0 ? generalization_radius(resolved, gamma, n) : 0.0));

  {
    const double gap_mu0 = return_of(mdp, pi_star, mu0) - return_of(mdp, pi_d, mu0);
    const Vector v_diff = value_profile(mdp, pi_star).v - value_profile(mdp, pi_d).v;
    add(make_check("value_difference", "J_mu0(pi*) - J_mu0(pi) = (1-gamma) mu0^T (v* - v_pi)",
                   std::abs(gap_mu0 - scale * mu0.dot(v_diff)), 0.0));
    const double rhs = coverage.c_mu == kInfinity ? kInfinity : coverage.c_mu * (j_star_mu - j_d_mu);
    add(make_check("change_of_measure", "J_mu0(pi*) - J_mu0(pi_D) <= C_mu (J_mu(pi*) - J_mu(pi_D))",
                   gap_mu0, rhs));
  }

  // The reconstruction is exact only for the population minimizer.
  if (n == 0) {
    try {
      const Policy tilde = construct_tilde_pistar(w_case2, mdp, dist, profile);
      const Vector v_tilde = value_profile(mdp, tilde).v;
      add(make_check("tilde_pistar_optimal", "||v_{tilde pi*} - v*||_inf <= 0",
                     (v_tilde - profile.v_star).lpNorm<Eigen::Infinity>(), 0.0));
      add(make_check("tilde_pistar_mu_policy", "tilde pi* is a mu-policy",
                     is_mu_policy(tilde, dist) ? 0.0 : 1.0, 0.0));
    } catch (const InvalidArgument&) {
      add(make_check("tilde_pistar_optimal", "construction failed", kInfinity, 0.0));
      add(make_check("tilde_pistar_mu_policy", "construction failed", 1.0, 0.0));
    }
  }

  if (case1) {
    const Vector& w1 = case1->w;
    add(make_check("case1_budget", "||K_D w - (1-gamma) mu0||_1 <= epsilon",
                   (model.k_d * w1 - scale * mu0).lpNorm<1>(), case1->epsilon));
    const Vector theta1 = w1.cwiseProduct(mu);
    const auto back = occupancy_measure(mdp, policy_from_theta(OccupancyMeasure{theta1, na}), mu0);
    add(make_check("case1_error_bound",
                   "|r^T (theta - theta_{pi_theta,mu0})| <= ||M theta - (1-gamma) mu0||_1 / (1-gamma)",
                   std::abs(mdp.reward().dot(theta1 - back.values)),
                   (big_m * theta1 - scale * mu0).lpNorm<1>() / scale));
  }
  return report;
}

}  // namespace lpoff
