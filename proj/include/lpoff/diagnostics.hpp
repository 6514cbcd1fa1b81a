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

// Coverage constants, mu-policy classification and executable forms of the
// inequalities that relate the LP solutions to policy suboptimality.

#pragma once

#include "lpoff/case2.hpp"
#include "lpoff/common.hpp"
#include "lpoff/mdp.hpp"
#include "lpoff/offline_data.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lpoff {

/// Upper limit on the number of deterministic policies any routine here
/// enumerates.
inline constexpr std::int64_t kMaxEnumeratedPolicies = 1 << 16;

/// min over deterministic policies with actions in T(s) of the
/// concentrability of theta_{pi,rho} against mu; +inf if none is covered.
/// Throws InvalidArgument when more than kMaxEnumeratedPolicies candidates
/// exist.
double compute_c_star(const TabularMdp& mdp, const OptimalityProfile& profile,
                      const DataDistribution& dist, const Vector& rho);

struct CMaxResult {
  /// max_s of the per-state LP value divided by mu(s); +inf when the
  /// polytope is empty or puts mass on a state outside S_0.
  double value = 0.0;
  Vector per_state;
  bool feasible = true;
  /// Best state-marginal concentrability over enumerated deterministic
  /// mu-optimal policies; NaN when there are more than 4096 of them.
  double enumeration_lower_bound = std::numeric_limits<double>::quiet_NaN();
  std::int64_t policies_enumerated = 0;
};

/// Maximizes sum_a theta(s,a) for every s over the mu-initialized occupancy
/// polytope with theta = 0 on inactive pairs and on uncovered pairs of S_0.
CMaxResult compute_c_max(const TabularMdp& mdp, const OptimalityProfile& profile,
                         const DataDistribution& dist);

/// pi(a|s) > 0 implies mu(s,a) > 0 for every s in S_0.
bool is_mu_policy(const Policy& policy, const DataDistribution& dist);

/// Uniform over T(s) intersected with supp pi_mu(.|s) on S_0 and uniform over
/// T(s) elsewhere; nullopt when some s in S_0 has no covered optimal action.
std::optional<Policy> max_mu_optimal_policy(const OptimalityProfile& profile,
                                            const DataDistribution& dist);

/// Rebuilds an optimal mu-policy from a minimax solution: on S_0 the mass of
/// theta_D = w mu on inactive actions is spread uniformly over the covered
/// optimal actions; off S_0 the greedy optimal action is taken. Throws
/// InvalidArgument if some s in S_0 has no covered optimal action or no mass.
Policy construct_tilde_pistar(const Vector& w_d, const TabularMdp& mdp,
                              const DataDistribution& dist, const OptimalityProfile& profile);

struct CoverageAudit {
  double c_star = kInfinity;     // initial distribution mu0
  double c_star_mu = kInfinity;  // initial distribution mu(s)
  CMaxResult c_max;
  double c_mu = kInfinity;  // max_s mu0(s)/mu(s)
  std::vector<int> s0;
  bool spc_holds = false;
  bool spc_plus_holds = false;
};

CoverageAudit coverage_audit(const TabularMdp& mdp, const OptimalityProfile& profile,
                             const DataDistribution& dist);

struct AuditCheck {
  std::string check_id;
  /// The inequality being checked, in plain notation.
  std::string statement;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool pass = false;
};

struct AuditReport {
  std::vector<AuditCheck> checks;

  bool all_pass() const;
  const AuditCheck* find(const std::string& id) const;
};

/// Slack below which a check fails.
inline constexpr double kAuditTolerance = 1e-6;

/// Case-I evidence audited alongside a minimax solution.
struct Case1Evidence {
  Vector w;
  double epsilon = 0.0;
};

/// Evaluates every inequality on the given solution. `model` is the model
/// the minimax solve used; `n` is the dataset size, 0 for exact data. The
/// tilde pi* checks run only on exact data.
AuditReport check_suite(const TabularMdp& mdp, const DataDistribution& dist,
                        const OptimalityProfile& profile, const CoverageAudit& coverage,
                        const EmpiricalModel& model, const Case2Config& cfg,
                        const Vector& w_case2, std::int64_t n,
                        const std::optional<Case1Evidence>& case1 = std::nullopt);

}  // namespace lpoff
