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

// Lower-bounded minimax program with the data distribution as the initial
// distribution.
//
//   min_{w in W} max_{v in V}  l_D(w, v) = -u_D^T w + v^T (K_D w - (1-gamma) mu_D)
//
// with W = {0 <= w <= B_w, sum_a w(s,a) pi_mu(a|s) >= 1-gamma for all s}
// and V the box ||v||_inf <= 1/(1-gamma). The inner maximum over the box is
// ||K_D w - (1-gamma) mu_D||_1 / (1-gamma), so the whole problem is one LP.

#pragma once

#include "lpoff/common.hpp"
#include "lpoff/lp.hpp"
#include "lpoff/mdp.hpp"
#include "lpoff/offline_data.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lpoff {

struct Case2Config {
  double b_w = 1.0;
  double delta = 0.05;
  /// log |W| and log |V| used by the bound formulas only. NaN selects the
  /// vertex counts of the boxes: |W| = 2^m, |V| = 2^|S|.
  double log_card_w = std::numeric_limits<double>::quiet_NaN();
  double log_card_v = std::numeric_limits<double>::quiet_NaN();

  void validate() const;
  Case2Config resolved(int num_states, int num_actions) const;
};

/// Radius of V: 1/(1-gamma).
double value_box_radius(double gamma);

/// l(w, v) = -u^T w + v^T (K w - (1-gamma) rho).
double ell(const EmpiricalModel& model, const Vector& w, const Vector& v, const Vector& rho);

struct InnerMax {
  double value = 0.0;
  Vector v;  // maximizer, sign(residual)/(1-gamma) with sign(0) = +1
};

InnerMax inner_max(const EmpiricalModel& model, const Vector& w, const Vector& rho);

struct Case2Solution {
  LpStatus status = LpStatus::kInfeasible;
  Vector w_d;
  std::optional<Policy> policy;
  double ell_emp = 0.0;
  double delta_emp = 0.0;
  double delta_pop = std::numeric_limits<double>::quiet_NaN();
  double inactive_mass = std::numeric_limits<double>::quiet_NaN();
  double l1_residual = 0.0;
  /// Optimal LP value, i.e. min over W of the empirical objective.
  double objective = 0.0;
  /// First state whose lower bound cannot be met, or -1.
  int violating_state = -1;
  int iterations = 0;
  LinearProgram program;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

/// Solves the program with rho = model.mu_d_state. `pi_mu` defines the lower
/// bound in W.
Case2Solution solve_case2(const EmpiricalModel& model, const Policy& pi_mu, const Case2Config& cfg,
                          const LpOptions& lp_options = {});

/// True when w lies in W up to `tol`.
bool in_case2_class(const Vector& w, const Policy& pi_mu, double b_w, double gamma,
                    double tol = 1e-9);

/// min over W of max over V of l; pass the population model for the
/// population value. Throws NumericError if the LP does not solve.
double case2_min_value(const EmpiricalModel& model, const Policy& pi_mu, const Case2Config& cfg);

/// max_V l(w, .) - min_W max_V l. `min_value` may carry a cached
/// case2_min_value for the same model. Requires w in W.
double primal_gap(const EmpiricalModel& model, const Vector& w, const Policy& pi_mu,
                  const Case2Config& cfg, std::optional<double> min_value = std::nullopt);

/// pi_w(a|s) proportional to w(s,a) pi_mu(a|s), uniform on zero rows.
Policy extract_policy_case2(const Vector& w, const Policy& pi_mu);

struct Case2Bound {
  double value = 0.0;
  /// Set when the action gap is +inf and the bound is vacuous (value 0).
  bool degenerate = false;
};

/// 8 sqrt2 B_w C_max / (Delta_Q (1-gamma)^3) sqrt(log(|W||V|/delta)) / sqrt n,
/// times c_mu for the mu0-initialized variant.
Case2Bound bound_main2(const Case2Config& cfg, double gamma, double c_max, double delta_q,
                       std::int64_t n, double c_mu = 1.0);

/// 4 sqrt2 B_w sqrt(log(|V||W|/delta)) / ((1-gamma) sqrt n).
double generalization_radius(const Case2Config& cfg, double gamma, std::int64_t n);

/// sum over inactive pairs of w(s,a) mu(s,a).
double inactive_mass(const Vector& w, const Vector& mu, const std::vector<bool>& inactive);

}  // namespace lpoff
