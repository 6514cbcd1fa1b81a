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

// Constrained LP with an l1 budget on occupancy validity.
//
// Solves
//   max_w  u_D^T w
//   s.t.   w >= 0,  sum_a w(s,a) <= B_w  for every s,
//          || K_D w - (1-gamma) mu0 ||_1 <= epsilon
// where the budget epsilon shrinks like 1/sqrt(n). The policy is read off
// theta~(s,a) = w(s,a) pi_mu(a|s).

#pragma once

#include "lpoff/common.hpp"
#include "lpoff/lp.hpp"
#include "lpoff/mdp.hpp"
#include "lpoff/offline_data.hpp"

#include <cstdint>
#include <optional>

namespace lpoff {

enum class ThresholdMode { kGeneral, kTabular, kExplicit };

struct Case1Config {
  double b_w = 1.0;
  double delta = 0.05;
  ThresholdMode mode = ThresholdMode::kTabular;
  /// log |B| and log |W| for kGeneral. NaN selects the extreme-point counts
  /// of the tabular classes: |B| = 2^|S|, |W| = (|A|+1)^|S|.
  double log_card_b = std::numeric_limits<double>::quiet_NaN();
  double log_card_w = std::numeric_limits<double>::quiet_NaN();
  /// Budget for kExplicit; may be +inf (constraint dropped).
  double epsilon = 0.0;

  void validate() const;
  /// Fills NaN cardinalities with the extreme-point counts.
  Case1Config resolved(int num_states, int num_actions) const;
};

/// B_w sqrt(2 log(|B||W|/delta)) / sqrt(n).
double threshold_general(const Case1Config& cfg, std::int64_t n);

/// B_w sqrt(|S|) log(2|A|+2) log(1/delta) / sqrt(n).
double threshold_tabular(double b_w, int num_states, int num_actions, double delta,
                         std::int64_t n);

/// The three tabular expressions that appear for the same quantity: the
/// program constraint, the concentration radius derived for it, and the
/// radius implied by the reported bound.
struct TabularThresholdVariants {
  double display = 0.0;  // B_w sqrt|S| log(2|A|+2) log(1/delta) / sqrt n
  double proof = 0.0;    // 2 B_w sqrt(|S| log((2|A|+2)/delta)) / sqrt n
  double bound = 0.0;    // B_w sqrt(|S| log(2|A|+2) log(1/delta)) / sqrt n
};
TabularThresholdVariants tabular_threshold_variants(double b_w, int num_states, int num_actions,
                                                    double delta, std::int64_t n);

double case1_epsilon(const Case1Config& cfg, int num_states, int num_actions, std::int64_t n);

/// Suboptimality bound for the learned policy. kGeneral uses
/// 2 sqrt2 B_w sqrt(log(|B||W|/delta)) / ((1-gamma) sqrt n); kTabular and
/// kExplicit use 2 B_w sqrt(|S| log(2|A|+2) log(1/delta)) / ((1-gamma) sqrt n).
double bound_main1(const Case1Config& cfg, int num_states, int num_actions, std::int64_t n,
                   double gamma);

/// Elementwise sign of K w - (1-gamma) mu0 with sign(0) = +1; its inner
/// product with the residual is the residual's l1 norm.
Vector sign_vector(const EmpiricalModel& model, const Vector& w, const Vector& mu0);

struct Case1Solution {
  LpStatus status = LpStatus::kInfeasible;
  Vector w_d;
  OccupancyMeasure theta_tilde;
  std::optional<Policy> policy;
  double l1_residual = 0.0;
  double objective = 0.0;
  double epsilon = 0.0;
  double bound_rhs = 0.0;
  int iterations = 0;
  LinearProgram program;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

/// The exact occupancy program max r^T theta s.t. M theta = (1-gamma) rho,
/// theta >= 0. Its optimum is J_rho(pi*).
LpSolution solve_occupancy_lp(const TabularMdp& mdp, const Vector& rho,
                              const LpOptions& lp_options = {});

/// Compiles and solves the budgeted LP. `n` is the dataset size used by the
/// threshold and bound formulas. Infeasibility is reported through `status`.
Case1Solution solve_case1(const EmpiricalModel& model, const Vector& mu0, const Policy& pi_mu,
                          const Case1Config& cfg, std::int64_t n,
                          const LpOptions& lp_options = {});

}  // namespace lpoff
