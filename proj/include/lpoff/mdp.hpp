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

// Exact tabular MDP machinery: occupancy measures, policy evaluation, the
// flow-conservation matrix M and the optimal-value profile with its
// active/inactive partition.
//
// State-action pairs are flattened as (s^1,a^1),...,(s^1,a^|A|),...,
// (s^|S|,a^|A|), i.e. index = s * |A| + a. Every vector and matrix over
// pairs in this library uses that ordering.

#pragma once

#include "lpoff/common.hpp"

#include <cstddef>
#include <vector>

namespace lpoff {

/// A finite discounted MDP <S, A, P, r, gamma, mu0> with deterministic
/// rewards in [0,1]. The constructor validates every invariant and throws
/// InvalidArgument on violation, so a live object is always valid.
class TabularMdp {
 public:
  /// `transition` is m x |S| with row (s,a) the distribution of s'.
  TabularMdp(int num_states, int num_actions, Matrix transition, Vector reward,
             double discount, Vector initial_dist);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int num_pairs() const { return num_states_ * num_actions_; }
  int pair(int s, int a) const { return s * num_actions_ + a; }

  const Matrix& transition() const { return transition_; }
  const Vector& reward() const { return reward_; }
  double discount() const { return discount_; }
  const Vector& initial_dist() const { return initial_dist_; }

 private:
  int num_states_;
  int num_actions_;
  Matrix transition_;
  Vector reward_;
  double discount_;
  Vector initial_dist_;
};

/// Row-stochastic |S| x |A| decision rule.
class Policy {
 public:
  explicit Policy(Matrix probs);

  static Policy uniform(int num_states, int num_actions);
  /// Deterministic policy taking actions[s] in state s.
  static Policy deterministic(const std::vector<int>& actions, int num_actions);

  int num_states() const { return static_cast<int>(probs_.rows()); }
  int num_actions() const { return static_cast<int>(probs_.cols()); }
  double operator()(int s, int a) const { return probs_(s, a); }
  const Matrix& probs() const { return probs_; }

 private:
  Matrix probs_;
};

/// Discounted state-action occupancy, a nonnegative vector over pairs.
struct OccupancyMeasure {
  Vector values;
  int num_actions = 1;

  double operator()(int s, int a) const { return values(s * num_actions + a); }
  /// theta(s) = sum_a theta(s,a).
  Vector state_marginal() const;
};

struct ValueProfile {
  Vector v;  // |S|
  Matrix q;  // |S| x |A|
};

struct OptimalityProfile {
  Vector v_star;
  Matrix q_star;
  /// T(s): actions with |v*(s) - Q*(s,a)| <= tau_act.
  std::vector<std::vector<int>> argmax_sets;
  /// Mask over pairs; true for inactive (s,a).
  std::vector<bool> inactive;
  /// min over inactive pairs of v*(s) - Q*(s,a); +inf when no pair is inactive.
  double gap = kInfinity;
  double tau_act = 0.0;
  double value_iter_residual = 0.0;
  int iterations = 0;

  bool degenerate() const { return gap == kInfinity; }
  bool is_active(int s, int a) const;
  /// Greedy deterministic optimal policy, picking the smallest action of T(s).
  Policy greedy_policy() const;
};

/// Exact occupancy measure from (I - gamma P_pi^T) theta_bar = (1-gamma) rho
/// followed by theta(s,a) = theta_bar(s) pi(a|s).
OccupancyMeasure occupancy_measure(const TabularMdp& mdp, const Policy& policy,
                                   const Vector& rho);

ValueProfile value_profile(const TabularMdp& mdp, const Policy& policy);

/// J_rho(pi) = (1-gamma) rho^T v_pi.
double return_of(const TabularMdp& mdp, const Policy& policy, const Vector& rho);

/// M = Diag(1^T,...,1^T) - gamma P, shape |S| x m.
Matrix build_M(const TabularMdp& mdp);

/// Value iteration to a Bellman sup-norm residual <= tol. Throws NumericError
/// (message carries the attained residual) when the iteration cap is hit.
OptimalityProfile optimal_profile(const TabularMdp& mdp, double tol = 1e-12,
                                  double tau_act = 1e-8,
                                  int max_iterations = 1000000);

/// pi_theta(a|s) = theta(s,a) / sum_a' theta(s,a'), uniform on zero rows.
Policy policy_from_theta(const OccupancyMeasure& theta);

/// max_{s,a} theta(s,a)/mu(s,a) with 0/0 = 0; +inf when theta > 0 = mu.
double concentrability(const Vector& theta, const Vector& mu);

/// Probability vector checks shared by the validators.
bool is_probability_vector(const Vector& p, double tol = 1e-12);

}  // namespace lpoff
