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

// Reference computations for the tests. Everything here is written with
// plain loops and fixed-point iteration so that it shares no code path with
// the library routines it checks.

#pragma once

#include "lpoff/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace lpoff::oracle {

using Rng = std::mt19937_64;

inline std::vector<double> random_simplex(Rng& rng, int k) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> out(static_cast<std::size_t>(k));
  double total = 0.0;
  for (auto& x : out) total += (x = e(rng));
  for (auto& x : out) x /= total;
  return out;
}

inline Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

inline Vector random_distribution(Rng& rng, int k) { return to_vector(random_simplex(rng, k)); }

/// Dense random MDP with a random initial distribution.
inline TabularMdp random_mdp(Rng& rng, int ns, int na, double gamma) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix p(ns * na, ns);
  Vector r(ns * na);
  for (int i = 0; i < ns * na; ++i) {
    const auto row = random_simplex(rng, ns);
    for (int s = 0; s < ns; ++s) p(i, s) = row[static_cast<std::size_t>(s)];
    r(i) = u(rng);
  }
  return TabularMdp(ns, na, p, r, gamma, random_distribution(rng, ns));
}

inline Policy random_policy(Rng& rng, int ns, int na) {
  Matrix probs(ns, na);
  for (int s = 0; s < ns; ++s) {
    const auto row = random_simplex(rng, na);
    for (int a = 0; a < na; ++a) probs(s, a) = row[static_cast<std::size_t>(a)];
  }
  return Policy(probs);
}

/// v_pi by iterating v <- r_pi + gamma P_pi v to a fixed point.
inline std::vector<double> policy_value(const TabularMdp& mdp, const Policy& pi) {
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  std::vector<double> v(static_cast<std::size_t>(ns), 0.0);
  std::vector<double> next(v.size());
  for (int iter = 0; iter < 100000; ++iter) {
    double change = 0.0;
    for (int s = 0; s < ns; ++s) {
      double total = 0.0;
      for (int a = 0; a < na; ++a) {
        const int i = s * na + a;
        double future = 0.0;
        for (int t = 0; t < ns; ++t) future += mdp.transition()(i, t) * v[static_cast<std::size_t>(t)];
        total += pi(s, a) * (mdp.reward()(i) + mdp.discount() * future);
      }
      next[static_cast<std::size_t>(s)] = total;
      change = std::max(change, std::abs(total - v[static_cast<std::size_t>(s)]));
    }
    v.swap(next);
    if (change < 1e-15) break;
  }
  return v;
}

inline double policy_return(const TabularMdp& mdp, const Policy& pi, const Vector& rho) {
  const auto v = policy_value(mdp, pi);
  double total = 0.0;
  for (int s = 0; s < mdp.num_states(); ++s) total += rho(s) * v[static_cast<std::size_t>(s)];
  return (1.0 - mdp.discount()) * total;
}

/// theta(s,a) = (1-gamma) sum_t gamma^t Pr(s_t = s, a_t = a) by propagating
/// the state distribution forward.
inline Vector occupancy(const TabularMdp& mdp, const Policy& pi, const Vector& rho) {
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  Vector theta = Vector::Zero(ns * na);
  std::vector<double> d(static_cast<std::size_t>(ns));
  for (int s = 0; s < ns; ++s) d[static_cast<std::size_t>(s)] = rho(s);
  double weight = 1.0 - mdp.discount();
  for (int t = 0; t < 100000 && weight > 1e-18; ++t) {
    std::vector<double> next(static_cast<std::size_t>(ns), 0.0);
    for (int s = 0; s < ns; ++s) {
      for (int a = 0; a < na; ++a) {
        const double mass = d[static_cast<std::size_t>(s)] * pi(s, a);
        theta(s * na + a) += weight * mass;
        for (int u = 0; u < ns; ++u) next[static_cast<std::size_t>(u)] += mass * mdp.transition()(s * na + a, u);
      }
    }
    d.swap(next);
    weight *= mdp.discount();
  }
  return theta;
}

/// M(s', (s,a)) = 1[s = s'] - gamma P(s'|s,a), built entrywise.
inline Matrix flow_matrix(const TabularMdp& mdp) {
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  Matrix m(ns, ns * na);
  for (int u = 0; u < ns; ++u)
    for (int s = 0; s < ns; ++s)
      for (int a = 0; a < na; ++a)
        m(u, s * na + a) = (s == u ? 1.0 : 0.0) - mdp.discount() * mdp.transition()(s * na + a, u);
  return m;
}

/// Calls visit(actions) for every deterministic policy.
template <typename F>
void for_each_deterministic(int ns, int na, F&& visit) {
  std::vector<int> actions(static_cast<std::size_t>(ns), 0);
  while (true) {
    visit(actions);
    int s = 0;
    while (s < ns && ++actions[static_cast<std::size_t>(s)] == na) actions[static_cast<std::size_t>(s++)] = 0;
    if (s == ns) return;
  }
}

/// v* by exhaustive search over deterministic policies.
inline std::vector<double> optimal_values_by_enumeration(const TabularMdp& mdp) {
  std::vector<double> best(static_cast<std::size_t>(mdp.num_states()),
                           -std::numeric_limits<double>::infinity());
  for_each_deterministic(mdp.num_states(), mdp.num_actions(), [&](const std::vector<int>& acts) {
    const auto v = policy_value(mdp, Policy::deterministic(acts, mdp.num_actions()));
    for (std::size_t s = 0; s < v.size(); ++s) best[s] = std::max(best[s], v[s]);
  });
  return best;
}

/// v* by Bellman optimality iteration to a fixed point.
inline std::vector<double> optimal_values_by_iteration(const TabularMdp& mdp) {
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  std::vector<double> v(static_cast<std::size_t>(ns), 0.0);
  std::vector<double> next(v.size());
  for (int iter = 0; iter < 100000; ++iter) {
    double change = 0.0;
    for (int s = 0; s < ns; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < na; ++a) {
        const int i = s * na + a;
        double future = 0.0;
        for (int t = 0; t < ns; ++t) future += mdp.transition()(i, t) * v[static_cast<std::size_t>(t)];
        best = std::max(best, mdp.reward()(i) + mdp.discount() * future);
      }
      next[static_cast<std::size_t>(s)] = best;
      change = std::max(change, std::abs(best - v[static_cast<std::size_t>(s)]));
    }
    v.swap(next);
    if (change < 1e-15) break;
  }
  return v;
}

/// (1-gamma) rho^T v*.
inline double optimal_return(const TabularMdp& mdp, const Vector& rho) {
  const auto v = optimal_values_by_iteration(mdp);
  double total = 0.0;
  for (int s = 0; s < mdp.num_states(); ++s) total += rho(s) * v[static_cast<std::size_t>(s)];
  return (1.0 - mdp.discount()) * total;
}

}  // namespace lpoff::oracle
