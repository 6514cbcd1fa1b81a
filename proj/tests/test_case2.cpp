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

#include "doctest.h"

#include "lpoff/case2.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace lpoff;

namespace {

/// max of l(w, .) over the box by visiting all 2^|S| corners.
double box_corner_max(const EmpiricalModel& model, const Vector& w, const Vector& rho) {
  const int ns = model.num_states;
  const double radius = 1.0 / (1.0 - model.discount);
  double best = -kInfinity;
  for (int mask = 0; mask < (1 << ns); ++mask) {
    Vector v(ns);
    for (int s = 0; s < ns; ++s) v(s) = (mask >> s & 1) ? radius : -radius;
    best = std::max(best, ell(model, w, v, rho));
  }
  return best;
}

Vector random_w(oracle::Rng& rng, int m, double hi) {
  std::uniform_real_distribution<double> u(0.0, hi);
  Vector w(m);
  for (int i = 0; i < m; ++i) w(i) = u(rng);
  return w;
}

/// With gamma = 0 the program splits by state: minimize sum_a (1 - r) x_a
/// - mu(s) over 0 <= x_a <= B_w mu(s,a) with sum_a x_a >= mu(s). Filling the
/// cheapest actions first is optimal.
double myopic_min_value(const TabularMdp& mdp, const DataDistribution& dist, double b_w) {
  const int na = mdp.num_actions();
  double total = 0.0;
  for (int s = 0; s < mdp.num_states(); ++s) {
    const double need = dist.state_marginal()(s);
    std::vector<int> order(static_cast<std::size_t>(na));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return mdp.reward()(s * na + a) > mdp.reward()(s * na + b); });
    double filled = 0.0;
    for (int a : order) {
      if (filled >= need) break;
      const double x = std::min(need - filled, b_w * dist.mu()(s * na + a));
      total += (1.0 - mdp.reward()(s * na + a)) * x;
      filled += x;
    }
    total -= need;
  }
  return total;
}

}  // namespace

TEST_SUITE("case2") {

TEST_CASE("closed-form inner maximum matches the box corners") {
  oracle::Rng rng(51);
  for (int trial = 0; trial < 25; ++trial) {
    const auto mdp = oracle::random_mdp(rng, 4, 2, 0.75);
    const DataDistribution dist(oracle::random_distribution(rng, 8), 2);
    const auto model = population_model(mdp, dist);
    const Vector w = random_w(rng, 8, 3.0);
    const Vector rho = dist.state_marginal();
    const auto inner = inner_max(model, w, rho);
    CHECK(inner.value == doctest::Approx(box_corner_max(model, w, rho)).epsilon(1e-12));
    CHECK(ell(model, w, inner.v, rho) == doctest::Approx(inner.value).epsilon(1e-12));
    CHECK(inner.v.cwiseAbs().maxCoeff() == doctest::Approx(value_box_radius(0.75)));
    // Any interior v is no better.
    const Vector v = (random_w(rng, 4, 2.0).array() - 1.0).matrix() * value_box_radius(0.75);
    CHECK(ell(model, w, v, rho) <= inner.value + 1e-12);
  }
  CHECK_THROWS_AS(value_box_radius(1.0), InvalidArgument);
}

TEST_CASE("population solve reaches the optimal return from mu") {
  oracle::Rng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mdp = oracle::random_mdp(rng, 4, 2, 0.8);
    const DataDistribution dist(oracle::random_distribution(rng, 8), 2);
    const auto model = population_model(mdp, dist);
    Case2Config cfg;
    cfg.b_w = 1000.0;
    const auto sol = solve_case2(model, dist.behavior(), cfg);
    REQUIRE(sol.optimal());
    const Vector rho = dist.state_marginal();
    const auto v_star = oracle::optimal_values_by_enumeration(mdp);
    double j_star = 0.0;
    for (int s = 0; s < 4; ++s) j_star += rho(s) * v_star[static_cast<std::size_t>(s)];
    j_star *= 0.2;
    CHECK(sol.objective == doctest::Approx(-j_star).epsilon(1e-9));
    CHECK(std::abs(sol.delta_emp) <= 1e-8);
    CHECK(in_case2_class(sol.w_d, dist.behavior(), cfg.b_w, 0.8));
    REQUIRE(sol.policy.has_value());
    CHECK(j_star - oracle::policy_return(mdp, *sol.policy, rho) <= 1e-7);
  }
}

TEST_CASE("single-state instance") {
  // All transitions return to the only state, so the minimum is -max_a r(a).
  Matrix p = Matrix::Ones(3, 1);
  Vector r(3);
  r << 0.2, 0.9, 0.5;
  const TabularMdp mdp(1, 3, p, r, 0.6, Vector::Ones(1));
  Vector mu(3);
  mu << 0.5, 0.25, 0.25;
  const DataDistribution dist(mu, 3);
  Case2Config cfg;
  cfg.b_w = 4.0;
  const auto sol = solve_case2(population_model(mdp, dist), dist.behavior(), cfg);
  REQUIRE(sol.optimal());
  CHECK(sol.objective == doctest::Approx(-0.9).epsilon(1e-12));
  REQUIRE(sol.policy.has_value());
  CHECK((*sol.policy)(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("myopic instances match the greedy fill") {
  oracle::Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mdp = oracle::random_mdp(rng, 4, 3, 0.0);
    const DataDistribution dist(oracle::random_distribution(rng, 12), 3);
    Case2Config cfg;
    cfg.b_w = 1.0 + 2.0 * trial / 20.0;
    const double value = case2_min_value(population_model(mdp, dist), dist.behavior(), cfg);
    CHECK(value == doctest::Approx(myopic_min_value(mdp, dist, cfg.b_w)).epsilon(1e-10));
  }
}

TEST_CASE("primal gap") {
  oracle::Rng rng(54);
  const auto mdp = oracle::random_mdp(rng, 4, 2, 0.7);
  const DataDistribution dist(oracle::random_distribution(rng, 8), 2);
  const auto model = empirical_model(sample_dataset(mdp, dist, 2000, 3), mdp.reward(), 4, 2, 0.7);
  Case2Config cfg;
  cfg.b_w = 6.0;
  const auto sol = solve_case2(model, dist.behavior(), cfg);
  REQUIRE(sol.optimal());
  const double min_value = case2_min_value(model, dist.behavior(), cfg);
  CHECK(std::abs(primal_gap(model, sol.w_d, dist.behavior(), cfg, min_value)) <= 1e-9);
  CHECK(primal_gap(model, sol.w_d, dist.behavior(), cfg) == doctest::Approx(sol.delta_emp).epsilon(1e-9));
  for (int trial = 0; trial < 20; ++trial) {
    const Vector w = (random_w(rng, 8, 5.0).array() + 1.0).matrix();  // w >= 1 meets the lower bound
    REQUIRE(in_case2_class(w, dist.behavior(), cfg.b_w, 0.7));
    CHECK(primal_gap(model, w, dist.behavior(), cfg, min_value) >= -1e-9);
  }
  CHECK_THROWS_AS(primal_gap(model, Vector::Zero(8), dist.behavior(), cfg, min_value), InvalidArgument);
  CHECK_THROWS_AS(primal_gap(model, Vector::Constant(8, 7.0), dist.behavior(), cfg, min_value), InvalidArgument);
}

TEST_CASE("weight class membership") {
  Matrix probs(2, 2);
  probs << 0.5, 0.5, 1.0, 0.0;
  const Policy pi_mu(probs);
  Vector w(4);
  w << 0.1, 0.1, 0.1, 5.0;  // state 1 only counts action 0
  CHECK(in_case2_class(w, pi_mu, 5.0, 0.9));
  CHECK_FALSE(in_case2_class(w, pi_mu, 4.0, 0.9));
  CHECK_FALSE(in_case2_class(w, pi_mu, 5.0, 0.5));
  w(0) = -0.1;
  CHECK_FALSE(in_case2_class(w, pi_mu, 5.0, 0.9));
}

TEST_CASE("policy extraction") {
  Matrix probs(3, 2);
  probs << 0.5, 0.5, 0.25, 0.75, 1.0, 0.0;
  const Policy pi_mu(probs);
  Vector w(6);
  w << 1.0, 3.0, 2.0, 0.0, 0.0, 4.0;
  const auto pi = extract_policy_case2(w, pi_mu);
  CHECK(pi(0, 0) == doctest::Approx(0.25));
  CHECK(pi(0, 1) == doctest::Approx(0.75));
  CHECK(pi(1, 0) == doctest::Approx(1.0));
  CHECK(pi(2, 0) == 0.5);  // no weighted mass: uniform
  CHECK(pi(2, 1) == 0.5);
  w(1) = -1.0;
  CHECK_THROWS_AS(extract_policy_case2(w, pi_mu), InvalidArgument);
}

TEST_CASE("bound formulas") {
  Case2Config cfg;
  cfg.b_w = 2.0;
  cfg.delta = 0.05;
  CHECK_THROWS_AS(bound_main2(cfg, 0.9, 1.5, 0.1, 100), InvalidArgument);  // unresolved
  const auto r = cfg.resolved(3, 2);
  CHECK(r.log_card_w == doctest::Approx(6.0 * std::log(2.0)));
  CHECK(r.log_card_v == doctest::Approx(3.0 * std::log(2.0)));
  const double root = std::sqrt(9.0 * std::log(2.0) + std::log(20.0));
  const auto b = bound_main2(r, 0.5, 1.5, 0.1, 100);
  CHECK_FALSE(b.degenerate);
  CHECK(b.value == doctest::Approx(8.0 * std::sqrt(2.0) * 2.0 * 1.5 / (0.1 * 0.125) * root / 10.0));
  CHECK(bound_main2(r, 0.5, 1.5, 0.1, 100, 3.0).value == doctest::Approx(3.0 * b.value));
  const auto degenerate = bound_main2(r, 0.5, 1.5, kInfinity, 100);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.value == 0.0);
  CHECK_THROWS_AS(bound_main2(r, 0.5, 1.5, 0.0, 100), InvalidArgument);
  CHECK(generalization_radius(r, 0.5, 100) == doctest::Approx(4.0 * std::sqrt(2.0) * 2.0 * root / (0.5 * 10.0)));
  CHECK_THROWS_AS(generalization_radius(r, 0.5, 0), InvalidArgument);
}

TEST_CASE("inactive mass") {
  Vector w(4), mu(4);
  w << 1.0, 2.0, 3.0, 4.0;
  mu << 0.1, 0.2, 0.3, 0.4;
  CHECK(inactive_mass(w, mu, {false, true, false, true}) == doctest::Approx(0.4 + 1.6));
  CHECK(inactive_mass(w, mu, {false, false, false, false}) == 0.0);
  CHECK_THROWS_AS(inactive_mass(w, mu, {true}), InvalidArgument);
}

TEST_CASE("config validation") {
  Case2Config cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.b_w = 0.9;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.b_w = 1.0;
  cfg.delta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

}  // TEST_SUITE
