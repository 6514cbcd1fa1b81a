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

#include "lpoff/lp.hpp"
#include "oracles.hpp"

#include <sstream>

using namespace lpoff;

namespace {

/// Best objective over all vertices of {A x <= b, 0 <= x <= upper}, found by
/// solving every n x n subsystem of tight constraints.
double vertex_enumeration_min(const Matrix& a, const Vector& b, const Vector& upper, const Vector& c) {
  const int n = static_cast<int>(c.size());
  std::vector<Vector> rows;
  std::vector<double> rhs;
  for (int i = 0; i < a.rows(); ++i) {
    rows.push_back(a.row(i).transpose());
    rhs.push_back(b(i));
  }
  for (int j = 0; j < n; ++j) {
    Vector e = Vector::Zero(n);
    e(j) = -1.0;
    rows.push_back(e);
    rhs.push_back(0.0);
    e(j) = 1.0;
    rows.push_back(e);
    rhs.push_back(upper(j));
  }
  const int k = static_cast<int>(rows.size());
  double best = kInfinity;
  std::vector<int> pick(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    Matrix sys(n, n);
    Vector r(n);
    for (int i = 0; i < n; ++i) {
      sys.row(i) = rows[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])].transpose();
      r(i) = rhs[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
    }
    Eigen::FullPivLU<Matrix> lu(sys);
    if (lu.isInvertible()) {
      const Vector x = lu.solve(r);
      bool feasible = true;
      for (int i = 0; i < k && feasible; ++i)
        feasible = rows[static_cast<std::size_t>(i)].dot(x) <= rhs[static_cast<std::size_t>(i)] + 1e-9;
      if (feasible) best = std::min(best, c.dot(x));
    }
    int i = n - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == k - n + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

LinearProgram box_lp(const Matrix& a, const Vector& b, const Vector& upper, const Vector& c) {
  LinearProgram lp(Sense::kMinimize);
  for (int j = 0; j < c.size(); ++j) lp.add_variable(c(j), 0.0, upper(j));
  for (int i = 0; i < a.rows(); ++i) lp.add_dense_constraint(Vector(a.row(i).transpose()), Relation::kLessEqual, b(i));
  return lp;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("one-variable programs") {
  LinearProgram lp(Sense::kMaximize);
  const int x = lp.add_variable(1.0);
  lp.add_constraint({{x, 1.0}}, Relation::kLessEqual, 1.0);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.x(0) == doctest::Approx(1.0));
  CHECK(sol.objective_value == doctest::Approx(1.0));

  LinearProgram infeasible(Sense::kMinimize);
  const int y = infeasible.add_variable(1.0);
  infeasible.add_constraint({{y, 1.0}}, Relation::kGreaterEqual, 2.0);
  infeasible.add_constraint({{y, 1.0}}, Relation::kLessEqual, 1.0);
  CHECK(solve_lp(infeasible).status == LpStatus::kInfeasible);

  LinearProgram unbounded(Sense::kMaximize);
  unbounded.add_variable(1.0);
  CHECK(solve_lp(unbounded).status == LpStatus::kUnbounded);
}

TEST_CASE("classification corpus") {
  SUBCASE("contradictory equalities") {
    LinearProgram lp;
    const int x = lp.add_variable(0.0);
    const int y = lp.add_variable(0.0);
    lp.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::kEqual, 1.0);
    lp.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::kEqual, 2.0);
    CHECK(solve_lp(lp).status == LpStatus::kInfeasible);
  }
  SUBCASE("free variable unbounded below") {
    LinearProgram lp;
    const int x = lp.add_variable(1.0, -kInfinity, kInfinity);
    lp.add_constraint({{x, 1.0}}, Relation::kLessEqual, 5.0);
    CHECK(solve_lp(lp).status == LpStatus::kUnbounded);
  }
  SUBCASE("ray along a difference") {
    LinearProgram lp(Sense::kMaximize);
    const int x = lp.add_variable(1.0);
    const int y = lp.add_variable(-1.0);
    lp.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::kLessEqual, 1.0);
    lp.add_constraint({{x, 1.0}}, Relation::kGreaterEqual, 0.0);
    CHECK(solve_lp(lp).status == LpStatus::kOptimal);
    lp.set_cost(y, 1.0);
    CHECK(solve_lp(lp).status == LpStatus::kUnbounded);
  }
  SUBCASE("bounds cross a row") {
    LinearProgram lp;
    const int x = lp.add_variable(0.0, 0.0, 1.0);
    const int y = lp.add_variable(0.0, 0.0, 1.0);
    lp.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::kGreaterEqual, 3.0);
    CHECK(solve_lp(lp).status == LpStatus::kInfeasible);
  }
  SUBCASE("negative lower bounds and upper-only variables") {
    LinearProgram lp;
    const int x = lp.add_variable(1.0, -3.0, 2.0);
    const int y = lp.add_variable(-1.0, -kInfinity, 4.0);
    lp.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::kGreaterEqual, -10.0);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.optimal());
    CHECK(sol.x(x) == doctest::Approx(-3.0));
    CHECK(sol.x(y) == doctest::Approx(4.0));
    CHECK(sol.objective_value == doctest::Approx(-7.0));
  }
  SUBCASE("degenerate cycling example terminates") {
    // A classic instance on which the largest-coefficient rule cycles.
    LinearProgram lp(Sense::kMinimize);
    const int x1 = lp.add_variable(-0.75);
    const int x2 = lp.add_variable(20.0);
    const int x3 = lp.add_variable(-0.5);
    const int x4 = lp.add_variable(6.0);
    lp.add_constraint({{x1, 0.25}, {x2, -8.0}, {x3, -1.0}, {x4, 9.0}}, Relation::kLessEqual, 0.0);
    lp.add_constraint({{x1, 0.5}, {x2, -12.0}, {x3, -0.5}, {x4, 3.0}}, Relation::kLessEqual, 0.0);
    lp.add_constraint({{x3, 1.0}}, Relation::kLessEqual, 1.0);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.optimal());
    CHECK(sol.objective_value == doctest::Approx(-1.25));
  }
  SUBCASE("empty feasible region from equality with bounds") {
    LinearProgram lp;
    const int x = lp.add_variable(1.0, 0.0, 1.0);
    lp.add_constraint({{x, 2.0}}, Relation::kEqual, 5.0);
    CHECK(solve_lp(lp).status == LpStatus::kInfeasible);
  }
}

TEST_CASE("random box programs match vertex enumeration") {
  oracle::Rng rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3;
    const int m = 3;
    Matrix a(m, n);
    Vector b(m), c(n), upper(n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = u(rng);
      b(i) = std::abs(u(rng));  // x = 0 is feasible
    }
    for (int j = 0; j < n; ++j) {
      c(j) = u(rng);
      upper(j) = 1.0 + std::abs(u(rng));
    }
    const auto sol = solve_lp(box_lp(a, b, upper, c));
    REQUIRE(sol.optimal());
    CHECK(sol.max_primal_residual <= 1e-9);
    CHECK(sol.objective_value == doctest::Approx(vertex_enumeration_min(a, b, upper, c)).epsilon(1e-9));
  }
}

TEST_CASE("a redundant row leaves the optimum unchanged") {
  oracle::Rng rng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 6;
    const int m = 4;
    Matrix a(m, n);
    Vector x0(n), c(n);
    for (int j = 0; j < n; ++j) {
      x0(j) = u(rng);
      c(j) = u(rng) - 0.5;
    }
    LinearProgram lp(Sense::kMinimize);
    for (int j = 0; j < n; ++j) lp.add_variable(c(j), 0.0, 3.0);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = u(rng) - 0.3;
      const Relation rel = i == 0 ? Relation::kEqual : Relation::kLessEqual;
      lp.add_dense_constraint(Vector(a.row(i).transpose()), rel, a.row(i).dot(x0) + (i == 0 ? 0.0 : 0.1));
    }
    const auto base = solve_lp(lp);
    REQUIRE(base.optimal());
    LinearProgram more = lp;
    more.add_dense_constraint(Vector(a.row(1).transpose() + a.row(2).transpose()), Relation::kLessEqual,
                        a.row(1).dot(x0) + a.row(2).dot(x0) + 0.2);
    const auto again = solve_lp(more);
    REQUIRE(again.optimal());
    CHECK(std::abs(base.objective_value - again.objective_value) <= 1e-8);
  }
}

TEST_CASE("solves are deterministic") {
  oracle::Rng rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LinearProgram lp(Sense::kMaximize);
  for (int j = 0; j < 8; ++j) lp.add_variable(u(rng), 0.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    Vector row(8);
    for (int j = 0; j < 8; ++j) row(j) = u(rng);
    lp.add_dense_constraint(row, Relation::kLessEqual, 2.0);
  }
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp);
  CHECK(a.pivot_sequence == b.pivot_sequence);
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("iteration cap is reported distinctly") {
  oracle::Rng rng(34);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LinearProgram lp(Sense::kMaximize);
  for (int j = 0; j < 10; ++j) lp.add_variable(u(rng), 0.0, 1.0);
  for (int i = 0; i < 6; ++i) {
    Vector row(10);
    for (int j = 0; j < 10; ++j) row(j) = u(rng);
    lp.add_dense_constraint(row, Relation::kLessEqual, 1.0);
  }
  LpOptions opts;
  opts.iteration_factor = 0;
  CHECK(solve_lp(lp, opts).status == LpStatus::kIterationLimit);
}

TEST_CASE("validation rejects malformed programs") {
  auto expect_invalid = [](const LinearProgram& lp) { CHECK_THROWS_AS(solve_lp(lp), InvalidArgument); };
  {
    LinearProgram lp;
    lp.add_variable(std::nan(""));
    expect_invalid(lp);
  }
  {
    LinearProgram lp;
    lp.add_variable(1.0, 2.0, 1.0);
    expect_invalid(lp);
  }
  {
    LinearProgram lp;
    const int x = lp.add_variable(1.0);
    lp.add_constraint({{x + 5, 1.0}}, Relation::kLessEqual, 1.0);
    expect_invalid(lp);
  }
  {
    LinearProgram lp;
    const int x = lp.add_variable(1.0);
    lp.add_constraint({{x, std::nan("")}}, Relation::kLessEqual, 1.0);
    expect_invalid(lp);
  }
  {
    LinearProgram lp;
    const int x = lp.add_variable(1.0);
    lp.add_constraint({{x, 1.0}}, Relation::kLessEqual, kInfinity);
    expect_invalid(lp);
  }
}

TEST_CASE("l1 epigraph with identity rows drives t to zero") {
  LinearProgram lp(Sense::kMinimize);
  std::vector<int> w = {lp.add_variable(0.0, -kInfinity, kInfinity), lp.add_variable(0.0, -kInfinity, kInfinity)};
  const auto t = add_l1_epigraph(lp, w, Matrix::Identity(2, 2), Vector::Zero(2), L1Budget::weighted(1.0));
  CHECK(t.size() == 2);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.objective_value == doctest::Approx(0.0));
  CHECK(std::abs(sol.x(w[0])) < 1e-12);
}

TEST_CASE("l1 budget on a scalar gives an interval") {
  for (Sense sense : {Sense::kMinimize, Sense::kMaximize}) {
    LinearProgram lp(sense);
    std::vector<int> w = {lp.add_variable(1.0, -kInfinity, kInfinity)};
    add_l1_epigraph(lp, w, Matrix::Ones(1, 1), Vector::Constant(1, 3.0), L1Budget::summed(1.0));
    const auto sol = solve_lp(lp);
    REQUIRE(sol.optimal());
    CHECK(sol.x(0) == doctest::Approx(sense == Sense::kMinimize ? 2.0 : 4.0));
  }
}

TEST_CASE("minimized epigraph equals the direct l1 norm") {
  oracle::Rng rng(35);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(5, 8);
  Vector b(5);
  for (int i = 0; i < 5; ++i) {
    b(i) = u(rng);
    for (int j = 0; j < 8; ++j) a(i, j) = u(rng);
  }
  for (int trial = 0; trial < 100; ++trial) {
    Vector w(8);
    for (int j = 0; j < 8; ++j) w(j) = u(rng);
    LinearProgram lp(Sense::kMinimize);
    std::vector<int> vars;
    for (int j = 0; j < 8; ++j) vars.push_back(lp.add_variable(0.0, w(j), w(j)));
    add_l1_epigraph(lp, vars, a, b, L1Budget::weighted(1.0));
    const auto sol = solve_lp(lp);
    REQUIRE(sol.optimal());
    CHECK(sol.objective_value == doctest::Approx((a * w - b).lpNorm<1>()).epsilon(1e-9));
  }
}

TEST_CASE("infinite budget adds no budget row") {
  LinearProgram lp(Sense::kMaximize);
  std::vector<int> w = {lp.add_variable(1.0, 0.0, 5.0)};
  add_l1_epigraph(lp, w, Matrix::Ones(1, 1), Vector::Zero(1), L1Budget::summed(kInfinity));
  CHECK(lp.num_constraints() == 2);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.x(0) == doctest::Approx(5.0));
}

TEST_CASE("text dump lists objective, rows and bounds") {
  LinearProgram lp(Sense::kMaximize);
  const int x = lp.add_variable(2.0, 0.0, 1.0);
  lp.add_constraint({{x, 1.0}}, Relation::kLessEqual, 0.5);
  std::ostringstream out;
  write_lp_text(lp, out);
  const std::string text = out.str();
  CHECK(text.find("max") != std::string::npos);
  CHECK(text.find("<=") != std::string::npos);
  CHECK(text.find("0.5") != std::string::npos);
}

}  // TEST_SUITE
