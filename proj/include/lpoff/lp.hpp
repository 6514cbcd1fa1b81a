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

// A small dense linear-programming engine.
//
// Problems are stated in general form (bounded variables, <=/=/>= rows) and
// solved by a two-phase revised simplex method with Bland's smallest-index
// rule, which never cycles on degenerate vertices. The basis inverse is kept
// explicitly and refactorized periodically with a dense LU. Intended for
// problems with at most a few hundred rows and columns.

#pragma once

#include "lpoff/common.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lpoff {

enum class Sense { kMinimize, kMaximize };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  int var = 0;
  double coeff = 0.0;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

class LinearProgram {
 public:
  explicit LinearProgram(Sense sense = Sense::kMinimize) : sense_(sense) {}

  /// Adds a variable with objective coefficient `cost` and bounds [lower, upper]
  /// (either may be infinite). Returns its index.
  int add_variable(double cost, double lower = 0.0, double upper = kInfinity);
  void add_constraint(std::vector<Term> terms, Relation relation, double rhs);
  void add_dense_constraint(const Vector& dense_row, Relation relation, double rhs);

  void set_cost(int var, double cost);
  void set_bounds(int var, double lower, double upper);

  Sense sense() const { return sense_; }
  int num_variables() const { return static_cast<int>(cost_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const std::vector<double>& cost() const { return cost_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

  /// Throws InvalidArgument on NaNs, bad indices or crossed bounds.
  void validate() const;

  double evaluate(std::span<const double> x) const;
  /// Largest violation of any row or variable bound at x.
  double max_violation(std::span<const double> x) const;

 private:
  Sense sense_;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<LinearConstraint> constraints_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double objective_value = 0.0;
  double max_primal_residual = 0.0;
  int iterations = 0;
  /// Entering variable (standard-form index) of every pivot, in order.
  std::vector<int> pivot_sequence;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

struct LpOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  /// Cap = iteration_factor * (rows + cols) of the standard form.
  int iteration_factor = 50;
  int refactor_period = 64;
};

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

/// How an l1 epigraph enters the program.
struct L1Budget {
  enum class Mode { kSummed, kWeighted };
  Mode mode = Mode::kSummed;
  /// Budget epsilon for kSummed (sum t <= epsilon), weight lambda for kWeighted.
  double value = 0.0;

  static L1Budget summed(double epsilon) { return {Mode::kSummed, epsilon}; }
  static L1Budget weighted(double lambda) { return {Mode::kWeighted, lambda}; }
};

/// Appends auxiliary variables t >= 0 with -t <= A w - b <= t, where the
/// columns of A refer to the existing variables `vars`. In summed mode adds
/// sum t <= epsilon (skipped when epsilon is +inf); in weighted mode adds
/// lambda * sum t to the objective with the sign that penalizes t. Returns
/// the indices of t.
std::vector<int> add_l1_epigraph(LinearProgram& lp, std::span<const int> vars,
                                 const Matrix& rows, const Vector& offset,
                                 const L1Budget& budget);

/// Plain-text dump: objective, one line per row, then bounds.
void write_lp_text(const LinearProgram& lp, std::ostream& out);

}  // namespace lpoff
