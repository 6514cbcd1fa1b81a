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

#include "lpoff/lp.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace lpoff {

int LinearProgram::add_variable(double cost, double lower, double upper) {
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return num_variables() - 1;
}

void LinearProgram::add_constraint(std::vector<Term> terms, Relation relation,
                                   double rhs) {
  constraints_.push_back({std::move(terms), relation, rhs});
}

void LinearProgram::add_dense_constraint(const Vector& dense_row, Relation relation,
                                   double rhs) {
  std::vector<Term> terms;
  for (Eigen::Index j = 0; j < dense_row.size(); ++j)
    if (dense_row(j) != 0.0) terms.push_back({static_cast<int>(j), dense_row(j)});
  add_constraint(std::move(terms), relation, rhs);
}

void LinearProgram::set_cost(int var, double cost) {
  cost_.at(static_cast<std::size_t>(var)) = cost;
}

void LinearProgram::set_bounds(int var, double lower, double upper) {
  lower_.at(static_cast<std::size_t>(var)) = lower;
  upper_.at(static_cast<std::size_t>(var)) = upper;
}

void LinearProgram::validate() const {
  const int n = num_variables();
  for (int j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (!std::isfinite(cost_[k])) throw InvalidArgument("objective coefficient is not finite");
    if (std::isnan(lower_[k]) || std::isnan(upper_[k]) || lower_[k] > upper_[k] ||
        lower_[k] == kInfinity || upper_[k] == -kInfinity)
      throw InvalidArgument("invalid variable bounds");
  }
  for (const auto& row : constraints_) {
    if (!std::isfinite(row.rhs)) throw InvalidArgument("constraint rhs is not finite");
    for (const auto& t : row.terms) {
      if (t.var < 0 || t.var >= n) throw InvalidArgument("constraint refers to unknown variable");
      if (!std::isfinite(t.coeff)) throw InvalidArgument("constraint coefficient is not finite");
    }
  }
}

double LinearProgram::evaluate(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t j = 0; j < cost_.size(); ++j) total += cost_[j] * x[j];
  return total;
}

double LinearProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < cost_.size(); ++j) {
    worst = std::max(worst, lower_[j] - x[j]);
    worst = std::max(worst, x[j] - upper_[j]);
  }
  for (const auto& row : constraints_) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coeff * x[static_cast<std::size_t>(t.var)];
    switch (row.relation) {
      case Relation::kLessEqual: worst = std::max(worst, lhs - row.rhs); break;
      case Relation::kGreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
      case Relation::kEqual: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;

// x_k = offset + sign_pos * y_pos [- y_neg]
struct VariableMap {
  double offset = 0.0;
  int pos = -1;
  double sign_pos = 1.0;
  int neg = -1;
};

// min c^T y  s.t.  A y = b,  y >= 0,  b >= 0.
class StandardForm {
 public:
  explicit StandardForm(const LinearProgram& lp) { build(lp); }

  Matrix a;
  Vector b;
  Vector c;
  std::vector<VariableMap> maps;
  std::vector<int> initial_basis;  // one column per row
  std::vector<bool> artificial;
  int num_structural = 0;

  Vector recover(const Vector& y) const {
    Vector x(static_cast<Eigen::Index>(maps.size()));
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const auto& mp = maps[k];
      double value = mp.offset + mp.sign_pos * y(mp.pos);
      if (mp.neg >= 0) value -= y(mp.neg);
      x(static_cast<Eigen::Index>(k)) = value;
    }
    return x;
  }

 private:
  struct Row {
    std::vector<Term> terms;  // over structural columns
    Relation relation;
    double rhs;
  };

  void build(const LinearProgram& lp) {
    const double dir = lp.sense() == Sense::kMaximize ? -1.0 : 1.0;
    std::vector<double> cost;
    std::vector<Row> rows;

    maps.resize(static_cast<std::size_t>(lp.num_variables()));
    for (int k = 0; k < lp.num_variables(); ++k) {
      const auto uk = static_cast<std::size_t>(k);
      const double lo = lp.lower()[uk];
      const double hi = lp.upper()[uk];
      const double ck = dir * lp.cost()[uk];
      auto& mp = maps[uk];
      if (std::isfinite(lo)) {
        mp.offset = lo;
        mp.pos = static_cast<int>(cost.size());
        cost.push_back(ck);
        if (std::isfinite(hi)) rows.push_back({{{mp.pos, 1.0}}, Relation::kLessEqual, hi - lo});
      } else if (std::isfinite(hi)) {
        mp.offset = hi;
        mp.sign_pos = -1.0;
        mp.pos = static_cast<int>(cost.size());
        cost.push_back(-ck);
      } else {
        mp.pos = static_cast<int>(cost.size());
        cost.push_back(ck);
        mp.neg = static_cast<int>(cost.size());
        cost.push_back(-ck);
      }
    }
    num_structural = static_cast<int>(cost.size());

    for (const auto& con : lp.constraints()) {
      Row row{{}, con.relation, con.rhs};
      for (const auto& t : con.terms) {
        const auto& mp = maps[static_cast<std::size_t>(t.var)];
        row.rhs -= t.coeff * mp.offset;
        row.terms.push_back({mp.pos, t.coeff * mp.sign_pos});
        if (mp.neg >= 0) row.terms.push_back({mp.neg, -t.coeff});
      }
      rows.push_back(std::move(row));
    }

    const auto num_rows = static_cast<Eigen::Index>(rows.size());
    int num_slack = 0;
    for (const auto& row : rows)
      if (row.relation != Relation::kEqual) ++num_slack;

    // Worst case every row needs an artificial; trimmed below.
    const Eigen::Index max_cols = num_structural + num_slack + num_rows;
    a = Matrix::Zero(num_rows, max_cols);
    b = Vector::Zero(num_rows);
    int next_col = num_structural;
    initial_basis.assign(static_cast<std::size_t>(num_rows), -1);

    for (Eigen::Index i = 0; i < num_rows; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      for (const auto& t : row.terms) a(i, t.var) += t.coeff;
      b(i) = row.rhs;
      int slack = -1;
      if (row.relation != Relation::kEqual) {
        slack = next_col++;
        a(i, slack) = row.relation == Relation::kLessEqual ? 1.0 : -1.0;
      }
      if (b(i) < 0.0) {
        a.row(i) *= -1.0;
        b(i) = -b(i);
      }
      if (slack >= 0 && a(i, slack) > 0.0) initial_basis[static_cast<std::size_t>(i)] = slack;
    }
    const int first_artificial = next_col;
    for (Eigen::Index i = 0; i < num_rows; ++i) {
      if (initial_basis[static_cast<std::size_t>(i)] >= 0) continue;
      a(i, next_col) = 1.0;
      initial_basis[static_cast<std::size_t>(i)] = next_col++;
    }
    a.conservativeResize(num_rows, next_col);
    c = Vector::Zero(next_col);
    for (int j = 0; j < num_structural; ++j) c(j) = cost[static_cast<std::size_t>(j)];
    artificial.assign(static_cast<std::size_t>(next_col), false);
    for (int j = first_artificial; j < next_col; ++j) artificial[static_cast<std::size_t>(j)] = true;
  }
};

enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

class RevisedSimplex {
 public:
  RevisedSimplex(const StandardForm& sf, const LpOptions& opt)
      : sf_(sf), opt_(opt), basis_(sf.initial_basis) {
    const auto cols = sf.a.cols();
    in_basis_.assign(static_cast<std::size_t>(cols), -1);
    for (std::size_t i = 0; i < basis_.size(); ++i)
      in_basis_[static_cast<std::size_t>(basis_[i])] = static_cast<int>(i);
    cap_ = opt.iteration_factor * static_cast<int>(sf.a.rows() + cols);
    refactor();
  }

  PhaseResult run(const Vector& cost, const std::vector<bool>& may_enter) {
    const auto rows = sf_.a.rows();
    const auto cols = sf_.a.cols();
    while (true) {
      if (iterations_ >= cap_) return PhaseResult::kIterationLimit;
      if (since_refactor_ >= opt_.refactor_period) refactor();

      Vector cb(rows);
      for (Eigen::Index i = 0; i < rows; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
      const Eigen::RowVectorXd y = cb.transpose() * binv_;

      // Bland: smallest index with a negative reduced cost.
      int entering = -1;
      for (Eigen::Index j = 0; j < cols; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (in_basis_[uj] >= 0 || !may_enter[uj]) continue;
        const double reduced = cost(j) - y.dot(sf_.a.col(j));
        if (reduced < -opt_.opt_tol) {
          entering = static_cast<int>(j);
          break;
        }
      }
      if (entering < 0) return PhaseResult::kOptimal;

      const Vector alpha = binv_ * sf_.a.col(entering);
      int leave_row = -1;
      double best = kInfinity;
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (alpha(i) <= kPivotTol) continue;
        const double ratio = std::max(xb_(i), 0.0) / alpha(i);
        const double tie_tol = 1e-12 * std::max(1.0, best == kInfinity ? 1.0 : best);
        if (leave_row < 0 || ratio < best - tie_tol) {
          best = ratio;
          leave_row = static_cast<int>(i);
        } else if (ratio <= best + tie_tol &&
                   basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave_row)]) {
          best = std::min(best, ratio);
          leave_row = static_cast<int>(i);
        }
      }
      if (leave_row < 0) return PhaseResult::kUnbounded;
      pivot(entering, leave_row, alpha, best);
    }
  }

  // Pivots basic artificials out of the basis where a structural or slack
  // column has a nonzero entry in their row. Rows with none are redundant.
  void drive_out_artificials() {
    const auto cols = sf_.a.cols();
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      if (!sf_.artificial[static_cast<std::size_t>(basis_[r])]) continue;
      const Eigen::RowVectorXd row = binv_.row(static_cast<Eigen::Index>(r)) * sf_.a;
      for (Eigen::Index j = 0; j < cols; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (sf_.artificial[uj] || in_basis_[uj] >= 0) continue;
        if (std::abs(row(j)) > 1e-7) {
          const Vector alpha = binv_ * sf_.a.col(j);
          pivot(static_cast<int>(j), static_cast<int>(r), alpha, xb_(static_cast<Eigen::Index>(r)) / alpha(static_cast<Eigen::Index>(r)));
          break;
        }
      }
    }
  }

  Vector primal() const {
    Vector y = Vector::Zero(sf_.a.cols());
    for (std::size_t i = 0; i < basis_.size(); ++i)
      y(basis_[i]) = std::max(0.0, xb_(static_cast<Eigen::Index>(i)));
    return y;
  }

  double basic_cost(const Vector& cost) const {
    double total = 0.0;
    for (std::size_t i = 0; i < basis_.size(); ++i)
      total += cost(basis_[i]) * xb_(static_cast<Eigen::Index>(i));
    return total;
  }

  void refactor() {
    const auto rows = sf_.a.rows();
    Matrix basis_matrix(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i)
      basis_matrix.col(i) = sf_.a.col(basis_[static_cast<std::size_t>(i)]);
    Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    binv_ = lu.inverse();
    xb_ = binv_ * sf_.b;
    since_refactor_ = 0;
  }

  int iterations() const { return iterations_; }
  const std::vector<int>& pivots() const { return pivots_; }

 private:
  void pivot(int entering, int leave_row, const Vector& alpha, double step) {
    const auto r = static_cast<Eigen::Index>(leave_row);
    xb_ -= step * alpha;
    xb_(r) = step;
    const double pivot_value = alpha(r);
    binv_.row(r) /= pivot_value;
    for (Eigen::Index i = 0; i < binv_.rows(); ++i)
      if (i != r && alpha(i) != 0.0) binv_.row(i) -= alpha(i) * binv_.row(r);
    in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = -1;
    basis_[static_cast<std::size_t>(r)] = entering;
    in_basis_[static_cast<std::size_t>(entering)] = leave_row;
    pivots_.push_back(entering);
    ++iterations_;
    ++since_refactor_;
  }

  const StandardForm& sf_;
  LpOptions opt_;
  std::vector<int> basis_;
  std::vector<int> in_basis_;
  Matrix binv_;
  Vector xb_;
  int iterations_ = 0;
  int since_refactor_ = 0;
  int cap_ = 0;
  std::vector<int> pivots_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  lp.validate();
  const StandardForm sf(lp);
  RevisedSimplex simplex(sf, options);
  LpSolution out;

  auto finish = [&](LpStatus status) {
    out.status = status;
    out.iterations = simplex.iterations();
    out.pivot_sequence = simplex.pivots();
    return out;
  };

  const auto cols = sf.a.cols();
  const bool needs_phase1 = std::any_of(sf.initial_basis.begin(), sf.initial_basis.end(),
                                        [&](int j) { return sf.artificial[static_cast<std::size_t>(j)]; });
  if (needs_phase1) {
    Vector phase1_cost = Vector::Zero(cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      if (sf.artificial[static_cast<std::size_t>(j)]) phase1_cost(j) = 1.0;
    const std::vector<bool> everyone(static_cast<std::size_t>(cols), true);
    const auto result = simplex.run(phase1_cost, everyone);
    if (result == PhaseResult::kIterationLimit) return finish(LpStatus::kIterationLimit);
    simplex.refactor();
    const double infeasibility = simplex.basic_cost(phase1_cost);
    const double scale = std::max(1.0, sf.b.size() ? sf.b.cwiseAbs().maxCoeff() : 0.0);
    if (infeasibility > options.feas_tol * scale) return finish(LpStatus::kInfeasible);
    simplex.drive_out_artificials();
    simplex.refactor();
  }

  std::vector<bool> may_enter(static_cast<std::size_t>(cols));
  for (Eigen::Index j = 0; j < cols; ++j)
    may_enter[static_cast<std::size_t>(j)] = !sf.artificial[static_cast<std::size_t>(j)];
  const auto result = simplex.run(sf.c, may_enter);
  if (result == PhaseResult::kIterationLimit) return finish(LpStatus::kIterationLimit);
  if (result == PhaseResult::kUnbounded) return finish(LpStatus::kUnbounded);

  simplex.refactor();
  out.x = sf.recover(simplex.primal());
  for (int k = 0; k < lp.num_variables(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    out.x(k) = std::clamp(out.x(k), lp.lower()[uk], lp.upper()[uk]);
  }
  const std::span<const double> xs(out.x.data(), static_cast<std::size_t>(out.x.size()));
  out.objective_value = lp.evaluate(xs);
  out.max_primal_residual = lp.max_violation(xs);
  return finish(LpStatus::kOptimal);
}

std::vector<int> add_l1_epigraph(LinearProgram& lp, std::span<const int> vars,
                                 const Matrix& rows, const Vector& offset,
                                 const L1Budget& budget) {
  if (rows.cols() != static_cast<Eigen::Index>(vars.size()) || rows.rows() != offset.size())
    throw InvalidArgument("add_l1_epigraph: dimension mismatch");
  if (budget.mode == L1Budget::Mode::kSummed && !(budget.value >= 0.0))
    throw InvalidArgument("add_l1_epigraph: budget must be nonnegative");
  if (budget.mode == L1Budget::Mode::kWeighted && !(budget.value >= 0.0 && std::isfinite(budget.value)))
    throw InvalidArgument("add_l1_epigraph: weight must be finite and nonnegative");

  double t_cost = 0.0;
  if (budget.mode == L1Budget::Mode::kWeighted)
    t_cost = lp.sense() == Sense::kMinimize ? budget.value : -budget.value;

  std::vector<int> t_vars;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const int t = lp.add_variable(t_cost, 0.0, kInfinity);
    t_vars.push_back(t);
    std::vector<Term> terms;
    for (Eigen::Index j = 0; j < rows.cols(); ++j)
      if (rows(i, j) != 0.0) terms.push_back({vars[static_cast<std::size_t>(j)], rows(i, j)});
    auto upper = terms;
    upper.push_back({t, -1.0});
    lp.add_constraint(std::move(upper), Relation::kLessEqual, offset(i));  // Aw - t <= b
    terms.push_back({t, 1.0});
    lp.add_constraint(std::move(terms), Relation::kGreaterEqual, offset(i));  // Aw + t >= b
  }
  if (budget.mode == L1Budget::Mode::kSummed && std::isfinite(budget.value)) {
    std::vector<Term> sum;
    for (int t : t_vars) sum.push_back({t, 1.0});
    lp.add_constraint(std::move(sum), Relation::kLessEqual, budget.value);
  }
  return t_vars;
}

void write_lp_text(const LinearProgram& lp, std::ostream& out) {
  using detail::format_double;
  out << (lp.sense() == Sense::kMaximize ? "maximize" : "minimize") << '\n';
  out << "objective";
  for (int j = 0; j < lp.num_variables(); ++j)
    out << ' ' << format_double(lp.cost()[static_cast<std::size_t>(j)]);
  out << '\n';
  out << "rows " << lp.num_constraints() << '\n';
  for (const auto& row : lp.constraints()) {
    for (const auto& t : row.terms) out << t.var << ':' << format_double(t.coeff) << ' ';
    switch (row.relation) {
      case Relation::kLessEqual: out << "<="; break;
      case Relation::kEqual: out << "=="; break;
      case Relation::kGreaterEqual: out << ">="; break;
    }
    out << ' ' << format_double(row.rhs) << '\n';
  }
  out << "bounds " << lp.num_variables() << '\n';
  for (int j = 0; j < lp.num_variables(); ++j) {
    const auto uj = static_cast<std::size_t>(j);
    out << j << ' ' << format_double(lp.lower()[uj]) << ' ' << format_double(lp.upper()[uj])
        << '\n';
  }
}

}  // namespace lpoff
