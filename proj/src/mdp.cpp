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

#include "lpoff/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lpoff {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kSolveTol = 1e-9;

bool all_finite(const Matrix& x) { return x.allFinite(); }

// P_pi(s, s') = sum_a pi(a|s) P(s'|s,a), |S| x |S|.
Matrix policy_transition(const TabularMdp& mdp, const Policy& policy) {
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  Matrix p_pi = Matrix::Zero(ns, ns);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      const double prob = policy(s, a);
      if (prob != 0.0) p_pi.row(s) += prob * mdp.transition().row(mdp.pair(s, a));
    }
  }
  return p_pi;
}

Vector policy_reward(const TabularMdp& mdp, const Policy& policy) {
  Vector r_pi = Vector::Zero(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s)
    for (int a = 0; a < mdp.num_actions(); ++a)
      r_pi(s) += policy(s, a) * mdp.reward()(mdp.pair(s, a));
  return r_pi;
}

Vector solve_checked(const Matrix& lhs, const Vector& rhs, const char* what) {
  Eigen::PartialPivLU<Matrix> lu(lhs);
  Vector x = lu.solve(rhs);
  const double residual = (lhs * x - rhs).cwiseAbs().maxCoeff();
  if (!x.allFinite() || residual > kSolveTol) {
    std::ostringstream msg;
    msg << what << ": linear solve failed (residual " << residual << ")";
    throw NumericError(msg.str());
  }
  return x;
}

void check_policy_shape(const TabularMdp& mdp, const Policy& policy) {
  if (policy.num_states() != mdp.num_states() ||
      policy.num_actions() != mdp.num_actions())
    throw InvalidArgument("policy shape does not match the MDP");
}

void check_state_dist(const TabularMdp& mdp, const Vector& rho) {
  if (rho.size() != mdp.num_states())
    throw InvalidArgument("state distribution has the wrong length");
  if (!is_probability_vector(rho))
    throw InvalidArgument("state distribution is not a probability vector");
}

}  // namespace

bool is_probability_vector(const Vector& p, double tol) {
  if (p.size() == 0 || !p.allFinite()) return false;
  if (p.minCoeff() < 0.0) return false;
  return std::abs(p.sum() - 1.0) <= tol;
}

TabularMdp::TabularMdp(int num_states, int num_actions, Matrix transition,
                       Vector reward, double discount, Vector initial_dist)
    : num_states_(num_states),
      num_actions_(num_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      discount_(discount),
      initial_dist_(std::move(initial_dist)) {
  if (num_states_ < 1 || num_actions_ < 1)
    throw InvalidArgument("MDP needs at least one state and one action");
  const int m = num_pairs();
  if (transition_.rows() != m || transition_.cols() != num_states_)
    throw InvalidArgument("transition must be (|S||A|) x |S|");
  if (reward_.size() != m) throw InvalidArgument("reward must have |S||A| entries");
  if (initial_dist_.size() != num_states_)
    throw InvalidArgument("initial distribution must have |S| entries");
  if (!all_finite(transition_) || !reward_.allFinite())
    throw InvalidArgument("MDP contains non-finite entries");
  for (int i = 0; i < m; ++i) {
    if (!is_probability_vector(transition_.row(i).transpose(), kStochasticTol)) {
      std::ostringstream msg;
      msg << "transition row " << i << " is not a probability vector";
      throw InvalidArgument(msg.str());
    }
  }
  if (reward_.minCoeff() < 0.0 || reward_.maxCoeff() > 1.0)
    throw InvalidArgument("rewards must lie in [0,1]");
  if (!(discount_ >= 0.0 && discount_ < 1.0))
    throw InvalidArgument("discount must lie in [0,1)");
  if (!is_probability_vector(initial_dist_, kStochasticTol))
    throw InvalidArgument("initial distribution is not a probability vector");
}

Policy::Policy(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1)
    throw InvalidArgument("policy must be non-empty");
  for (int s = 0; s < probs_.rows(); ++s) {
    if (!is_probability_vector(probs_.row(s).transpose(), kStochasticTol)) {
      std::ostringstream msg;
      msg << "policy row " << s << " is not a probability vector";
      throw InvalidArgument(msg.str());
    }
  }
}

Policy Policy::uniform(int num_states, int num_actions) {
  return Policy(Matrix::Constant(num_states, num_actions, 1.0 / num_actions));
}

Policy Policy::deterministic(const std::vector<int>& actions, int num_actions) {
  Matrix probs = Matrix::Zero(static_cast<Eigen::Index>(actions.size()), num_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] < 0 || actions[s] >= num_actions)
      throw InvalidArgument("deterministic action out of range");
    probs(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
  }
  return Policy(std::move(probs));
}

Vector OccupancyMeasure::state_marginal() const {
  const auto ns = values.size() / num_actions;
  Vector out(ns);
  for (Eigen::Index s = 0; s < ns; ++s)
    out(s) = values.segment(s * num_actions, num_actions).sum();
  return out;
}

bool OptimalityProfile::is_active(int s, int a) const {
  return !inactive[static_cast<std::size_t>(s * q_star.cols() + a)];
}

Policy OptimalityProfile::greedy_policy() const {
  std::vector<int> actions;
  actions.reserve(argmax_sets.size());
  for (const auto& set : argmax_sets) actions.push_back(set.front());
  return Policy::deterministic(actions, static_cast<int>(q_star.cols()));
}

OccupancyMeasure occupancy_measure(const TabularMdp& mdp, const Policy& policy,
                                   const Vector& rho) {
  check_policy_shape(mdp, policy);
  check_state_dist(mdp, rho);
  const double gamma = mdp.discount();
  const int ns = mdp.num_states();
  const Matrix lhs = Matrix::Identity(ns, ns) - gamma * policy_transition(mdp, policy).transpose();
  const Vector marginal = solve_checked(lhs, (1.0 - gamma) * rho, "occupancy_measure");

  OccupancyMeasure theta{Vector(mdp.num_pairs()), mdp.num_actions()};
  for (int s = 0; s < ns; ++s)
    for (int a = 0; a < mdp.num_actions(); ++a)
      theta.values(mdp.pair(s, a)) = std::max(0.0, marginal(s)) * policy(s, a);
  return theta;
}

ValueProfile value_profile(const TabularMdp& mdp, const Policy& policy) {
  check_policy_shape(mdp, policy);
  const double gamma = mdp.discount();
  const int ns = mdp.num_states();
  const Matrix lhs = Matrix::Identity(ns, ns) - gamma * policy_transition(mdp, policy);
  ValueProfile out;
  out.v = solve_checked(lhs, policy_reward(mdp, policy), "value_profile");
  const Vector q_flat = mdp.reward() + gamma * mdp.transition() * out.v;
  out.q = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      q_flat.data(), ns, mdp.num_actions());
  return out;
}

double return_of(const TabularMdp& mdp, const Policy& policy, const Vector& rho) {
  check_state_dist(mdp, rho);
  return (1.0 - mdp.discount()) * rho.dot(value_profile(mdp, policy).v);
}

Matrix build_M(const TabularMdp& mdp) {
  const int ns = mdp.num_states();
  Matrix m_mat = -mdp.discount() * mdp.transition().transpose();
  for (int s = 0; s < ns; ++s)
    for (int a = 0; a < mdp.num_actions(); ++a) m_mat(s, mdp.pair(s, a)) += 1.0;
  return m_mat;
}

OptimalityProfile optimal_profile(const TabularMdp& mdp, double tol, double tau_act,
                                  int max_iterations) {
  if (!(tol > 0.0) || !(tau_act > 0.0))
    throw InvalidArgument("optimal_profile needs tol > 0 and tau_act > 0");
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  const double gamma = mdp.discount();

  auto bellman = [&](const Vector& v, Matrix& q) {
    const Vector q_flat = mdp.reward() + gamma * mdp.transition() * v;
    for (int s = 0; s < ns; ++s)
      for (int a = 0; a < na; ++a) q(s, a) = q_flat(mdp.pair(s, a));
    return Vector(q.rowwise().maxCoeff());
  };

  OptimalityProfile out;
  out.q_star = Matrix::Zero(ns, na);
  Vector v = Vector::Zero(ns);
  double residual = kInfinity;
  int it = 0;
  while (it < max_iterations) {
    Vector next = bellman(v, out.q_star);
    residual = (next - v).cwiseAbs().maxCoeff();
    v = std::move(next);
    ++it;
    if (residual <= tol) break;
  }
  if (residual > tol) {
    std::ostringstream msg;
    msg << "value iteration did not converge: residual " << residual << " after "
        << it << " iterations";
    throw NumericError(msg.str());
  }
  // Q* and v* consistent with the final iterate.
  out.v_star = bellman(v, out.q_star);
  out.value_iter_residual = (out.v_star - v).cwiseAbs().maxCoeff();
  out.iterations = it;
  out.tau_act = tau_act;

  out.argmax_sets.assign(static_cast<std::size_t>(ns), {});
  out.inactive.assign(static_cast<std::size_t>(mdp.num_pairs()), false);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      const double deficit = out.v_star(s) - out.q_star(s, a);
      if (std::abs(deficit) <= tau_act) {
        out.argmax_sets[static_cast<std::size_t>(s)].push_back(a);
      } else {
        out.inactive[static_cast<std::size_t>(mdp.pair(s, a))] = true;
        out.gap = std::min(out.gap, deficit);
      }
    }
  }
  return out;
}

Policy policy_from_theta(const OccupancyMeasure& theta) {
  if (theta.values.size() == 0 || theta.values.minCoeff() < 0.0)
    throw InvalidArgument("policy_from_theta needs a nonnegative occupancy");
  const int na = theta.num_actions;
  const auto ns = theta.values.size() / na;
  Matrix probs(ns, na);
  for (Eigen::Index s = 0; s < ns; ++s) {
    const auto row = theta.values.segment(s * na, na);
    const double mass = row.sum();
    if (mass > 0.0)
      probs.row(s) = row.transpose() / mass;
    else
      probs.row(s).setConstant(1.0 / na);
  }
  return Policy(std::move(probs));
}

double concentrability(const Vector& theta, const Vector& mu) {
  if (theta.size() != mu.size())
    throw InvalidArgument("concentrability: length mismatch");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (theta(i) <= 0.0) continue;
    if (mu(i) <= 0.0) return kInfinity;
    worst = std::max(worst, theta(i) / mu(i));
  }
  return worst;
}

}  // namespace lpoff
