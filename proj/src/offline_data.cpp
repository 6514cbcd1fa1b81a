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

#include "lpoff/offline_data.hpp"

#include "text_util.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace lpoff {

namespace {

Vector marginalize(const Vector& mu, int num_actions) {
  const auto ns = mu.size() / num_actions;
  Vector out(ns);
  for (Eigen::Index s = 0; s < ns; ++s)
    out(s) = mu.segment(s * num_actions, num_actions).sum();
  return out;
}

Policy conditional(const Vector& mu, const Vector& marginal, int num_actions) {
  const auto ns = marginal.size();
  Matrix probs(ns, num_actions);
  for (Eigen::Index s = 0; s < ns; ++s) {
    if (marginal(s) > kSupportTol)
      probs.row(s) = mu.segment(s * num_actions, num_actions).transpose() / marginal(s);
    else
      probs.row(s).setConstant(1.0 / num_actions);
  }
  return Policy(std::move(probs));
}

std::discrete_distribution<int> categorical(const Eigen::Ref<const Vector>& weights) {
  return std::discrete_distribution<int>(weights.data(), weights.data() + weights.size());
}

Vector checked_mu(Vector mu, int num_actions) {
  if (num_actions < 1 || mu.size() == 0 || mu.size() % num_actions != 0)
    throw InvalidArgument("mu length is not a positive multiple of |A|");
  if (!is_probability_vector(mu)) throw InvalidArgument("mu is not a probability vector");
  return mu;
}

}  // namespace

DataDistribution::DataDistribution(Vector mu, int num_actions)
    : mu_(checked_mu(std::move(mu), num_actions)),
      num_actions_(num_actions),
      state_marginal_(marginalize(mu_, num_actions)),
      behavior_(conditional(mu_, state_marginal_, num_actions)) {}

Policy behavior_policy(const DataDistribution& dist) { return dist.behavior(); }

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Dataset sample_dataset(const TabularMdp& mdp, const DataDistribution& dist,
                       std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample_dataset needs n >= 1");
  if (dist.mu().size() != mdp.num_pairs())
    throw InvalidArgument("data distribution does not match the MDP");

  auto engine = make_engine(seed, 0x5a);
  auto pair_dist = categorical(dist.mu());
  std::vector<std::discrete_distribution<int>> next_dist;
  next_dist.reserve(static_cast<std::size_t>(mdp.num_pairs()));
  for (int i = 0; i < mdp.num_pairs(); ++i) {
    const Vector row = mdp.transition().row(i).transpose();
    next_dist.push_back(categorical(row));
  }

  Dataset out;
  out.seed = seed;
  out.tuples.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const int pair = pair_dist(engine);
    const int s = pair / mdp.num_actions();
    const int a = pair % mdp.num_actions();
    const int s_next = next_dist[static_cast<std::size_t>(pair)](engine);
    out.tuples.push_back({s, a, s_next, mdp.reward()(pair)});
  }
  return out;
}

EmpiricalModel empirical_model(const Dataset& dataset, const Vector& reward,
                               int num_states, int num_actions, double gamma) {
  if (dataset.tuples.empty()) throw InvalidArgument("empirical_model needs data");
  const int m = num_states * num_actions;
  if (reward.size() != m) throw InvalidArgument("reward length mismatch");

  EmpiricalModel model;
  model.num_states = num_states;
  model.num_actions = num_actions;
  model.discount = gamma;
  model.mu_d = Vector::Zero(m);
  model.nu_d = Matrix::Zero(m, num_states);
  for (const auto& t : dataset.tuples) {
    if (t.s < 0 || t.s >= num_states || t.a < 0 || t.a >= num_actions || t.s_next < 0 ||
        t.s_next >= num_states)
      throw InvalidArgument("dataset tuple out of range");
    const int pair = t.s * num_actions + t.a;
    model.mu_d(pair) += 1.0;
    model.nu_d(pair, t.s_next) += 1.0;
  }
  const double n = static_cast<double>(dataset.tuples.size());
  model.mu_d /= n;
  model.nu_d /= n;
  model.u_d = reward.cwiseProduct(model.mu_d);
  model.mu_d_state = marginalize(model.mu_d, num_actions);

  model.k_d = -gamma * model.nu_d.transpose();
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a)
      model.k_d(s, s * num_actions + a) += model.mu_d(s * num_actions + a);
  return model;
}

EmpiricalModel population_model(const TabularMdp& mdp, const DataDistribution& dist) {
  if (dist.mu().size() != mdp.num_pairs())
    throw InvalidArgument("data distribution does not match the MDP");
  EmpiricalModel model;
  model.num_states = mdp.num_states();
  model.num_actions = mdp.num_actions();
  model.discount = mdp.discount();
  model.mu_d = dist.mu();
  model.nu_d = dist.mu().asDiagonal() * mdp.transition();
  model.u_d = mdp.reward().cwiseProduct(dist.mu());
  model.mu_d_state = dist.state_marginal();
  // K(s',(s,a)) = M(s',(s,a)) mu(s,a).
  model.k_d = build_M(mdp) * dist.mu().asDiagonal();
  return model;
}

void write_dataset_csv(const Dataset& dataset, std::ostream& out) {
  out << "s,a,s_next,r\n";
  for (const auto& t : dataset.tuples)
    out << t.s << ',' << t.a << ',' << t.s_next << ',' << detail::format_double(t.r) << '\n';
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "s,a,s_next,r") throw ParseError("dataset CSV header must be s,a,s_next,r");

  Dataset out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 4) {
      std::ostringstream msg;
      msg << "dataset CSV line " << line_no << ": expected 4 fields";
      throw ParseError(msg.str());
    }
    Transition t;
    t.s = detail::parse_int(fields[0], line_no);
    t.a = detail::parse_int(fields[1], line_no);
    t.s_next = detail::parse_int(fields[2], line_no);
    t.r = detail::parse_double(fields[3], line_no);
    out.tuples.push_back(t);
  }
  return out;
}

}  // namespace lpoff
