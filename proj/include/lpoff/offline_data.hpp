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

// Offline data: the sampling distribution mu over pairs, i.i.d. datasets
// drawn from it, and the plug-in estimators built from a dataset.

#pragma once

#include "lpoff/common.hpp"
#include "lpoff/mdp.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace lpoff {

/// mu over pairs together with its state marginal and conditional.
class DataDistribution {
 public:
  DataDistribution(Vector mu, int num_actions);

  const Vector& mu() const { return mu_; }
  const Vector& state_marginal() const { return state_marginal_; }
  const Policy& behavior() const { return behavior_; }
  int num_actions() const { return num_actions_; }
  int num_states() const { return static_cast<int>(state_marginal_.size()); }
  /// s in S_0, i.e. mu(s) > 0.
  bool in_support(int s) const { return state_marginal_(s) > kSupportTol; }

 private:
  Vector mu_;
  int num_actions_;
  Vector state_marginal_;
  Policy behavior_;
};

/// pi_mu(a|s) = mu(s,a)/mu(s), uniform where mu(s) = 0.
Policy behavior_policy(const DataDistribution& dist);

struct Transition {
  int s = 0;
  int a = 0;
  int s_next = 0;
  double r = 0.0;

  bool operator==(const Transition&) const = default;
};

struct Dataset {
  std::vector<Transition> tuples;
  std::uint64_t seed = 0;

  std::size_t size() const { return tuples.size(); }
};

/// Plug-in estimates from a dataset, or their exact population values.
struct EmpiricalModel {
  int num_states = 0;
  int num_actions = 0;
  double discount = 0.0;
  Vector mu_d;        // m
  Vector u_d;         // m, r(s,a) mu_D(s,a)
  Matrix k_d;         // |S| x m
  Matrix nu_d;        // m x |S|, nu_D(s,a,s')
  Vector mu_d_state;  // |S|

  int num_pairs() const { return num_states * num_actions; }
};

/// Random engine used everywhere a seed appears. `stream` separates
/// independent uses of the same seed.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0);

Dataset sample_dataset(const TabularMdp& mdp, const DataDistribution& dist,
                       std::int64_t n, std::uint64_t seed);

EmpiricalModel empirical_model(const Dataset& dataset, const Vector& reward,
                               int num_states, int num_actions, double gamma);

EmpiricalModel population_model(const TabularMdp& mdp, const DataDistribution& dist);

/// CSV with header `s,a,s_next,r`.
void write_dataset_csv(const Dataset& dataset, std::ostream& out);
Dataset read_dataset_csv(std::istream& in);

}  // namespace lpoff
