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

// Random instances with controlled coverage, sample-size sweeps of both
// solvers and a log-log rate fit over the results.

#pragma once

#include "lpoff/case1.hpp"
#include "lpoff/common.hpp"
#include "lpoff/mdp.hpp"
#include "lpoff/offline_data.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace lpoff {

struct GarnetSpec {
  int num_states = 8;
  int num_actions = 3;
  double gamma = 0.9;
  int branching_factor = 4;
  std::uint64_t seed = 1;
};

/// Each pair gets `branching_factor` distinct successors chosen uniformly,
/// with Dirichlet(1) weights; rewards are uniform on [0,1] and the initial
/// distribution is uniform.
TabularMdp generate_garnet(const GarnetSpec& spec);

/// mu = alpha theta_{pi*,mu0} + (1-alpha) theta_{uniform,mu0}, where pi* is a
/// deterministic optimal policy with ties in T(s) broken at random by `seed`.
DataDistribution generate_mu(const TabularMdp& mdp, const OptimalityProfile& profile,
                             double alpha, std::uint64_t seed);

enum class CaseSelection { kOne, kTwo, kBoth };

struct ExperimentConfig {
  GarnetSpec mdp_spec;
  double coverage_alpha = 0.5;
  std::vector<std::int64_t> n_grid = {500, 2000, 8000, 32000};
  int num_seeds = 20;
  /// Datasets use seeds first_seed, first_seed + 1, ...
  std::uint64_t first_seed = 1;
  double delta = 0.05;
  /// NaN selects 2/alpha.
  double b_w = std::numeric_limits<double>::quiet_NaN();
  CaseSelection cases = CaseSelection::kBoth;
  ThresholdMode threshold = ThresholdMode::kTabular;
  /// Class cardinalities for the minimax bounds; NaN selects box vertex counts.
  double log_card_w = std::numeric_limits<double>::quiet_NaN();
  double log_card_v = std::numeric_limits<double>::quiet_NaN();
  /// Replace every dataset by the exact model (n still drives the formulas).
  bool population = false;
  /// Worker threads; 0 uses the hardware concurrency.
  int threads = 0;
  std::string output_path;

  void validate() const;
  double effective_b_w() const;
};

struct SweepRow {
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  int case_id = 1;
  double subopt = std::numeric_limits<double>::quiet_NaN();
  double bound_rhs = std::numeric_limits<double>::quiet_NaN();
  double l1_residual = std::numeric_limits<double>::quiet_NaN();
  double delta_emp = std::numeric_limits<double>::quiet_NaN();
  double delta_pop = std::numeric_limits<double>::quiet_NaN();
  double inactive_mass = std::numeric_limits<double>::quiet_NaN();
  double c_star = std::numeric_limits<double>::quiet_NaN();
  double c_max = std::numeric_limits<double>::quiet_NaN();
  double delta_q = std::numeric_limits<double>::quiet_NaN();
  std::string status;
  double runtime_ms = 0.0;

  /// Solve produced a policy (possibly after relaxing the budget).
  bool solved() const { return status == "optimal" || status == "relaxed"; }
};

/// Number of times a Case-I budget is doubled after an infeasible solve.
inline constexpr int kMaxBudgetRelaxations = 8;

/// One row per (seed, n, case), sorted by seed, n, case. The MDP and mu are
/// fixed by the config; only the datasets vary with the seed.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

inline constexpr const char* kSweepCsvHeader =
    "seed,n,case,subopt,bound_rhs,l1_residual,delta_emp,delta_pop,inactive_mass,c_star,c_max,"
    "delta_q,status,runtime_ms";

/// Not-applicable values are written as empty fields and read back as NaN.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

struct RateFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  /// Fewer than three grid points have median suboptimality above 1e-6.
  bool saturated = false;
  /// Median suboptimality never increases along the grid.
  bool nonincreasing = true;
  /// (n, median subopt) per grid point, sorted by n.
  std::vector<std::pair<std::int64_t, double>> medians;
  int unsaturated_points = 0;

  std::string verdict() const;
};

inline constexpr double kSaturationLevel = 1e-6;

/// Least-squares fit of log median subopt against log n over the solved
/// rows of `case_id`.
RateFit fit_rate(const std::vector<SweepRow>& rows, int case_id = 1);

}  // namespace lpoff
