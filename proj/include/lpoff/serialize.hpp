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

// JSON interchange for MDPs, data distributions, solve reports, audit
// reports and experiment configs. Non-finite numbers are written as the
// strings "inf", "-inf" and "nan"; readers accept them wherever a number is
// expected.

#pragma once

#include "lpoff/case1.hpp"
#include "lpoff/case2.hpp"
#include "lpoff/diagnostics.hpp"
#include "lpoff/harness.hpp"

#include <string>
#include <string_view>

namespace lpoff {

/// {num_states, num_actions, gamma, transition (row-major m x |S|), reward,
/// initial_dist}.
std::string mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(std::string_view text);

/// {num_actions, mu}.
std::string dist_to_json(const DataDistribution& dist);
DataDistribution dist_from_json(std::string_view text);

/// Optional context added to solve reports.
struct ReportContext {
  /// Suboptimality of the extracted policy against the appropriate optimum.
  double subopt = std::numeric_limits<double>::quiet_NaN();
  double delta_q = std::numeric_limits<double>::quiet_NaN();
  double c_max = std::numeric_limits<double>::quiet_NaN();
  double b_w = std::numeric_limits<double>::quiet_NaN();
};

/// {w, l1_residual, objective, policy, bound_rhs, epsilon, status, ...}.
std::string case1_report_json(const Case1Solution& sol, const ReportContext& ctx,
                              const TabularThresholdVariants* variants = nullptr);
/// Case-I fields plus {delta_emp, delta_pop, inactive_mass, delta_q, c_max}.
std::string case2_report_json(const Case2Solution& sol, double bound_rhs, const ReportContext& ctx);

/// {all_pass, checks: [{check_id, statement, lhs, rhs, slack, pass}]}.
std::string audit_report_json(const AuditReport& report, const CoverageAudit* coverage = nullptr);

/// Unknown keys are rejected. Missing keys keep their defaults.
ExperimentConfig config_from_json(std::string_view text,
                                  const ExperimentConfig& base = ExperimentConfig{});
std::string config_to_json(const ExperimentConfig& config);

std::string rate_fit_json(const RateFit& fit);

std::string to_string(CaseSelection cases);
CaseSelection case_selection_from_string(std::string_view name);
std::string to_string(ThresholdMode mode);
ThresholdMode threshold_mode_from_string(std::string_view name);

}  // namespace lpoff
