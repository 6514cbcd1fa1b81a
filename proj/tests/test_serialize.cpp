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
#include "json.hpp"

#include "lpoff/serialize.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace lpoff;
using Json = nlohmann::json;

TEST_SUITE("serialize") {

TEST_CASE("MDP round trip is exact") {
  oracle::Rng rng(71);
  const auto mdp = oracle::random_mdp(rng, 3, 2, 0.9);
  const auto back = mdp_from_json(mdp_to_json(mdp));
  CHECK(back.num_states() == 3);
  CHECK(back.num_actions() == 2);
  CHECK(back.discount() == mdp.discount());
  CHECK(back.transition() == mdp.transition());
  CHECK(back.reward() == mdp.reward());
  CHECK(back.initial_dist() == mdp.initial_dist());
  const Json j = Json::parse(mdp_to_json(mdp));
  CHECK(j.at("transition").size() == 18);  // m x |S|, row-major
}

TEST_CASE("MDP parse errors") {
  CHECK_THROWS_AS(mdp_from_json("{"), ParseError);
  CHECK_THROWS_AS(mdp_from_json("{\"num_states\": 1}"), ParseError);
  Json j = Json::parse(mdp_to_json(generate_garnet({3, 2, 0.5, 2, 1})));
  j["extra"] = 1;
  CHECK_THROWS_AS(mdp_from_json(j.dump()), ParseError);
  j.erase("extra");
  j["gamma"] = 1.5;
  CHECK_THROWS_AS(mdp_from_json(j.dump()), InvalidArgument);
  j["gamma"] = 0.5;
  j["transition"] = Json::array({1.0});
  CHECK_THROWS(mdp_from_json(j.dump()));
}

TEST_CASE("data distribution round trip") {
  Vector mu(4);
  mu << 0.125, 0.375, 0.5, 0.0;
  const DataDistribution dist(mu, 2);
  const auto back = dist_from_json(dist_to_json(dist));
  CHECK(back.mu() == mu);
  CHECK(back.num_actions() == 2);
  CHECK_THROWS_AS(dist_from_json("{\"mu\": [1.0]}"), ParseError);
}

TEST_CASE("audit report encodes non-finite numbers as strings") {
  AuditReport report;
  report.checks.push_back({"gap_chain", "no inactive pairs", 0.5, kInfinity, kInfinity, true});
  report.checks.push_back({"validity", "x <= 0", 0.25, 0.0, -0.25, false});
  const Json j = Json::parse(audit_report_json(report));
  CHECK(j.at("all_pass") == false);
  REQUIRE(j.at("checks").size() == 2);
  CHECK(j.at("checks")[0].at("rhs") == "inf");
  CHECK(j.at("checks")[0].at("statement") == "no inactive pairs");
  CHECK(j.at("checks")[1].at("slack").get<double>() == -0.25);
  CHECK(j.at("checks")[1].at("pass") == false);
  CHECK_FALSE(j.contains("coverage"));
}

TEST_CASE("solve reports") {
  oracle::Rng rng(72);
  const auto mdp = oracle::random_mdp(rng, 3, 2, 0.8);
  const DataDistribution dist(oracle::random_distribution(rng, 6), 2);
  const auto model = population_model(mdp, dist);
  Case2Config cfg;
  cfg.b_w = 100.0;
  const auto sol = solve_case2(model, dist.behavior(), cfg);
  REQUIRE(sol.optimal());
  ReportContext ctx;
  ctx.subopt = 0.0;
  ctx.delta_q = 0.25;
  const Json j = Json::parse(case2_report_json(sol, 3.5, ctx));
  CHECK(j.at("status") == "optimal");
  CHECK(j.at("w").size() == 6);
  CHECK(j.at("policy").size() == 3);
  CHECK(j.at("bound_rhs").get<double>() == 3.5);
  CHECK(j.at("delta_pop") == "nan");
  CHECK(j.at("epsilon").is_null());
  CHECK(j.at("delta_q").get<double>() == 0.25);

  Case1Config cfg1;
  cfg1.b_w = 100.0;
  cfg1.mode = ThresholdMode::kExplicit;
  const auto sol1 = solve_case1(model, mdp.initial_dist(), dist.behavior(), cfg1, 100);
  REQUIRE(sol1.optimal());
  const auto variants = tabular_threshold_variants(2.0, 3, 2, 0.05, 100);
  const Json j1 = Json::parse(case1_report_json(sol1, ctx, &variants));
  CHECK(j1.at("epsilon").get<double>() == 0.0);
  CHECK(j1.at("threshold_variants").at("proof").get<double>() == doctest::Approx(variants.proof));
  CHECK(j1.at("subopt").get<double>() == 0.0);
}

TEST_CASE("experiment config") {
  ExperimentConfig cfg;
  cfg.mdp_spec.num_states = 5;
  cfg.n_grid = {10, 20};
  cfg.cases = CaseSelection::kTwo;
  cfg.threshold = ThresholdMode::kGeneral;
  cfg.population = true;
  cfg.log_card_w = 3.5;
  const auto back = config_from_json(config_to_json(cfg));
  CHECK(back.mdp_spec.num_states == 5);
  CHECK(back.n_grid == cfg.n_grid);
  CHECK(back.cases == CaseSelection::kTwo);
  CHECK(back.threshold == ThresholdMode::kGeneral);
  CHECK(back.population);
  CHECK(back.log_card_w == 3.5);
  CHECK(std::isnan(back.log_card_v));
  CHECK(std::isnan(back.b_w));

  const auto partial = config_from_json("{\"num_seeds\": 4, \"mdp_spec\": {\"gamma\": 0.5}}", cfg);
  CHECK(partial.num_seeds == 4);
  CHECK(partial.mdp_spec.gamma == 0.5);
  CHECK(partial.mdp_spec.num_states == 5);
  CHECK_THROWS_AS(config_from_json("{\"seeds\": 4}"), ParseError);
  CHECK_THROWS_AS(config_from_json("{\"mdp_spec\": {\"size\": 4}}"), ParseError);
  CHECK_THROWS_AS(config_from_json("{\"case\": \"three\"}"), ParseError);
}

TEST_CASE("enum names") {
  for (auto c : {CaseSelection::kOne, CaseSelection::kTwo, CaseSelection::kBoth})
    CHECK(case_selection_from_string(to_string(c)) == c);
  for (auto m : {ThresholdMode::kGeneral, ThresholdMode::kTabular, ThresholdMode::kExplicit})
    CHECK(threshold_mode_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(threshold_mode_from_string("exact"), ParseError);
}

TEST_CASE("rate fit JSON") {
  RateFit fit;
  fit.saturated = true;
  fit.medians = {{100, 0.5}, {400, 0.0}};
  const Json j = Json::parse(rate_fit_json(fit));
  CHECK(j.at("verdict") == "saturated");
  CHECK(j.at("slope") == "nan");
}

}  // TEST_SUITE
