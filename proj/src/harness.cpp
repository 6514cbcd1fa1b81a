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

#include "lpoff/harness.hpp"

#include "lpoff/case2.hpp"
#include "lpoff/diagnostics.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace lpoff {

namespace {

constexpr std::uint64_t kGarnetStream = 0x6a;
constexpr std::uint64_t kTieBreakStream = 0x7b;

/// Everything a sweep shares across seeds.
struct SweepContext {
  const ExperimentConfig& config;
  TabularMdp mdp;
  OptimalityProfile profile;
  DataDistribution dist;
  CoverageAudit coverage;
  EmpiricalModel population;
  Case1Config case1;
  Case2Config case2;
  double case2_min_population = 0.0;
  double j_star_mu0 = 0.0;
  double j_star_mu = 0.0;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

SweepRow case1_row(const SweepContext& ctx, const EmpiricalModel& model, std::uint64_t seed,
                   std::int64_t n) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.seed = seed;
  row.n = n;
  row.case_id = 1;
  row.c_star = ctx.coverage.c_star;
  row.delta_q = ctx.profile.gap;

  const int ns = ctx.mdp.num_states();
  const int na = ctx.mdp.num_actions();
  Case1Config cfg = ctx.case1;
  double epsilon = case1_epsilon(cfg, ns, na, n);
  Case1Solution sol;
  for (int attempt = 0; attempt <= kMaxBudgetRelaxations; ++attempt) {
    if (attempt > 0) epsilon *= 2.0;
    Case1Config attempt_cfg = cfg;
    attempt_cfg.mode = ThresholdMode::kExplicit;
    attempt_cfg.epsilon = epsilon;
    sol = solve_case1(model, ctx.mdp.initial_dist(), ctx.dist.behavior(), attempt_cfg, n);
    if (sol.status != LpStatus::kInfeasible) {
      row.status = sol.optimal() ? (attempt == 0 ? "optimal" : "relaxed") : to_string(sol.status);
      break;
    }
    row.status = to_string(sol.status);
  }
  row.bound_rhs = bound_main1(cfg, ns, na, n, ctx.mdp.discount());
  if (sol.optimal()) {
    row.subopt = ctx.j_star_mu0 - return_of(ctx.mdp, *sol.policy, ctx.mdp.initial_dist());
    row.l1_residual = sol.l1_residual;
  }
  row.runtime_ms = elapsed_ms(start);
  return row;
}

SweepRow case2_row(const SweepContext& ctx, const EmpiricalModel& model, std::uint64_t seed,
                   std::int64_t n) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.seed = seed;
  row.n = n;
  row.case_id = 2;
  row.c_star = ctx.coverage.c_star_mu;
  row.c_max = ctx.coverage.c_max.value;
  row.delta_q = ctx.profile.gap;

  const Case2Solution sol = solve_case2(model, ctx.dist.behavior(), ctx.case2);
  row.status = sol.violating_state >= 0 ? "infeasible" : to_string(sol.status);
  const Case2Bound bound =
      bound_main2(ctx.case2, ctx.mdp.discount(), ctx.coverage.c_max.value, ctx.profile.gap, n);
  if (!bound.degenerate) row.bound_rhs = bound.value;
  if (sol.optimal()) {
    row.subopt = ctx.j_star_mu - return_of(ctx.mdp, *sol.policy, ctx.dist.state_marginal());
    row.l1_residual = sol.l1_residual;
    row.delta_emp = sol.delta_emp;
    row.delta_pop = primal_gap(ctx.population, sol.w_d, ctx.dist.behavior(), ctx.case2,
                               ctx.case2_min_population);
    row.inactive_mass = inactive_mass(sol.w_d, ctx.dist.mu(), ctx.profile.inactive);
  }
  row.runtime_ms = elapsed_ms(start);
  return row;
}

std::vector<SweepRow> rows_for_seed(const SweepContext& ctx, std::uint64_t seed) {
  const ExperimentConfig& config = ctx.config;
  const bool run1 = config.cases != CaseSelection::kTwo;
  const bool run2 = config.cases != CaseSelection::kOne;
  std::vector<SweepRow> rows;
  for (const std::int64_t n : config.n_grid) {
    EmpiricalModel model = ctx.population;
    if (!config.population) {
      const Dataset data = sample_dataset(ctx.mdp, ctx.dist, n, seed);
      model = empirical_model(data, ctx.mdp.reward(), ctx.mdp.num_states(),
                              ctx.mdp.num_actions(), ctx.mdp.discount());
    }
    if (run1) rows.push_back(case1_row(ctx, model, seed, n));
    if (run2) rows.push_back(case2_row(ctx, model, seed, n));
  }
  return rows;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size();
  return k % 2 == 1 ? values[k / 2] : 0.5 * (values[k / 2 - 1] + values[k / 2]);
}

std::string csv_double(double x) { return std::isnan(x) ? std::string() : detail::format_double(x); }

double csv_read_double(std::string_view field, int line_no) {
  return detail::trim(field).empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : detail::parse_double(field, line_no);
}

}  // namespace

TabularMdp generate_garnet(const GarnetSpec& spec) {
  const int ns = spec.num_states;
  const int na = spec.num_actions;
  if (ns < 1 || na < 1) throw InvalidArgument("garnet needs at least one state and action");
  if (spec.branching_factor < 1 || spec.branching_factor > ns)
    throw InvalidArgument("branching factor must lie in [1, num_states]");

  auto engine = make_engine(spec.seed, kGarnetStream);
  std::exponential_distribution<double> exponential(1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const int m = ns * na;
  Matrix transition = Matrix::Zero(m, ns);
  Vector reward(m);
  std::vector<int> states(static_cast<std::size_t>(ns));
  for (int i = 0; i < m; ++i) {
    std::iota(states.begin(), states.end(), 0);
    // Partial Fisher-Yates: the first branching_factor entries are a uniform
    // draw without replacement.
    for (int k = 0; k < spec.branching_factor; ++k) {
      std::uniform_int_distribution<int> pick(k, ns - 1);
      std::swap(states[static_cast<std::size_t>(k)], states[static_cast<std::size_t>(pick(engine))]);
    }
    double total = 0.0;
    for (int k = 0; k < spec.branching_factor; ++k) {
      const double weight = exponential(engine);
      transition(i, states[static_cast<std::size_t>(k)]) = weight;
      total += weight;
    }
    transition.row(i) /= total;
    reward(i) = uniform(engine);
  }
  return TabularMdp(ns, na, std::move(transition), std::move(reward), spec.gamma,
                    Vector::Constant(ns, 1.0 / ns));
}

DataDistribution generate_mu(const TabularMdp& mdp, const OptimalityProfile& profile,
                             double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0,1]");
  auto engine = make_engine(seed, kTieBreakStream);
  std::vector<int> actions;
  for (const auto& set : profile.argmax_sets) {
    std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
    actions.push_back(set[pick(engine)]);
  }
  const Vector& mu0 = mdp.initial_dist();
  const auto theta_star =
      occupancy_measure(mdp, Policy::deterministic(actions, mdp.num_actions()), mu0);
  const auto theta_unif =
      occupancy_measure(mdp, Policy::uniform(mdp.num_states(), mdp.num_actions()), mu0);
  Vector mu = alpha * theta_star.values + (1.0 - alpha) * theta_unif.values;
  mu /= mu.sum();
  return DataDistribution(std::move(mu), mdp.num_actions());
}

void ExperimentConfig::validate() const {
  if (!(coverage_alpha > 0.0 && coverage_alpha <= 1.0))
    throw InvalidArgument("coverage_alpha must lie in (0,1]");
  if (n_grid.empty()) throw InvalidArgument("n_grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw InvalidArgument("n_grid entries must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw InvalidArgument("n_grid must be strictly increasing");
  }
  if (num_seeds < 1) throw InvalidArgument("num_seeds must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
  if (!(effective_b_w() >= 1.0)) throw InvalidArgument("B_w must be >= 1");
  if (threads < 0) throw InvalidArgument("threads must be >= 0");
}

double ExperimentConfig::effective_b_w() const {
  return std::isnan(b_w) ? 2.0 / coverage_alpha : b_w;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  config.validate();
  TabularMdp mdp = generate_garnet(config.mdp_spec);
  OptimalityProfile profile = optimal_profile(mdp);
  DataDistribution dist = generate_mu(mdp, profile, config.coverage_alpha, config.mdp_spec.seed);
  CoverageAudit coverage = coverage_audit(mdp, profile, dist);
  EmpiricalModel population = population_model(mdp, dist);
  SweepContext ctx{config,     std::move(mdp), std::move(profile), std::move(dist),
                   std::move(coverage), std::move(population), {}, {}, 0.0, 0.0, 0.0};

  ctx.case1.b_w = config.effective_b_w();
  ctx.case1.delta = config.delta;
  ctx.case1.mode = config.threshold;
  ctx.case1 = ctx.case1.resolved(ctx.mdp.num_states(), ctx.mdp.num_actions());

  // The minimax class must contain the optimal ratio, whose sup norm is the
  // mu-initialized concentrability.
  ctx.case2.b_w = std::max(config.effective_b_w(), ctx.coverage.c_star_mu);
  ctx.case2.delta = config.delta;
  ctx.case2.log_card_w = config.log_card_w;
  ctx.case2.log_card_v = config.log_card_v;
  ctx.case2 = ctx.case2.resolved(ctx.mdp.num_states(), ctx.mdp.num_actions());

  const Policy pi_star = ctx.profile.greedy_policy();
  ctx.j_star_mu0 = return_of(ctx.mdp, pi_star, ctx.mdp.initial_dist());
  ctx.j_star_mu = return_of(ctx.mdp, pi_star, ctx.dist.state_marginal());
  if (config.cases != CaseSelection::kOne)
    ctx.case2_min_population = case2_min_value(ctx.population, ctx.dist.behavior(), ctx.case2);

  const auto num_tasks = static_cast<std::size_t>(config.num_seeds);
  std::vector<std::vector<SweepRow>> per_seed(num_tasks);
  std::vector<std::string> errors(num_tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < num_tasks; i = next++) {
      try {
        per_seed[i] = rows_for_seed(ctx, config.first_seed + i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(num_tasks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < num_tasks; ++i)
    if (!errors[i].empty())
      throw NumericError("sweep seed " + std::to_string(config.first_seed + i) + ": " + errors[i]);

  std::vector<SweepRow> rows;
  for (auto& seed_rows : per_seed) rows.insert(rows.end(), seed_rows.begin(), seed_rows.end());
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.seed, a.n, a.case_id) < std::tie(b.seed, b.n, b.case_id);
  });
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.seed << ',' << r.n << ',' << r.case_id << ',' << csv_double(r.subopt) << ','
        << csv_double(r.bound_rhs) << ',' << csv_double(r.l1_residual) << ','
        << csv_double(r.delta_emp) << ',' << csv_double(r.delta_pop) << ','
        << csv_double(r.inactive_mass) << ',' << csv_double(r.c_star) << ','
        << csv_double(r.c_max) << ',' << csv_double(r.delta_q) << ',' << r.status << ','
        << csv_double(r.runtime_ms) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("sweep CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader) throw ParseError("unexpected sweep CSV header");
  std::vector<SweepRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 14) {
      std::ostringstream msg;
      msg << "sweep CSV line " << line_no << ": expected 14 fields";
      throw ParseError(msg.str());
    }
    SweepRow r;
    r.seed = detail::parse_int<std::uint64_t>(f[0], line_no);
    r.n = detail::parse_int<std::int64_t>(f[1], line_no);
    r.case_id = detail::parse_int(f[2], line_no);
    r.subopt = csv_read_double(f[3], line_no);
    r.bound_rhs = csv_read_double(f[4], line_no);
    r.l1_residual = csv_read_double(f[5], line_no);
    r.delta_emp = csv_read_double(f[6], line_no);
    r.delta_pop = csv_read_double(f[7], line_no);
    r.inactive_mass = csv_read_double(f[8], line_no);
    r.c_star = csv_read_double(f[9], line_no);
    r.c_max = csv_read_double(f[10], line_no);
    r.delta_q = csv_read_double(f[11], line_no);
    r.status = std::string(detail::trim(f[12]));
    r.runtime_ms = csv_read_double(f[13], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string RateFit::verdict() const {
  if (!nonincreasing) return "increasing";
  return saturated ? "saturated" : "fitted";
}

RateFit fit_rate(const std::vector<SweepRow>& rows, int case_id) {
  std::vector<std::int64_t> grid;
  for (const auto& r : rows)
    if (r.case_id == case_id && r.solved() && !std::isnan(r.subopt)) grid.push_back(r.n);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  RateFit fit;
  for (const std::int64_t n : grid) {
    std::vector<double> values;
    for (const auto& r : rows)
      if (r.case_id == case_id && r.n == n && r.solved() && !std::isnan(r.subopt))
        values.push_back(r.subopt);
    fit.medians.emplace_back(n, median(std::move(values)));
  }
  for (std::size_t i = 1; i < fit.medians.size(); ++i)
    if (fit.medians[i].second > fit.medians[i - 1].second + 1e-12) fit.nonincreasing = false;

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [n, med] : fit.medians) {
    if (med > kSaturationLevel) {
      xs.push_back(std::log(static_cast<double>(n)));
      ys.push_back(std::log(med));
    }
  }
  fit.unsaturated_points = static_cast<int>(xs.size());
  if (xs.size() < 3) {
    fit.saturated = true;
    return fit;
  }
  const double k = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace lpoff
