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

// Command-line front end over the C interface.
//
//   lpoff gen | sample | solve-case1 | solve-case2 | check | sweep | rate
//
// Exit status: 0 on success, 1 when an audit or solve fails, 2 on usage or
// input errors.

#include "lpoff/lpoffline.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MdpDeleter {
  void operator()(lpo_mdp* p) const { lpo_mdp_free(p); }
};
struct DistDeleter {
  void operator()(lpo_dist* p) const { lpo_dist_free(p); }
};
struct DatasetDeleter {
  void operator()(lpo_dataset* p) const { lpo_dataset_free(p); }
};
using MdpPtr = std::unique_ptr<lpo_mdp, MdpDeleter>;
using DistPtr = std::unique_ptr<lpo_dist, DistDeleter>;
using DatasetPtr = std::unique_ptr<lpo_dataset, DatasetDeleter>;

/// Owns a string returned by the library.
class OwnedString {
 public:
  OwnedString() = default;
  ~OwnedString() { lpo_string_free(ptr_); }
  OwnedString(const OwnedString&) = delete;
  OwnedString& operator=(const OwnedString&) = delete;

  char** out() { return &ptr_; }
  std::string str() const { return ptr_ != nullptr ? std::string(ptr_) : std::string(); }

 private:
  char* ptr_ = nullptr;
};

void ok(lpo_status status, const std::string& what) {
  if (status != LPO_OK)
    throw CliError(what + ": " + lpo_status_name(status) + ": " + lpo_last_error());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError("cannot write " + path);
  out << text;
}

struct DistOptions {
  std::string mu_path;
  double alpha = 0.5;
  std::uint64_t mu_seed = 1;
};

void add_dist_options(CLI::App* cmd, DistOptions& opts) {
  auto* mu = cmd->add_option("--mu", opts.mu_path, "Data distribution JSON {num_actions, mu}");
  cmd->add_option("--alpha", opts.alpha, "Coverage mixing weight when --mu is absent")
      ->excludes(mu)
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--mu-seed", opts.mu_seed, "Tie-break seed for the generated distribution")
      ->excludes(mu);
}

MdpPtr load_mdp(const std::string& path) {
  lpo_mdp* raw = nullptr;
  ok(lpo_mdp_from_json(read_file(path).c_str(), &raw), "loading " + path);
  return MdpPtr(raw);
}

DistPtr load_dist(const lpo_mdp* mdp, const DistOptions& opts) {
  lpo_dist* raw = nullptr;
  if (!opts.mu_path.empty())
    ok(lpo_dist_from_json(read_file(opts.mu_path).c_str(), &raw), "loading " + opts.mu_path);
  else
    ok(lpo_dist_generate(mdp, opts.alpha, opts.mu_seed, &raw), "generating mu");
  return DistPtr(raw);
}

DatasetPtr load_dataset(const std::string& path) {
  if (path.empty()) return nullptr;
  lpo_dataset* raw = nullptr;
  ok(lpo_dataset_from_csv(read_file(path).c_str(), &raw), "loading " + path);
  return DatasetPtr(raw);
}

struct SolveOptions {
  std::string mdp_path;
  DistOptions dist;
  std::string data_path;
  std::int64_t n = 0;
  double b_w = std::nan("");
  double delta = 0.05;
  std::string threshold = "tabular";
  double epsilon = std::nan("");
  double log_card_b = std::nan("");
  double log_card_w = std::nan("");
  double log_card_v = std::nan("");
  std::string dump_lp;
  std::string out;
};

void add_solve_options(CLI::App* cmd, SolveOptions& opts, bool case1, bool case2) {
  cmd->add_option("--mdp", opts.mdp_path, "MDP JSON")->required();
  add_dist_options(cmd, opts.dist);
  auto* data = cmd->add_option("--data", opts.data_path, "Dataset CSV; exact model when absent");
  cmd->add_option("-n,--n", opts.n, "Sample size for the formulas when --data is absent")
      ->excludes(data);
  cmd->add_option("--b-w", opts.b_w, "Weight bound B_w (default: max(1, C*))");
  cmd->add_option("--delta", opts.delta, "Confidence parameter");
  if (case1) {
    cmd->add_option("--threshold", opts.threshold, "general | tabular | explicit")
        ->check(CLI::IsMember({"general", "tabular", "explicit"}));
    cmd->add_option("--epsilon", opts.epsilon, "Explicit budget (implies --threshold explicit)");
    cmd->add_option("--log-card-b", opts.log_card_b, "log |B| for the general threshold");
    cmd->add_option("--log-card-w", opts.log_card_w, "log |W| for the general threshold");
  }
  if (case2) {
    cmd->add_option("--log-card-v", opts.log_card_v, "log |V| for the minimax bounds");
    if (!case1) cmd->add_option("--log-card-w", opts.log_card_w, "log |W| for the minimax bounds");
  }
  if (case1 != case2) cmd->add_option("--dump-lp", opts.dump_lp, "Write the compiled LP here");
  cmd->add_option("-o,--out", opts.out, "Output file (default stdout)");
}

lpo_case1_params case1_params(const SolveOptions& opts) {
  lpo_case1_params p;
  lpo_case1_params_default(&p);
  p.b_w = opts.b_w;
  p.delta = opts.delta;
  p.mode = opts.threshold == "general"    ? LPO_THRESHOLD_GENERAL
           : opts.threshold == "explicit" ? LPO_THRESHOLD_EXPLICIT
                                          : LPO_THRESHOLD_TABULAR;
  if (!std::isnan(opts.epsilon)) {
    p.mode = LPO_THRESHOLD_EXPLICIT;
    p.epsilon = opts.epsilon;
  }
  p.log_card_b = opts.log_card_b;
  p.log_card_w = opts.log_card_w;
  p.n = opts.n;
  p.lp_dump_path = opts.dump_lp.empty() ? nullptr : opts.dump_lp.c_str();
  return p;
}

lpo_case2_params case2_params(const SolveOptions& opts) {
  lpo_case2_params p;
  lpo_case2_params_default(&p);
  p.b_w = opts.b_w;
  p.delta = opts.delta;
  p.log_card_w = opts.log_card_w;
  p.log_card_v = opts.log_card_v;
  p.n = opts.n;
  p.lp_dump_path = opts.dump_lp.empty() ? nullptr : opts.dump_lp.c_str();
  return p;
}

/// Runs a solve-style call whose report is written even when the status is
/// a solve or audit failure.
int finish_report(lpo_status status, OwnedString& report, const std::string& out,
                  const std::string& what) {
  if (status == LPO_OK || status == LPO_ERR_INFEASIBLE || status == LPO_ERR_AUDIT_FAILED) {
    emit(report.str(), out);
    if (status != LPO_OK) {
      std::cerr << what << ": " << lpo_status_name(status) << ": " << lpo_last_error() << '\n';
      return 1;
    }
    return 0;
  }
  ok(status, what);
  return 0;
}

struct SweepOptions {
  std::string config_path;
  std::optional<int> num_states;
  std::optional<int> num_actions;
  std::optional<double> gamma;
  std::optional<int> branching;
  std::optional<std::uint64_t> mdp_seed;
  std::optional<double> alpha;
  std::vector<std::int64_t> n_grid;
  std::optional<int> num_seeds;
  std::optional<std::uint64_t> first_seed;
  std::optional<double> delta;
  std::optional<double> b_w;
  std::optional<std::string> cases;
  std::optional<std::string> threshold;
  std::optional<double> log_card_w;
  std::optional<double> log_card_v;
  bool population = false;
  std::optional<int> threads;
  std::string out;
};

template <typename T>
void put(Json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

std::string merged_config(const SweepOptions& o) {
  Json cfg = o.config_path.empty() ? Json::object() : Json::parse(read_file(o.config_path));
  if (!cfg.is_object()) throw CliError("config must be a JSON object");
  Json spec = cfg.contains("mdp_spec") ? cfg["mdp_spec"] : Json::object();
  put(spec, "num_states", o.num_states);
  put(spec, "num_actions", o.num_actions);
  put(spec, "gamma", o.gamma);
  put(spec, "branching_factor", o.branching);
  put(spec, "seed", o.mdp_seed);
  if (!spec.empty()) cfg["mdp_spec"] = spec;
  put(cfg, "coverage_alpha", o.alpha);
  if (!o.n_grid.empty()) cfg["n_grid"] = o.n_grid;
  put(cfg, "num_seeds", o.num_seeds);
  put(cfg, "first_seed", o.first_seed);
  put(cfg, "delta", o.delta);
  put(cfg, "b_w", o.b_w);
  put(cfg, "case", o.cases);
  put(cfg, "threshold", o.threshold);
  put(cfg, "log_card_w", o.log_card_w);
  put(cfg, "log_card_v", o.log_card_v);
  if (o.population) cfg["population"] = true;
  put(cfg, "threads", o.threads);
  if (!o.out.empty()) cfg["output_path"] = o.out;
  return cfg.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline policy optimization by linear programming over occupancy ratios"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lpo_version());

  // gen
  struct {
    std::string config_path;
    int num_states = 8, num_actions = 3, branching = 4;
    double gamma = 0.9;
    std::uint64_t seed = 1;
    std::string out;
  } gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random Garnet MDP as JSON");
  gen_cmd->add_option("--config", gen.config_path, "Experiment config; mdp_spec supplies defaults");
  gen_cmd->add_option("--states", gen.num_states, "Number of states");
  gen_cmd->add_option("--actions", gen.num_actions, "Number of actions");
  gen_cmd->add_option("--gamma", gen.gamma, "Discount factor");
  gen_cmd->add_option("--branching", gen.branching, "Successors per state-action pair");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("-o,--out", gen.out, "Output file (default stdout)");

  // sample
  struct {
    std::string mdp_path;
    DistOptions dist;
    std::int64_t n = 1000;
    std::uint64_t seed = 1;
    std::string out;
    std::string mu_out;
  } sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw an i.i.d. dataset as CSV");
  sample_cmd->add_option("--mdp", sample.mdp_path, "MDP JSON")->required();
  add_dist_options(sample_cmd, sample.dist);
  sample_cmd->add_option("-n,--n", sample.n, "Number of tuples");
  sample_cmd->add_option("--seed", sample.seed, "Sampling seed");
  sample_cmd->add_option("-o,--out", sample.out, "Output CSV (default stdout)");
  sample_cmd->add_option("--mu-out", sample.mu_out, "Also write the data distribution JSON");

  SolveOptions solve1;
  auto* solve1_cmd = app.add_subcommand("solve-case1", "Solve the budgeted LP");
  add_solve_options(solve1_cmd, solve1, true, false);

  SolveOptions solve2;
  auto* solve2_cmd = app.add_subcommand("solve-case2", "Solve the lower-bounded minimax LP");
  add_solve_options(solve2_cmd, solve2, false, true);

  SolveOptions check;
  auto* check_cmd = app.add_subcommand("check", "Solve both programs and audit every inequality");
  add_solve_options(check_cmd, check, true, true);

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a sample-size sweep and emit CSV");
  sweep_cmd->add_option("--config", sweep.config_path, "Experiment config JSON");
  sweep_cmd->add_option("--states", sweep.num_states, "Number of states");
  sweep_cmd->add_option("--actions", sweep.num_actions, "Number of actions");
  sweep_cmd->add_option("--gamma", sweep.gamma, "Discount factor");
  sweep_cmd->add_option("--branching", sweep.branching, "Successors per pair");
  sweep_cmd->add_option("--mdp-seed", sweep.mdp_seed, "Seed of the MDP and mu");
  sweep_cmd->add_option("--alpha", sweep.alpha, "Coverage mixing weight");
  sweep_cmd->add_option("--n-grid", sweep.n_grid, "Sample sizes")->delimiter(',');
  sweep_cmd->add_option("--seeds", sweep.num_seeds, "Number of dataset seeds");
  sweep_cmd->add_option("--first-seed", sweep.first_seed, "First dataset seed");
  sweep_cmd->add_option("--delta", sweep.delta, "Confidence parameter");
  sweep_cmd->add_option("--b-w", sweep.b_w, "Weight bound (default 2/alpha)");
  sweep_cmd->add_option("--case", sweep.cases, "one | two | both");
  sweep_cmd->add_option("--threshold", sweep.threshold, "general | tabular");
  sweep_cmd->add_option("--log-card-w", sweep.log_card_w, "log |W| surrogate");
  sweep_cmd->add_option("--log-card-v", sweep.log_card_v, "log |V| surrogate");
  sweep_cmd->add_flag("--population", sweep.population, "Use the exact model instead of data");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");
  sweep_cmd->add_option("-o,--out", sweep.out, "Output CSV (default: config output_path or stdout)");

  struct {
    std::string csv_path;
    int case_id = 1;
    std::string out;
  } rate;
  auto* rate_cmd = app.add_subcommand("rate", "Fit the log-log rate of a sweep CSV");
  rate_cmd->add_option("--csv", rate.csv_path, "Sweep CSV")->required();
  rate_cmd->add_option("--case", rate.case_id, "1 or 2")->check(CLI::IsMember({1, 2}));
  rate_cmd->add_option("-o,--out", rate.out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      if (!gen.config_path.empty()) {
        const Json cfg = Json::parse(read_file(gen.config_path));
        if (cfg.contains("mdp_spec")) {
          const Json& spec = cfg["mdp_spec"];
          if (!gen_cmd->count("--states") && spec.contains("num_states"))
            gen.num_states = spec["num_states"].get<int>();
          if (!gen_cmd->count("--actions") && spec.contains("num_actions"))
            gen.num_actions = spec["num_actions"].get<int>();
          if (!gen_cmd->count("--gamma") && spec.contains("gamma"))
            gen.gamma = spec["gamma"].get<double>();
          if (!gen_cmd->count("--branching") && spec.contains("branching_factor"))
            gen.branching = spec["branching_factor"].get<int>();
          if (!gen_cmd->count("--seed") && spec.contains("seed"))
            gen.seed = spec["seed"].get<std::uint64_t>();
        }
      }
      lpo_mdp* raw = nullptr;
      ok(lpo_mdp_garnet(gen.num_states, gen.num_actions, gen.gamma, gen.branching, gen.seed, &raw),
         "gen");
      MdpPtr mdp(raw);
      OwnedString json;
      ok(lpo_mdp_to_json(mdp.get(), json.out()), "gen");
      emit(json.str(), gen.out);
      return 0;
    }
    if (sample_cmd->parsed()) {
      const MdpPtr mdp = load_mdp(sample.mdp_path);
      const DistPtr dist = load_dist(mdp.get(), sample.dist);
      lpo_dataset* raw = nullptr;
      ok(lpo_dataset_sample(mdp.get(), dist.get(), sample.n, sample.seed, &raw), "sample");
      DatasetPtr data(raw);
      OwnedString csv;
      ok(lpo_dataset_to_csv(data.get(), csv.out()), "sample");
      emit(csv.str(), sample.out);
      if (!sample.mu_out.empty()) {
        OwnedString mu;
        ok(lpo_dist_to_json(dist.get(), mu.out()), "sample");
        emit(mu.str(), sample.mu_out);
      }
      return 0;
    }
    if (solve1_cmd->parsed() || solve2_cmd->parsed() || check_cmd->parsed()) {
      const SolveOptions& o = solve1_cmd->parsed() ? solve1 : solve2_cmd->parsed() ? solve2 : check;
      const MdpPtr mdp = load_mdp(o.mdp_path);
      const DistPtr dist = load_dist(mdp.get(), o.dist);
      const DatasetPtr data = load_dataset(o.data_path);
      if (!data && o.n < 1) throw CliError("pass --data or a sample size --n for the exact model");
      OwnedString report;
      if (solve1_cmd->parsed()) {
        const auto p = case1_params(o);
        return finish_report(lpo_solve_case1(mdp.get(), dist.get(), data.get(), &p, report.out()),
                             report, o.out, "solve-case1");
      }
      if (solve2_cmd->parsed()) {
        const auto p = case2_params(o);
        return finish_report(lpo_solve_case2(mdp.get(), dist.get(), data.get(), &p, report.out()),
                             report, o.out, "solve-case2");
      }
      const auto p1 = case1_params(o);
      const auto p2 = case2_params(o);
      return finish_report(lpo_check(mdp.get(), dist.get(), data.get(), &p1, &p2, report.out()),
                           report, o.out, "check");
    }
    if (sweep_cmd->parsed()) {
      const std::string config = merged_config(sweep);
      OwnedString csv;
      ok(lpo_sweep(config.c_str(), csv.out()), "sweep");
      std::string out = sweep.out;
      if (out.empty()) {
        const Json cfg = Json::parse(config);
        if (cfg.contains("output_path")) out = cfg["output_path"].get<std::string>();
      }
      emit(csv.str(), out);
      return 0;
    }
    if (rate_cmd->parsed()) {
      OwnedString json;
      ok(lpo_fit_rate(read_file(rate.csv_path).c_str(), rate.case_id, json.out()), "rate");
      emit(json.str(), rate.out);
      return 0;
    }
  } catch (const Json::exception& e) {
    std::cerr << "lpoff: invalid JSON: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lpoff: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
