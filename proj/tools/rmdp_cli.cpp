// Copyright 2026 The rmdp-lp Authors.
//
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

// rmdp: command-line front end over the C API.
//
//   rmdp solve MODEL [--mode sa|s] [--p P] [--beta B] [--alpha A] [--tol T]
//                    [--out FILE]
//   rmdp verify [--states N] [--count N] [--p P,...] [--beta B,...] ...
//   rmdp sample-complexity [--model FILE | --states N --actions N ...]
//   rmdp random-model --states N --actions N [--gamma G] [--seed S]
//
// Exit status: 0 success, 1 a verification check failed, 2 bad input
// (arguments, parse or validation errors), 3 a solve did not converge.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rmdp/rmdp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitNoConvergence = 3;

struct ModelDeleter {
  void operator()(rmdp_model* m) const { rmdp_model_free(m); }
};
struct UncertaintyDeleter {
  void operator()(rmdp_uncertainty* u) const { rmdp_uncertainty_free(u); }
};
struct SolutionDeleter {
  void operator()(rmdp_solution* s) const { rmdp_solution_free(s); }
};
struct ExperimentDeleter {
  void operator()(rmdp_experiment* e) const { rmdp_experiment_free(e); }
};
struct ReportDeleter {
  void operator()(rmdp_verify_report* r) const { rmdp_verify_report_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { rmdp_string_free(s); }
};

using ModelPtr = std::unique_ptr<rmdp_model, ModelDeleter>;
using UncertaintyPtr = std::unique_ptr<rmdp_uncertainty, UncertaintyDeleter>;
using SolutionPtr = std::unique_ptr<rmdp_solution, SolutionDeleter>;
using ExperimentPtr = std::unique_ptr<rmdp_experiment, ExperimentDeleter>;
using ReportPtr = std::unique_ptr<rmdp_verify_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Carries an exit status out of the command handlers.
struct Failure {
  int exit_code;
  std::string message;
};

void check(rmdp_status status, const std::string& context) {
  if (status == RMDP_OK) return;
  std::string msg = context + ": " + rmdp_last_error();
  if (std::string(rmdp_last_error()).empty()) msg += rmdp_status_name(status);
  throw Failure{status == RMDP_ERR_NON_CONVERGENCE ? kExitNoConvergence
                                                   : kExitBadInput,
                msg};
}

double parse_p(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity") return INFINITY;
  char* end = nullptr;
  const double p = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !(p >= 1.0)) {
    throw Failure{kExitBadInput,
                  "--p must be a number >= 1 or \"inf\", got \"" + text + "\""};
  }
  return p;
}

std::string format_p(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream out;
  out << p;
  return out.str();
}

rmdp_mode parse_mode(const std::string& text) {
  if (text == "sa") return RMDP_MODE_SA;
  if (text == "s") return RMDP_MODE_S;
  throw Failure{kExitBadInput, "--mode must be sa or s, got \"" + text + "\""};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{kExitBadInput, "cannot write " + path};
}

// Uncertainty flags shared by several subcommands.
struct UncertaintyFlags {
  std::string mode;
  std::string p;
  std::optional<double> beta;
  std::optional<double> alpha;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "Rectangularity: sa or s");
    cmd->add_option("--p", p, "Ball exponent in [1, inf]");
    cmd->add_option("--beta", beta, "Kernel radius (broadcast)");
    cmd->add_option("--alpha", alpha, "Reward radius (broadcast)");
  }

  bool any() const { return !mode.empty() || !p.empty() || beta || alpha; }

  // Flags override the file's set. Per-entry radii from the file are kept
  // unless the mode changes, which then needs an explicit --beta.
  UncertaintyPtr resolve(const rmdp_model* m,
                         const rmdp_uncertainty* from_file) const {
    const size_t S = rmdp_model_num_states(m), A = rmdp_model_num_actions(m);
    rmdp_mode file_mode = RMDP_MODE_SA;
    double file_p = 2.0;
    std::vector<double> b{0.0}, a{0.0};
    if (from_file != nullptr) {
      file_mode = rmdp_uncertainty_mode(from_file);
      file_p = rmdp_uncertainty_p(from_file);
      const size_t n = rmdp_uncertainty_num_radii(from_file);
      b.resize(n);
      a.resize(n);
      check(rmdp_uncertainty_beta(from_file, b.data()), "uncertainty");
      check(rmdp_uncertainty_alpha(from_file, a.data()), "uncertainty");
    }
    const rmdp_mode m_out = mode.empty() ? file_mode : parse_mode(mode);
    if (m_out != file_mode && from_file != nullptr) {
      if (!beta) {
        throw Failure{kExitBadInput,
                      "--mode differs from the model file; give --beta too"};
      }
      a = {0.0};
    }
    if (beta) b = {*beta};
    if (alpha) a = {*alpha};
    const double p_out = p.empty() ? file_p : parse_p(p);
    rmdp_uncertainty* u = nullptr;
    check(rmdp_uncertainty_create(m_out, p_out, b.data(), b.size(), a.data(),
                                  a.size(), S, A, &u),
          "uncertainty");
    return UncertaintyPtr(u);
  }
};

std::string mode_name(rmdp_mode m) { return m == RMDP_MODE_SA ? "sa" : "s"; }

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string model;
  UncertaintyFlags flags;
  double tol = 1e-6;
  int max_iterations = 1000000;
  std::string out;
};

int cmd_solve(const SolveArgs& args) {
  rmdp_model* raw = nullptr;
  rmdp_uncertainty* raw_u = nullptr;
  check(rmdp_model_load(args.model.c_str(), &raw, &raw_u), "model");
  ModelPtr model(raw);
  UncertaintyPtr file_u(raw_u);
  UncertaintyPtr u = args.flags.resolve(model.get(), file_u.get());

  rmdp_solution* raw_sol = nullptr;
  check(rmdp_solve_bounded(model.get(), u.get(), args.tol,
                           args.max_iterations, &raw_sol),
        "solve");
  SolutionPtr sol(raw_sol);

  char* raw_json = nullptr;
  check(rmdp_solution_to_json(sol.get(), &raw_json), "solution");
  StringPtr json(raw_json);

  const size_t S = rmdp_model_num_states(model.get());
  std::vector<double> V(S);
  check(rmdp_solution_value(sol.get(), V.data()), "solution");
  std::ostream& summary = args.out.empty() ? std::cerr : std::cout;
  summary << "mode " << mode_name(rmdp_uncertainty_mode(u.get())) << "  p "
          << format_p(rmdp_uncertainty_p(u.get())) << "  beta_sup "
          << rmdp_uncertainty_beta_sup(u.get()) << '\n'
          << "iterations " << rmdp_solution_iterations(sol.get())
          << "  residual " << rmdp_solution_residual(sol.get())
          << "  eps_opt_bound " << rmdp_solution_eps_opt_bound(sol.get())
          << '\n'
          << "V";
  summary << std::setprecision(10);
  for (double v : V) summary << ' ' << v;
  summary << '\n';
  if (args.out.empty()) {
    std::cout << json.get();
  } else {
    write_text(args.out, json.get());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  size_t states = 5;
  size_t actions = 3;
  size_t count = 200;
  uint64_t seed = 1;
  double resolution = 1e-3;
  int starts = 50;
  std::vector<std::string> p_values;
  std::vector<double> betas;
};

int cmd_verify(const VerifyArgs& args) {
  rmdp_verify_config config;
  rmdp_verify_config_init(&config);
  config.max_states = args.states;
  config.num_actions = args.actions;
  config.count = args.count;
  config.seed = args.seed;
  config.resolution = args.resolution;
  config.oracle_starts = args.starts;
  std::vector<double> ps;
  for (const auto& p : args.p_values) ps.push_back(parse_p(p));
  if (!ps.empty()) {
    config.p_values = ps.data();
    config.num_p_values = ps.size();
  }
  if (!args.betas.empty()) {
    config.betas = args.betas.data();
    config.num_betas = args.betas.size();
  }
  rmdp_verify_report* raw = nullptr;
  check(rmdp_verify(&config, &raw), "verify");
  ReportPtr report(raw);
  std::cout << rmdp_verify_report_text(report.get());
  if (rmdp_verify_report_passed(report.get())) {
    std::cout << "all checks passed\n";
    return kExitOk;
  }
  for (size_t i = 0; i < rmdp_verify_report_num_checks(report.get()); ++i) {
    if (!rmdp_verify_report_check_passed(report.get(), i)) {
      std::cerr << "rmdp: check failed: "
                << rmdp_verify_report_check_name(report.get(), i) << '\n';
    }
  }
  return kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::string model;
  size_t states = 5;
  size_t actions = 3;
  double gamma = 0.9;
  uint64_t model_seed = 2024;
  UncertaintyFlags flags;
  std::vector<uint64_t> sample_counts{100, 316, 1000, 3162, 10000, 31623};
  size_t seeds = 20;
  uint64_t seed = 1;
  double tol = 1e-6;
  std::string out;
  std::optional<double> compare_gamma;
  bool no_timing = false;
};

ExperimentPtr run_experiment(const rmdp_model* model,
                             const rmdp_uncertainty* u,
                             const ExperimentArgs& args,
                             const std::string& csv_path) {
  rmdp_experiment_config config;
  rmdp_experiment_config_init(&config);
  config.sample_counts = args.sample_counts.data();
  config.num_sample_counts = args.sample_counts.size();
  config.num_seeds = args.seeds;
  config.base_seed = args.seed;
  config.tol = args.tol;
  config.record_wall_time = args.no_timing ? 0 : 1;
  rmdp_experiment* raw = nullptr;
  const rmdp_status status = rmdp_sample_complexity(
      model, u, &config, csv_path.empty() ? nullptr : csv_path.c_str(), &raw);
  if (status == RMDP_ERR_INVALID_ARGUMENT || status == RMDP_ERR_SHAPE_MISMATCH ||
      status == RMDP_ERR_IO) {
    check(status, "sample-complexity");
  }
  if (status != RMDP_OK) {
    throw Failure{kExitNoConvergence,
                  std::string("sample-complexity: ") + rmdp_last_error()};
  }
  return ExperimentPtr(raw);
}

std::vector<double> medians(const rmdp_experiment* e, size_t n) {
  std::vector<double> out(n);
  check(rmdp_experiment_medians(e, out.data()), "sample-complexity");
  return out;
}

int cmd_sample_complexity(const ExperimentArgs& args) {
  ModelPtr model;
  UncertaintyPtr file_u;
  if (!args.model.empty()) {
    rmdp_model* raw = nullptr;
    rmdp_uncertainty* raw_u = nullptr;
    check(rmdp_model_load(args.model.c_str(), &raw, &raw_u), "model");
    model.reset(raw);
    file_u.reset(raw_u);
  } else {
    rmdp_model* raw = nullptr;
    check(rmdp_model_random(args.states, args.actions, args.gamma,
                            args.model_seed, &raw),
          "model");
    model.reset(raw);
  }
  UncertaintyFlags flags = args.flags;
  if (!file_u && flags.p.empty()) flags.p = "1";
  if (!file_u && !flags.beta) flags.beta = 0.05;
  UncertaintyPtr u = flags.resolve(model.get(), file_u.get());

  const ExperimentPtr result = run_experiment(model.get(), u.get(), args, args.out);
  const size_t n = args.sample_counts.size();
  const std::vector<double> med = medians(result.get(), n);
  std::vector<double> qerr(n);
  check(rmdp_experiment_q_error_medians(result.get(), qerr.data()),
        "sample-complexity");

  std::cout << "mode " << mode_name(rmdp_uncertainty_mode(u.get())) << "  p "
            << format_p(rmdp_uncertainty_p(u.get())) << "  beta "
            << rmdp_uncertainty_beta_sup(u.get()) << "  gamma "
            << rmdp_model_discount(model.get()) << "  seeds " << args.seeds
            << '\n';
  std::cout << std::setw(10) << "N" << std::setw(16) << "median_eps_hat"
            << std::setw(16) << "median_q_error" << '\n';
  for (size_t k = 0; k < n; ++k) {
    std::cout << std::setw(10) << args.sample_counts[k] << std::setw(16)
              << std::setprecision(6) << med[k] << std::setw(16) << qerr[k]
              << '\n';
  }
  std::cout << "slope " << rmdp_experiment_slope(result.get()) << " over "
            << rmdp_experiment_fitted_points(result.get())
            << " points (theory -0.5), noise floor "
            << rmdp_experiment_noise_floor(result.get()) << '\n'
            << "q_error slope " << rmdp_experiment_q_error_slope(result.get())
            << '\n';

  if (args.compare_gamma) {
    rmdp_model* raw = nullptr;
    check(rmdp_model_with_discount(model.get(), *args.compare_gamma, &raw),
          "model");
    ModelPtr other(raw);
    const ExperimentPtr second = run_experiment(other.get(), u.get(), args, "");
    const std::vector<double> med2 = medians(second.get(), n);
    std::cout << "\nhorizon comparison (median eps_hat)\n"
              << std::setw(10) << "N" << std::setw(16)
              << ("gamma=" + std::to_string(rmdp_model_discount(model.get()))
                     .substr(0, 10))
              << std::setw(16)
              << ("gamma=" + std::to_string(*args.compare_gamma).substr(0, 10))
              << '\n';
    for (size_t k = 0; k < n; ++k) {
      std::cout << std::setw(10) << args.sample_counts[k] << std::setw(16)
                << med[k] << std::setw(16) << med2[k] << '\n';
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RandomArgs {
  size_t states = 5;
  size_t actions = 3;
  double gamma = 0.9;
  uint64_t seed = 1;
  UncertaintyFlags flags;
  std::string out;
};

int cmd_random_model(const RandomArgs& args) {
  rmdp_model* raw = nullptr;
  check(rmdp_model_random(args.states, args.actions, args.gamma, args.seed,
                          &raw),
        "random-model");
  ModelPtr model(raw);
  UncertaintyPtr u;
  if (args.flags.any()) u = args.flags.resolve(model.get(), nullptr);
  char* raw_json = nullptr;
  check(rmdp_model_to_json(model.get(), u.get(), &raw_json), "random-model");
  StringPtr json(raw_json);
  if (args.out.empty()) {
    std::cout << json.get();
  } else {
    write_text(args.out, json.get());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust MDP solver for L_p uncertainty sets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rmdp_version());

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a model file");
  solve_cmd->add_option("model", solve.model, "Model JSON file")->required();
  solve.flags.add_to(solve_cmd);
  solve_cmd->add_option("--tol", solve.tol, "Certified optimality tolerance");
  solve_cmd->add_option("--out", solve.out, "Solution JSON file");
  solve_cmd->add_option("--max-iterations", solve.max_iterations,
                        "Sweep budget before giving up (exit 3)");

  VerifyArgs verify;
  auto* verify_cmd =
      app.add_subcommand("verify", "Run the oracle and property suites");
  verify_cmd->add_option("--states", verify.states, "Largest state count");
  verify_cmd->add_option("--actions", verify.actions, "Actions per state");
  verify_cmd->add_option("--count", verify.count, "Instances per suite");
  verify_cmd->add_option("--seed", verify.seed, "Seed");
  verify_cmd->add_option("--resolution", verify.resolution,
                         "Oracle grid step");
  verify_cmd->add_option("--starts", verify.starts,
                         "Oracle projected-gradient starts");
  verify_cmd->add_option("--p", verify.p_values, "Exponents to sweep")
      ->delimiter(',');
  verify_cmd->add_option("--beta", verify.betas, "Radii to sweep")
      ->delimiter(',');

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand(
      "sample-complexity", "eps_hat versus samples per state-action pair");
  exp_cmd->add_option("--model", exp.model, "Model JSON file");
  exp_cmd->add_option("--states", exp.states, "Random model: states");
  exp_cmd->add_option("--actions", exp.actions, "Random model: actions");
  exp_cmd->add_option("--gamma", exp.gamma, "Random model: discount");
  exp_cmd->add_option("--model-seed", exp.model_seed, "Random model: seed");
  exp.flags.add_to(exp_cmd);
  exp_cmd->add_option("--n", exp.sample_counts, "Samples per pair")
      ->delimiter(',');
  exp_cmd->add_option("--seeds", exp.seeds, "Seeds per N");
  exp_cmd->add_option("--seed", exp.seed, "First seed");
  exp_cmd->add_option("--tol", exp.tol, "Planner tolerance");
  exp_cmd->add_option("--out", exp.out, "CSV file");
  exp_cmd->add_option("--compare-gamma", exp.compare_gamma,
                      "Second discount for the horizon table");
  exp_cmd->add_flag("--no-timing", exp.no_timing,
                    "Write wall_ms as 0 (byte-stable CSV)");

  RandomArgs rnd;
  auto* rnd_cmd = app.add_subcommand("random-model", "Write a random model");
  rnd_cmd->add_option("--states", rnd.states, "States");
  rnd_cmd->add_option("--actions", rnd.actions, "Actions");
  rnd_cmd->add_option("--gamma", rnd.gamma, "Discount");
  rnd_cmd->add_option("--seed", rnd.seed, "Seed");
  rnd.flags.add_to(rnd_cmd);
  rnd_cmd->add_option("--out", rnd.out, "Model JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve);
    if (*verify_cmd) return cmd_verify(verify);
    if (*exp_cmd) return cmd_sample_complexity(exp);
    if (*rnd_cmd) return cmd_random_model(rnd);
  } catch (const Failure& f) {
    std::cerr << "rmdp: " << f.message << '\n';
    return f.exit_code;
  }
  return kExitBadInput;
}
