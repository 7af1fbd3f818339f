// SPDX-License-Identifier: Apache-2.0
//
// corridor-bo: tilt and power optimization for networks serving ground users
// and UAV corridors.
//
//   corridor-bo optimize --lambda 0.5 --seed 1 --out runs/lambda0.5
//   corridor-bo baseline --out runs/baseline
//   corridor-bo eval --out runs/check --input runs/lambda0.5/best_config.json
//   corridor-bo report --out runs
//
// Exit status: 0 success, 1 configuration error, 2 runtime failure,
// 3 optimization stopped at the iteration cap. CBO_THREADS sets the worker count.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cbo/config.hpp"
#include "cbo/experiment.hpp"
#include "cbo/io.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<double> lambda;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<std::string> ei_variant;
  std::optional<int> max_iters;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--lambda", f.lambda, "UAV weight of the objective, in [0, 1]");
  cmd->add_option("--seed", f.seed, "run seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--ei-variant", f.ei_variant, "paper or textbook");
  cmd->add_option("--max-iters", f.max_iters, "iteration cap");
}

cbo::RunSpec build_spec(const CommonFlags& f, cbo::Mode mode) {
  cbo::RunSpec spec;
  if (!f.config.empty()) cbo::apply_config_file(f.config, spec);
  if (f.lambda) spec.lambda = *f.lambda;
  if (f.seed) spec.seed = *f.seed;
  if (f.ei_variant) cbo::set_config_value(spec, "bo.ei_variant", *f.ei_variant);
  if (f.max_iters) spec.bo.max_iterations = *f.max_iters;
  spec.output_dir = f.out;
  spec.mode = mode;
  spec.validate();
  return spec;
}

void print_eval(const cbo::FinalEvaluation& e) {
  std::cout << "mean GUE SINR " << e.mean_gue_db << " dB, mean UAV SINR " << e.mean_uav_db << " dB\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Antenna tilt and power optimization for ground users and UAV corridors"};
  app.require_subcommand(1);

  CommonFlags opt_flags, base_flags, eval_flags, report_flags;
  bool resume = false, wall_time = false, quiet = false;
  std::string input;
  std::string dir_baseline, dir_l0, dir_l05, dir_l1;

  auto* optimize = app.add_subcommand("optimize", "run the optimizer for one lambda");
  add_common(optimize, opt_flags);
  optimize->add_flag("--resume", resume, "continue from dataset.csv and state.json in --out");
  optimize->add_flag("--wall-time", wall_time, "record per-iteration wall time in trace.csv");
  optimize->add_flag("-q,--quiet", quiet, "no progress output");

  auto* baseline = app.add_subcommand("baseline", "evaluate the all-downtilt, full-power setting");
  add_common(baseline, base_flags);

  auto* eval = app.add_subcommand("eval", "re-evaluate a best_config.json");
  add_common(eval, eval_flags);
  eval->add_option("--input", input, "best_config.json to evaluate")->required()->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "compare baseline and the three lambda runs");
  add_common(report, report_flags);
  report->add_option("--baseline-dir", dir_baseline, "default <out>/baseline");
  report->add_option("--lambda0-dir", dir_l0, "default <out>/lambda0");
  report->add_option("--lambda05-dir", dir_l05, "default <out>/lambda0.5");
  report->add_option("--lambda1-dir", dir_l1, "default <out>/lambda1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (optimize->parsed()) {
      cbo::RunSpec spec = build_spec(opt_flags, cbo::Mode::kOptimize);
      if (wall_time) spec.bo.record_wall_time = true;
      const auto out = cbo::run_optimize(spec, resume, quiet ? nullptr : &std::cerr);
      const auto& r = out.result;
      std::cout << "iterations " << r.iterations << ", best observed " << r.best_observed << " dB, "
                << (r.termination == cbo::Termination::kConverged ? "converged" : "stopped at the iteration cap")
                << '\n';
      print_eval(out.final_eval);
      return r.termination == cbo::Termination::kConverged ? 0 : 3;
    }
    if (baseline->parsed()) {
      print_eval(cbo::run_baseline(build_spec(base_flags, cbo::Mode::kBaseline)));
      return 0;
    }
    if (eval->parsed()) {
      print_eval(cbo::run_eval(build_spec(eval_flags, cbo::Mode::kEval), input));
      return 0;
    }
    if (report->parsed()) {
      const cbo::RunSpec spec = build_spec(report_flags, cbo::Mode::kReport);
      cbo::ReportInputs in = cbo::ReportInputs::under(spec.output_dir);
      if (!dir_baseline.empty()) in.baseline = dir_baseline;
      if (!dir_l0.empty()) in.lambda0 = dir_l0;
      if (!dir_l05.empty()) in.lambda05 = dir_l05;
      if (!dir_l1.empty()) in.lambda1 = dir_l1;
      std::cout << cbo::run_report(spec, in).markdown;
      return 0;
    }
  } catch (const cbo::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
