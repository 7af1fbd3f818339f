// SPDX-License-Identifier: Apache-2.0
//
// Run drivers behind the command-line verbs. Every artifact is a pure
// function of the RunSpec; nothing time-dependent is written unless
// bo.record_wall_time is set.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cbo/bo.hpp"
#include "cbo/config.hpp"
#include "cbo/netsim.hpp"

namespace cbo {

/// Seed of the i-th final-evaluation realization; depends on the run seed only,
/// so optimized and baseline settings are compared on the same drops.
std::uint64_t final_eval_seed(std::uint64_t seed, int i);

struct FinalEvaluation {
  double mean_gue_db = 0.0;
  double mean_uav_db = 0.0;
  double objective_db = 0.0;
  std::vector<double> gue_sinr_db;  // pooled over realizations
  std::vector<double> uav_sinr_db;
  std::vector<CellRole> roles;      // pooled: aerial if it served any UAV
  double uav_fraction_uptilted = 0.0;
  int n_uptilted = 0;
  int n_downtilted = 0;
};

FinalEvaluation evaluate_final(const ScenarioConfig& cfg, const Layout& layout, const NetworkSetting& x,
                               double lambda, std::uint64_t seed, int n_seeds);

struct OptimizeOutcome {
  BoResult result;
  FinalEvaluation final_eval;
};

/// Writes trace.csv, best_config.json, sinr_cdf.csv, summary.json and the
/// checkpoint pair dataset.csv / state.json into spec.output_dir.
/// With `resume`, continues from the checkpoint found there.
OptimizeOutcome run_optimize(const RunSpec& spec, bool resume = false, std::ostream* log = nullptr);

/// All tilts at spec.baseline_tilt_deg and all powers at the maximum.
FinalEvaluation run_baseline(const RunSpec& spec);

/// Re-evaluates a best_config.json; writes eval_summary.json and eval_sinr_cdf.csv.
FinalEvaluation run_eval(const RunSpec& spec, const std::filesystem::path& best_config);

struct ReportInputs {
  std::filesystem::path baseline, lambda0, lambda05, lambda1;

  /// <root>/baseline, <root>/lambda0, <root>/lambda0.5, <root>/lambda1.
  static ReportInputs under(const std::filesystem::path& root);
};

struct ReportTable {
  // rows: baseline, lambda 0, lambda 0.5, lambda 1; columns: GUE, UAV
  double mean_db[4][2] = {};
  std::string markdown;
  std::string csv;
};

/// Reads the four summary.json files and writes report.md and report.csv to spec.output_dir.
ReportTable run_report(const RunSpec& spec, const ReportInputs& inputs);

}  // namespace cbo
