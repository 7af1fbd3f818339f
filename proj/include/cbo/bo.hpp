// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cbo/deploy.hpp"
#include "cbo/gp.hpp"
#include "cbo/netsim.hpp"
#include "cbo/rng.hpp"

namespace cbo {

using Dataset = gp::ObservationDataset<double>;
using Model = gp::GpModel<double>;
using Hyper = gp::GpHyper<double>;

enum class EiVariant {
  kPaper,     // variance in place of the standard deviation
  kTextbook,  // standard deviation
};

EiVariant parse_ei_variant(const std::string& s);
const char* to_string(EiVariant v);

struct BoSettings {
  int n_candidates = 500;
  int batch_size = 50;
  double xi = 0.01;
  int l_max = 3;
  int n_initial = 10;
  int max_iterations = 2000;
  EiVariant ei_variant = EiVariant::kPaper;
  int hyper_random_starts = 1;
  int hyper_max_iterations = 40;
  bool record_wall_time = false;

  void validate() const;
};

/// Round-robin BS for iteration n >= 1, 1-based: ((n - 1) mod n_bs) + 1.
int bs_index(long n, int n_bs);

/// Expected improvement of a Gaussian prediction (mean, variance) over f_hat_star + xi.
double expected_improvement(double mean, double variance, double f_hat_star, double xi, EiVariant variant);

/// Box of the stacked decision vector [tilts; powers].
gp::InputBox<double> setting_box(const ScenarioConfig& cfg);

/// n_candidates copies of the stacked current setting with the tilt and power
/// of BS `bs` (0-based) redrawn uniformly over their ranges. Columns are candidates.
Eigen::MatrixXd propose_candidates(const NetworkSetting& current, int bs, Rng& rng, const BoSettings& settings,
                                   const ScenarioConfig& cfg);

struct QuerySelection {
  Eigen::Index index = 0;
  double f_hat_star = 0.0;  // largest posterior mean over the candidates
  Eigen::VectorXd means;
  Eigen::VectorXd variances;
  Eigen::VectorXd scores;
};

/// Scores candidates in batches and returns the EI argmax (lowest index on ties).
QuerySelection select_query(const Eigen::MatrixXd& candidates, const Model& model, double xi, EiVariant variant,
                            int batch_size);

struct TraceRow {
  long n = 0;
  int bs = 0;  // 1-based
  double tilt_deg = 0.0;
  double power_dbm = 0.0;
  double value = 0.0;       // f_n
  double best_value = 0.0;  // running best f*_n
  double wall_time_s = 0.0;
};

enum class Termination { kConverged, kIterationCap };

/// Everything needed to continue a run exactly where it stopped.
struct BoState {
  long iteration = 0;  // last completed iteration
  NetworkSetting current;
  double running_best = -std::numeric_limits<double>::infinity();
  NetworkSetting running_best_x;
  double loop_best = -std::numeric_limits<double>::infinity();
  NetworkSetting loop_best_x;
  int stall_loops = 0;
  Hyper hyper;
  std::vector<TraceRow> trace;
};

struct BoResult {
  NetworkSetting best_x;
  double best_observed = 0.0;
  std::uint64_t best_seed = 0;  // objective seed of the evaluation that produced best_observed
  Termination termination = Termination::kConverged;
  long iterations = 0;
  std::vector<TraceRow> trace;
  BoState state;
};

/// Objective seed used at iteration n of a run seeded with `run_seed`.
std::uint64_t objective_seed(std::uint64_t run_seed, long n);

class Optimizer {
 public:
  Optimizer(ScenarioConfig cfg, double lambda, BoSettings settings, std::uint64_t seed);

  /// Draws the initial design and fits the first surrogate.
  void initialize();
  /// Continues from a checkpoint (dataset and state saved by an earlier run).
  void resume(Dataset dataset, BoState state);

  /// Runs iterations until the stall rule fires or the iteration cap is hit.
  BoResult run(const std::function<void(const TraceRow&)>& on_iteration = {});

  const Dataset& dataset() const { return *dataset_; }
  const BoState& state() const { return state_; }
  const Layout& layout() const { return layout_; }

 private:
  void refit();
  bool step();  // one iteration; true when the stall rule fires

  ScenarioConfig cfg_;
  Layout layout_;
  double lambda_;
  BoSettings settings_;
  std::uint64_t seed_;
  std::optional<Dataset> dataset_;
  std::optional<Model> model_;
  BoState state_;
};

/// Convenience wrapper: initialize and run.
BoResult run(const ScenarioConfig& cfg, double lambda, const BoSettings& settings, std::uint64_t seed);

}  // namespace cbo
