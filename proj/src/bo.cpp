// SPDX-License-Identifier: Apache-2.0
#include "cbo/bo.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cbo/parallel.hpp"

namespace cbo {

EiVariant parse_ei_variant(const std::string& s) {
  if (s == "paper") return EiVariant::kPaper;
  if (s == "textbook") return EiVariant::kTextbook;
  throw std::invalid_argument("unknown EI variant '" + s + "' (expected paper or textbook)");
}

const char* to_string(EiVariant v) { return v == EiVariant::kPaper ? "paper" : "textbook"; }

void BoSettings::validate() const {
  if (batch_size < 1 || n_candidates < 1 || n_candidates % batch_size != 0)
    throw std::invalid_argument("bo.n_candidates must be a positive multiple of bo.batch_size");
  if (!(xi >= 0.0 && xi < 1.0)) throw std::invalid_argument("bo.xi must lie in [0, 1)");
  if (l_max < 1) throw std::invalid_argument("bo.l_max must be at least 1");
  if (n_initial < 2) throw std::invalid_argument("bo.n_initial must be at least 2");
  if (max_iterations < 1) throw std::invalid_argument("bo.max_iterations must be positive");
  if (hyper_random_starts < 0 || hyper_max_iterations < 1) throw std::invalid_argument("bad hyperparameter fit settings");
}

int bs_index(long n, int n_bs) {
  if (n < 1) throw std::invalid_argument("iteration index starts at 1");
  return static_cast<int>((n - 1) % n_bs) + 1;
}

double expected_improvement(double mean, double variance, double f_hat_star, double xi, EiVariant variant) {
  const double gap = mean - f_hat_star - xi;
  if (!(variance > 0.0)) return std::max(0.0, gap);
  const double spread = variant == EiVariant::kPaper ? variance : std::sqrt(variance);
  const double delta = gap / spread;
  const double cdf = 0.5 * std::erfc(-delta / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * delta * delta) / std::sqrt(2.0 * std::numbers::pi);
  return gap * cdf + spread * pdf;
}

gp::InputBox<double> setting_box(const ScenarioConfig& cfg) {
  const int n = cfg.n_bs();
  gp::InputBox<double> box;
  box.lower.resize(2 * n);
  box.upper.resize(2 * n);
  box.lower << Eigen::VectorXd::Constant(n, cfg.tilt_min_deg), Eigen::VectorXd::Constant(n, cfg.min_power_dbm);
  box.upper << Eigen::VectorXd::Constant(n, cfg.tilt_max_deg), Eigen::VectorXd::Constant(n, cfg.max_power_dbm);
  return box;
}

Eigen::MatrixXd propose_candidates(const NetworkSetting& current, int bs, Rng& rng, const BoSettings& settings,
                                   const ScenarioConfig& cfg) {
  const int n_bs = current.n_bs();
  if (bs < 0 || bs >= n_bs) throw std::out_of_range("BS index out of range");
  Eigen::MatrixXd cands = current.stacked().replicate(1, settings.n_candidates);
  for (int j = 0; j < settings.n_candidates; ++j) {
    cands(bs, j) = uniform(rng, cfg.tilt_min_deg, cfg.tilt_max_deg);
    cands(n_bs + bs, j) = uniform(rng, cfg.min_power_dbm, cfg.max_power_dbm);
  }
  return cands;
}

QuerySelection select_query(const Eigen::MatrixXd& candidates, const Model& model, double xi, EiVariant variant,
                            int batch_size) {
  const Eigen::Index m = candidates.cols();
  if (m == 0) throw std::invalid_argument("no candidates to score");
  QuerySelection sel;
  sel.means.resize(m);
  sel.variances.resize(m);
  const Eigen::Index n_batches = (m + batch_size - 1) / batch_size;
  parallel_for(static_cast<std::size_t>(n_batches), [&](std::size_t bi) {
    const Eigen::Index lo = static_cast<Eigen::Index>(bi) * batch_size;
    const Eigen::Index len = std::min<Eigen::Index>(batch_size, m - lo);
    const auto post = model.posterior_batch(candidates.middleCols(lo, len));
    for (Eigen::Index j = 0; j < len; ++j) {
      sel.means[lo + j] = post[static_cast<std::size_t>(j)].mean;
      sel.variances[lo + j] = post[static_cast<std::size_t>(j)].variance;
    }
  });
  sel.f_hat_star = sel.means.maxCoeff();
  sel.scores.resize(m);
  for (Eigen::Index j = 0; j < m; ++j)
    sel.scores[j] = expected_improvement(sel.means[j], sel.variances[j], sel.f_hat_star, xi, variant);
  sel.scores.maxCoeff(&sel.index);
  return sel;
}

std::uint64_t objective_seed(std::uint64_t run_seed, long n) {
  return derive_seed(run_seed, Stream::kObjective, static_cast<std::uint64_t>(n));
}

Optimizer::Optimizer(ScenarioConfig cfg, double lambda, BoSettings settings, std::uint64_t seed)
    : cfg_(std::move(cfg)), layout_(build_layout(cfg_)), lambda_(lambda), settings_(settings), seed_(seed) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  settings_.validate();
}

void Optimizer::initialize() {
  dataset_.emplace(setting_box(cfg_));
  // Initial design: independent uniform tilts and powers. Its evaluations use
  // objective seeds at non-positive iteration indices, disjoint from the loop.
  Rng rng = make_rng(seed_, Stream::kInitialDesign);
  const int n_bs = cfg_.n_bs();
  for (int i = 0; i < settings_.n_initial; ++i) {
    NetworkSetting x = NetworkSetting::uniform(n_bs, 0.0, cfg_.max_power_dbm);
    for (int b = 0; b < n_bs; ++b) x.tilts_deg[b] = uniform(rng, cfg_.tilt_min_deg, cfg_.tilt_max_deg);
    for (int b = 0; b < n_bs; ++b) x.powers_dbm[b] = uniform(rng, cfg_.min_power_dbm, cfg_.max_power_dbm);
    const double f = evaluate(cfg_, layout_, x, lambda_, objective_seed(seed_, -i)).objective_value;
    dataset_->append(x.stacked(), f);
  }

  state_ = BoState{};
  state_.current = NetworkSetting::uniform(n_bs, 0.0, cfg_.max_power_dbm);
  state_.running_best_x = state_.current;
  state_.loop_best_x = state_.current;
  state_.hyper = gp::HyperPrior<double>{}.center;
  refit();
}

void Optimizer::resume(Dataset dataset, BoState state) {
  dataset_.emplace(std::move(dataset));
  state_ = std::move(state);
  model_.emplace(*dataset_, state_.hyper);
}

void Optimizer::refit() {
  gp::FitOptions opt;
  opt.random_starts = settings_.hyper_random_starts;
  opt.max_iterations = settings_.hyper_max_iterations;
  opt.seed = derive_seed(seed_, Stream::kHyperStarts, static_cast<std::uint64_t>(state_.iteration));
  const auto fitted = gp::fit<double>(*dataset_, gp::HyperPrior<double>{}, opt, state_.hyper);
  // A failed fit keeps the previous hyperparameters.
  if (fitted.converged) state_.hyper = fitted.hyper;
  model_.emplace(*dataset_, state_.hyper);
}

bool Optimizer::step() {
  const auto t0 = std::chrono::steady_clock::now();
  const long n = state_.iteration + 1;
  const int n_bs = cfg_.n_bs();
  const int b = bs_index(n, n_bs);

  Rng rng = make_rng(seed_, Stream::kCandidates, static_cast<std::uint64_t>(n));
  const Eigen::MatrixXd cands = propose_candidates(state_.current, b - 1, rng, settings_, cfg_);
  const QuerySelection sel = select_query(cands, *model_, settings_.xi, settings_.ei_variant, settings_.batch_size);
  state_.current = NetworkSetting::from_stacked(cands.col(sel.index));

  const double f = evaluate(cfg_, layout_, state_.current, lambda_, objective_seed(seed_, n)).objective_value;
  dataset_->append(state_.current.stacked(), f);
  state_.iteration = n;
  refit();

  if (f > state_.running_best) {
    state_.running_best = f;
    state_.running_best_x = state_.current;
  }

  TraceRow row;
  row.n = n;
  row.bs = b;
  row.tilt_deg = state_.current.tilts_deg[b - 1];
  row.power_dbm = state_.current.powers_dbm[b - 1];
  row.value = f;
  row.best_value = state_.running_best;
  if (settings_.record_wall_time)
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  state_.trace.push_back(row);

  if (b == n_bs) {
    // End of a full loop over the BSs.
    if (state_.running_best > state_.loop_best) {
      state_.loop_best = state_.running_best;
      state_.loop_best_x = state_.running_best_x;
      state_.stall_loops = 0;
    } else {
      ++state_.stall_loops;
    }
    if (state_.stall_loops >= settings_.l_max) return true;
  }
  return false;
}

BoResult Optimizer::run(const std::function<void(const TraceRow&)>& on_iteration) {
  if (!model_) throw std::logic_error("optimizer not initialized");
  BoResult res;
  res.termination = Termination::kIterationCap;
  // A checkpoint taken after the stall rule fired has nothing left to do.
  const bool done = state_.stall_loops >= settings_.l_max;
  if (done) res.termination = Termination::kConverged;
  while (!done && state_.iteration < settings_.max_iterations) {
    const bool stop = step();
    if (on_iteration) on_iteration(state_.trace.back());
    if (stop) {
      res.termination = Termination::kConverged;
      break;
    }
  }
  res.best_x = state_.running_best_x;
  res.best_observed = state_.running_best;
  for (const auto& row : state_.trace)
    if (row.value == state_.running_best) {
      res.best_seed = objective_seed(seed_, row.n);
      break;
    }
  res.iterations = state_.iteration;
  res.trace = state_.trace;
  res.state = state_;
  return res;
}

BoResult run(const ScenarioConfig& cfg, double lambda, const BoSettings& settings, std::uint64_t seed) {
  Optimizer opt(cfg, lambda, settings, seed);
  opt.initialize();
  return opt.run();
}

}  // namespace cbo
