// SPDX-License-Identifier: Apache-2.0
#include "cbo/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cbo/io.hpp"

namespace cbo {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t final_eval_seed(std::uint64_t seed, int i) {
  return derive_seed(seed, Stream::kFinalEval, static_cast<std::uint64_t>(i));
}

FinalEvaluation evaluate_final(const ScenarioConfig& cfg, const Layout& layout, const NetworkSetting& x,
                               double lambda, std::uint64_t seed, int n_seeds) {
  FinalEvaluation out;
  const int n_bs = layout.n_bs();
  std::vector<long> gues(static_cast<std::size_t>(n_bs), 0), uavs(static_cast<std::size_t>(n_bs), 0);
  long uav_up = 0;
  for (int i = 0; i < n_seeds; ++i) {
    const EvalReport r = evaluate(cfg, layout, x, lambda, final_eval_seed(seed, i));
    const auto n_gue = r.sinr_db_per_gue.size();
    out.gue_sinr_db.insert(out.gue_sinr_db.end(), r.sinr_db_per_gue.begin(), r.sinr_db_per_gue.end());
    out.uav_sinr_db.insert(out.uav_sinr_db.end(), r.sinr_db_per_uav.begin(), r.sinr_db_per_uav.end());
    for (std::size_t k = 0; k < r.serving_bs.size(); ++k) {
      const int b = r.serving_bs[k];
      if (static_cast<Eigen::Index>(k) < n_gue) {
        ++gues[static_cast<std::size_t>(b)];
      } else {
        ++uavs[static_cast<std::size_t>(b)];
        if (x.tilts_deg[b] > 0.0) ++uav_up;
      }
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double d : v) s += d;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  out.mean_gue_db = mean(out.gue_sinr_db);
  out.mean_uav_db = mean(out.uav_sinr_db);
  out.objective_db = mixed_objective(lambda, out.mean_uav_db, out.mean_gue_db);
  out.uav_fraction_uptilted =
      out.uav_sinr_db.empty() ? 0.0 : static_cast<double>(uav_up) / static_cast<double>(out.uav_sinr_db.size());
  for (int b = 0; b < n_bs; ++b) {
    const auto ub = static_cast<std::size_t>(b);
    out.roles.push_back(uavs[ub] > 0 ? CellRole::kAerial : gues[ub] > 0 ? CellRole::kGround : CellRole::kOff);
    if (x.tilts_deg[b] > 0.0) ++out.n_uptilted;
    if (x.tilts_deg[b] < 0.0) ++out.n_downtilted;
  }
  return out;
}

namespace {

json evaluation_json(const FinalEvaluation& e, int n_seeds) {
  int counts[3] = {0, 0, 0};
  for (CellRole r : e.roles) ++counts[static_cast<int>(r)];
  return {{"eval_seeds", n_seeds},
          {"mean_gue_sinr_db", e.mean_gue_db},
          {"mean_uav_sinr_db", e.mean_uav_db},
          {"objective_db", e.objective_db},
          {"n_uptilted", e.n_uptilted},
          {"n_downtilted", e.n_downtilted},
          {"uav_fraction_served_by_uptilted", e.uav_fraction_uptilted},
          {"cell_roles", {{"ground", counts[0]}, {"aerial", counts[1]}, {"off", counts[2]}}}};
}

void write_json(const fs::path& path, const json& j) { io::write_file(path, j.dump(1) + "\n"); }

std::string cdf_text(const FinalEvaluation& e) {
  std::ostringstream ss;
  io::write_cdf_csv(ss, e.gue_sinr_db, e.uav_sinr_db);
  return ss.str();
}

void write_checkpoint(const fs::path& dir, const Optimizer& opt, const io::RunIdentity& id) {
  std::ostringstream data, state;
  io::write_dataset_csv(data, opt.dataset());
  io::write_state_json(state, opt.state(), id);
  io::write_file(dir / "dataset.csv", data.str());
  io::write_file(dir / "state.json", state.str());
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

}  // namespace

OptimizeOutcome run_optimize(const RunSpec& spec, bool resume, std::ostream* log) {
  spec.validate();
  prepare_dir(spec.output_dir);
  const io::RunIdentity id{spec.lambda, spec.seed, to_string(spec.bo.ei_variant)};

  Optimizer opt(spec.scenario, spec.lambda, spec.bo, spec.seed);
  if (resume) {
    io::RunIdentity saved;
    std::istringstream state_in(io::read_file(spec.output_dir / "state.json"));
    BoState state = io::read_state_json(state_in, &saved);
    if (saved.lambda != id.lambda || saved.seed != id.seed || saved.ei_variant != id.ei_variant)
      throw ConfigError("checkpoint in " + spec.output_dir.string() + " belongs to a different run");
    std::istringstream data_in(io::read_file(spec.output_dir / "dataset.csv"));
    opt.resume(io::read_dataset_csv(data_in, setting_box(spec.scenario)), std::move(state));
  } else {
    opt.initialize();
  }

  const int n_bs = spec.scenario.n_bs();
  OptimizeOutcome out;
  out.result = opt.run([&](const TraceRow& row) {
    if (row.bs != n_bs) return;
    write_checkpoint(spec.output_dir, opt, id);
    if (log)
      *log << "loop " << row.n / n_bs << "  n=" << row.n << "  f*=" << io::format_double(row.best_value)
           << "  stall=" << opt.state().stall_loops << std::endl;
  });
  write_checkpoint(spec.output_dir, opt, id);
  const BoResult& res = out.result;

  const Layout& layout = opt.layout();
  out.final_eval = evaluate_final(spec.scenario, layout, res.best_x, spec.lambda, spec.seed, spec.eval_seeds);

  std::ostringstream trace;
  io::write_trace_csv(trace, res.trace);
  io::write_file(spec.output_dir / "trace.csv", trace.str());

  io::BestConfig best{res.best_x, out.final_eval.roles, spec.lambda, spec.seed, res.best_observed, res.best_seed};
  std::ostringstream best_text;
  io::write_best_config_json(best_text, best, layout);
  io::write_file(spec.output_dir / "best_config.json", best_text.str());

  io::write_file(spec.output_dir / "sinr_cdf.csv", cdf_text(out.final_eval));

  json summary = {{"mode", "optimize"},
                  {"lambda", spec.lambda},
                  {"seed", spec.seed},
                  {"ei_variant", to_string(spec.bo.ei_variant)},
                  {"iterations", res.iterations},
                  {"loops", res.iterations / n_bs},
                  {"termination", res.termination == Termination::kConverged ? "converged" : "iteration_cap"},
                  {"best_observed", res.best_observed}};
  summary.update(evaluation_json(out.final_eval, spec.eval_seeds));
  write_json(spec.output_dir / "summary.json", summary);
  return out;
}

FinalEvaluation run_baseline(const RunSpec& spec) {
  spec.validate();
  prepare_dir(spec.output_dir);
  const Layout layout = build_layout(spec.scenario);
  const NetworkSetting x = NetworkSetting::uniform(spec.scenario.n_bs(), spec.baseline_tilt_deg, spec.scenario.max_power_dbm);
  const FinalEvaluation e = evaluate_final(spec.scenario, layout, x, spec.lambda, spec.seed, spec.eval_seeds);
  io::write_file(spec.output_dir / "sinr_cdf.csv", cdf_text(e));
  json summary = {{"mode", "baseline"},
                  {"lambda", spec.lambda},
                  {"seed", spec.seed},
                  {"tilt_deg", spec.baseline_tilt_deg},
                  {"power_dbm", spec.scenario.max_power_dbm}};
  summary.update(evaluation_json(e, spec.eval_seeds));
  write_json(spec.output_dir / "summary.json", summary);
  return e;
}

FinalEvaluation run_eval(const RunSpec& spec, const fs::path& best_config) {
  spec.validate();
  prepare_dir(spec.output_dir);
  std::istringstream in(io::read_file(best_config));
  const io::BestConfig best = io::read_best_config_json(in);
  try {
    best.setting.validate(spec.scenario);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(best_config.string() + ": " + e.what());
  }
  const Layout layout = build_layout(spec.scenario);
  const FinalEvaluation e = evaluate_final(spec.scenario, layout, best.setting, best.lambda, spec.seed, spec.eval_seeds);
  io::write_file(spec.output_dir / "eval_sinr_cdf.csv", cdf_text(e));
  json summary = {{"mode", "eval"}, {"lambda", best.lambda}, {"seed", spec.seed}, {"source", best_config.string()}};
  summary.update(evaluation_json(e, spec.eval_seeds));
  write_json(spec.output_dir / "eval_summary.json", summary);
  return e;
}

ReportInputs ReportInputs::under(const fs::path& root) {
  return {root / "baseline", root / "lambda0", root / "lambda0.5", root / "lambda1"};
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f", v);
  return buf;
}

std::string plain2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

ReportTable run_report(const RunSpec& spec, const ReportInputs& in) {
  prepare_dir(spec.output_dir);
  const fs::path dirs[4] = {in.baseline, in.lambda0, in.lambda05, in.lambda1};
  const char* names[4] = {"baseline", "lambda=0", "lambda=0.5", "lambda=1"};
  ReportTable t;
  for (int i = 0; i < 4; ++i) {
    const fs::path p = dirs[i] / "summary.json";
    if (!fs::exists(p)) throw std::runtime_error("missing run artifact " + p.string());
    json j;
    try {
      j = json::parse(io::read_file(p));
      t.mean_db[i][0] = j.at("mean_gue_sinr_db").get<double>();
      t.mean_db[i][1] = j.at("mean_uav_sinr_db").get<double>();
    } catch (const json::exception& e) {
      throw std::runtime_error(p.string() + ": " + e.what());
    }
  }

  struct Delta {
    const char* what;
    double value;
    double reference;
  };
  const auto& m = t.mean_db;
  const Delta deltas[4] = {
      {"UAV gain, lambda=0.5 vs baseline", m[2][1] - m[0][1], 23.4},
      {"GUE gain, lambda=0.5 vs baseline", m[2][0] - m[0][0], 1.3},
      {"UAV shortfall, lambda=1 minus lambda=0.5", m[3][1] - m[2][1], 1.2},
      {"GUE loss, lambda=0 minus lambda=0.5", m[1][0] - m[2][0], 2.6},
  };

  std::ostringstream md;
  md << "| configuration | GUE mean SINR (dB) | UAV mean SINR (dB) |\n|---|---:|---:|\n";
  for (int i = 0; i < 4; ++i) md << "| " << names[i] << " | " << plain2(m[i][0]) << " | " << plain2(m[i][1]) << " |\n";
  md << "\n| delta | measured (dB) | reference (dB) |\n|---|---:|---:|\n";
  for (const auto& d : deltas) md << "| " << d.what << " | " << fixed2(d.value) << " | " << plain2(d.reference) << " |\n";
  t.markdown = md.str();

  std::ostringstream csv;
  csv << "row,configuration,population,value_db,reference_db\n";
  for (int i = 0; i < 4; ++i)
    for (int p = 0; p < 2; ++p)
      csv << "mean," << names[i] << ',' << (p == 0 ? "gue" : "uav") << ',' << io::format_double(m[i][p]) << ",\n";
  const char* delta_pop[4] = {"uav", "gue", "uav", "gue"};
  const char* delta_cfg[4] = {"lambda=0.5 vs baseline", "lambda=0.5 vs baseline", "lambda=1 minus lambda=0.5",
                              "lambda=0 minus lambda=0.5"};
  for (int k = 0; k < 4; ++k)
    csv << "delta," << delta_cfg[k] << ',' << delta_pop[k] << ',' << io::format_double(deltas[k].value) << ','
        << io::format_double(deltas[k].reference) << '\n';
  t.csv = csv.str();

  io::write_file(spec.output_dir / "report.md", t.markdown);
  io::write_file(spec.output_dir / "report.csv", t.csv);
  return t;
}

}  // namespace cbo
