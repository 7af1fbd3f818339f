// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cbo/config.hpp"
#include "cbo/experiment.hpp"
#include "cbo/io.hpp"

using namespace cbo;
namespace fs = std::filesystem;

#ifndef CBO_TOOL_PATH
#error "CBO_TOOL_PATH must point at the corridor-bo executable"
#endif

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cbo_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int tool(const std::string& args) {
  const std::string cmd = std::string(CBO_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(io::read_file(p)); }

}  // namespace

TEST_CASE("config parsing") {
  RunSpec spec;
  std::istringstream in(
      "# comment\n"
      "scenario.isd_m = 500   # trailing comment\n"
      "bo.xi = 0.02\n"
      "bo.ei_variant = textbook\n"
      "bo.record_wall_time = false\n"
      "run.lambda = 0.25\n"
      "run.seed = 17\n"
      "scenario.corridors = -650 -610 -780 780 150; -780 780 -650 -610 120; -780 780 610 650 120; 610 650 -780 780 150\n");
  apply_config(in, spec);
  CHECK(spec.bo.xi == 0.02);
  CHECK(spec.bo.ei_variant == EiVariant::kTextbook);
  CHECK(spec.lambda == 0.25);
  CHECK(spec.seed == 17);
  CHECK(spec.scenario.corridors.size() == 4);
  CHECK(spec.scenario.corridors[1].height_m == 120.0);
  CHECK_NOTHROW(spec.validate());

  auto fails = [](const std::string& text) {
    RunSpec s;
    std::istringstream is(text);
    CHECK_THROWS_AS(apply_config(is, s), ConfigError);
  };
  fails("bo.unknown = 1\n");
  fails("bo.xi = 0.1\nbo.xi = 0.2\n");
  fails("bo.l_max = three\n");
  fails("bo.l_max = 3.5\n");
  fails("just text\n");
  fails("bo.record_wall_time = maybe\n");
  fails("bo.ei_variant = ucb\n");
  fails("scenario.corridors = 1 2 3\n");

  RunSpec bad;
  bad.lambda = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunSpec{};
  bad.bo.n_candidates = 7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(parse_mode("report") == Mode::kReport);
  CHECK_THROWS_AS(parse_mode("plot"), ConfigError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, -12.0, 1.0 / 3.0, 46.0, 6.000000000000001, 1e-300, -2.5e17}) CHECK(io::parse_double(io::format_double(v)) == v);
  CHECK(io::parse_double("-inf") == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(io::parse_double("12x"), io::FormatError);
}

TEST_CASE("dataset, trace, state and best-config round trips") {
  const ScenarioConfig cfg;
  BoSettings s;
  s.max_iterations = 12;
  Optimizer opt(cfg, 0.5, s, 3);
  opt.initialize();
  const BoResult r = opt.run();

  std::stringstream data;
  io::write_dataset_csv(data, opt.dataset());
  const Dataset back = io::read_dataset_csv(data, setting_box(cfg));
  REQUIRE(back.size() == opt.dataset().size());
  for (Eigen::Index i = 0; i < back.size(); ++i) {
    CHECK(back.point(i) == opt.dataset().point(i));
    CHECK(back.value(i) == opt.dataset().value(i));
  }
  CHECK(back.squared_distances() == opt.dataset().squared_distances());

  std::stringstream trace;
  io::write_trace_csv(trace, r.trace);
  CHECK(trace.str().rfind("n,b_n,tilt,power,f_n,f_star_n,wall_time_s\n", 0) == 0);
  const auto rows = io::read_trace_csv(trace);
  REQUIRE(rows.size() == r.trace.size());
  CHECK(rows.back().best_value == r.trace.back().best_value);
  CHECK(rows[3].tilt_deg == r.trace[3].tilt_deg);

  std::stringstream state;
  io::write_state_json(state, opt.state(), {0.5, 3, "paper"});
  io::RunIdentity id;
  const BoState st = io::read_state_json(state, &id);
  CHECK(id.seed == 3);
  CHECK(id.ei_variant == "paper");
  CHECK(st.iteration == opt.state().iteration);
  CHECK(st.current == opt.state().current);
  CHECK(st.running_best == opt.state().running_best);
  CHECK(st.loop_best == -std::numeric_limits<double>::infinity());
  CHECK(st.hyper.lengthscale == opt.state().hyper.lengthscale);
  CHECK(st.trace.size() == 12);

  const Layout layout = build_layout(cfg);
  std::vector<CellRole> roles(57, CellRole::kGround);
  roles[4] = CellRole::kOff;
  std::stringstream best;
  io::write_best_config_json(best, {r.best_x, roles, 0.5, 3, r.best_observed, r.best_seed}, layout);
  const io::BestConfig bc = io::read_best_config_json(best);
  CHECK(bc.setting == r.best_x);
  CHECK(bc.best_seed == r.best_seed);
  CHECK(bc.roles == roles);
}

TEST_CASE("resume continues a run exactly") {
  const fs::path a = scratch("resume_a"), b = scratch("resume_b");
  RunSpec spec;
  spec.eval_seeds = 2;
  spec.bo.max_iterations = 70;
  spec.output_dir = a;
  run_optimize(spec);
  spec.bo.max_iterations = 130;
  run_optimize(spec, true);
  spec.output_dir = b;
  run_optimize(spec);
  CHECK(io::read_file(a / "trace.csv") == io::read_file(b / "trace.csv"));
  CHECK(io::read_file(a / "summary.json") == io::read_file(b / "summary.json"));
  CHECK(io::read_file(a / "state.json") == io::read_file(b / "state.json"));

  // a checkpoint from another lambda is refused
  spec.output_dir = a;
  spec.lambda = 0.0;
  CHECK_THROWS_AS(run_optimize(spec, true), ConfigError);
}

TEST_CASE("optimize, baseline, eval and report artifacts") {
  const fs::path root = scratch("runs");
  RunSpec spec;
  spec.eval_seeds = 3;
  spec.bo.max_iterations = 57;

  spec.output_dir = root / "baseline";
  const FinalEvaluation base = run_baseline(spec);
  CHECK(base.n_downtilted == 57);
  CHECK(base.gue_sinr_db.size() == 3 * 855);
  CHECK(base.mean_uav_db < base.mean_gue_db);

  for (double lam : {0.0, 0.5, 1.0}) {
    spec.lambda = lam;
    spec.output_dir = root / (lam == 0.0 ? "lambda0" : lam == 1.0 ? "lambda1" : "lambda0.5");
    const auto out = run_optimize(spec);
    for (const char* f : {"trace.csv", "best_config.json", "sinr_cdf.csv", "summary.json", "dataset.csv", "state.json"})
      CHECK(fs::exists(spec.output_dir / f));
    const auto summary = load_json(spec.output_dir / "summary.json");
    CHECK(summary.at("termination") == "iteration_cap");
    CHECK(summary.at("iterations") == 57);
    CHECK(summary.at("mean_gue_sinr_db").get<double>() == out.final_eval.mean_gue_db);

    // CDF monotone in both columns per population
    std::istringstream cdf(io::read_file(spec.output_dir / "sinr_cdf.csv"));
    std::string line, last_pop;
    std::getline(cdf, line);
    CHECK(line == "population,sinr_db,cdf");
    double last_s = -1e300, last_c = 0;
    long n = 0;
    while (std::getline(cdf, line)) {
      const auto c1 = line.find(','), c2 = line.rfind(',');
      const std::string pop = line.substr(0, c1);
      const double s = io::parse_double(line.substr(c1 + 1, c2 - c1 - 1));
      const double c = io::parse_double(line.substr(c2 + 1));
      if (pop != last_pop) {
        last_s = -1e300;
        last_c = 0;
        last_pop = pop;
      }
      CHECK(s >= last_s);
      CHECK(c > last_c);
      last_s = s;
      last_c = c;
      ++n;
    }
    CHECK(n == 3 * 1055);
  }

  // eval of the stored best configuration reproduces the summary means
  spec.output_dir = root / "check";
  const auto e = run_eval(spec, root / "lambda0.5" / "best_config.json");
  const auto s05 = load_json(root / "lambda0.5" / "summary.json");
  CHECK(std::abs(e.mean_gue_db - s05.at("mean_gue_sinr_db").get<double>()) <= 0.3);
  CHECK(std::abs(e.mean_uav_db - s05.at("mean_uav_sinr_db").get<double>()) <= 0.3);
  CHECK(fs::exists(root / "check" / "eval_summary.json"));

  spec.output_dir = root;
  const ReportTable t = run_report(spec, ReportInputs::under(root));
  CHECK(t.mean_db[0][0] == doctest::Approx(base.mean_gue_db));
  CHECK(t.markdown.find("23.40") != std::string::npos);
  CHECK(t.markdown.find("2.60") != std::string::npos);
  std::istringstream csv(t.csv);
  std::string line;
  int means = 0, deltas = 0;
  while (std::getline(csv, line)) {
    means += line.rfind("mean,", 0) == 0;
    deltas += line.rfind("delta,", 0) == 0;
  }
  CHECK(means == 8);
  CHECK(deltas == 4);
  CHECK(fs::exists(root / "report.md"));

  CHECK_THROWS_AS(run_report(spec, ReportInputs::under(root / "nowhere")), std::runtime_error);
}

TEST_CASE("command-line exit codes and determinism") {
  const fs::path root = scratch("tool");
  const std::string out = (root / "a").string();
  CHECK(tool("optimize --lambda 0.5 --seed 4 --max-iters 30 -q --out " + out) == 3);
  CHECK(tool("optimize --lambda 0.5 --seed 4 --max-iters 30 -q --out " + (root / "b").string()) == 3);
  CHECK(io::read_file(root / "a" / "trace.csv") == io::read_file(root / "b" / "trace.csv"));
  CHECK(io::read_file(root / "a" / "summary.json") == io::read_file(root / "b" / "summary.json"));

  CHECK(tool("baseline --out " + (root / "base").string()) == 0);
  CHECK(tool("eval --out " + (root / "ev").string() + " --input " + (root / "a" / "best_config.json").string()) == 0);
  CHECK(tool("optimize --lambda 1.5 --out " + out) == 1);
  CHECK(tool("optimize --ei-variant nope --out " + out) == 1);
  {
    std::ofstream cfg(root / "bad.cfg");
    cfg << "bo.n_candidates = 33\n";
  }
  CHECK(tool("optimize --config " + (root / "bad.cfg").string() + " --out " + out) == 1);
  CHECK(tool("frobnicate") == 1);
  CHECK(tool("report --out " + (root / "empty").string()) == 2);
  CHECK(tool("--help") == 0);
}
