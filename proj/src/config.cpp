// SPDX-License-Identifier: Apache-2.0
#include "cbo/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cbo {

Mode parse_mode(const std::string& s) {
  if (s == "optimize") return Mode::kOptimize;
  if (s == "baseline") return Mode::kBaseline;
  if (s == "eval") return Mode::kEval;
  if (s == "report") return Mode::kReport;
  throw ConfigError("unknown mode '" + s + "'");
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::kOptimize: return "optimize";
    case Mode::kBaseline: return "baseline";
    case Mode::kEval: return "eval";
    case Mode::kReport: return "report";
  }
  return "?";
}

void RunSpec::validate() const {
  scenario.validate();
  try {
    bo.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("run.lambda must lie in [0, 1]");
  if (eval_seeds < 1) throw ConfigError("run.eval_seeds must be positive");
  if (!(baseline_tilt_deg >= scenario.tilt_min_deg && baseline_tilt_deg <= scenario.tilt_max_deg))
    throw ConfigError("run.baseline_tilt_deg outside the tilt range");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty())
    throw ConfigError(key + ": cannot parse '" + text + "' as a number");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<Corridor> parse_corridors(const std::string& key, const std::string& text) {
  std::vector<Corridor> out;
  std::istringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::istringstream fields(trim(group));
    std::vector<double> v;
    std::string tok;
    while (fields >> tok) v.push_back(parse_number<double>(key, tok));
    if (v.size() != 5) throw ConfigError(key + ": each corridor needs x_min x_max y_min y_max height");
    out.push_back({v[0], v[1], v[2], v[3], v[4]});
  }
  return out;
}

using Setter = std::function<void(RunSpec&, const std::string& key, const std::string& value)>;

template <typename T>
Setter number(T RunSpec::*member) {
  return [member](RunSpec& s, const std::string& k, const std::string& v) { s.*member = parse_number<T>(k, v); };
}
template <typename T>
Setter scenario_number(T ScenarioConfig::*member) {
  return [member](RunSpec& s, const std::string& k, const std::string& v) { s.scenario.*member = parse_number<T>(k, v); };
}
template <typename T>
Setter bo_number(T BoSettings::*member) {
  return [member](RunSpec& s, const std::string& k, const std::string& v) { s.bo.*member = parse_number<T>(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scenario.isd_m", scenario_number(&ScenarioConfig::isd_m)},
      {"scenario.n_sites", scenario_number(&ScenarioConfig::n_sites)},
      {"scenario.bs_height_m", scenario_number(&ScenarioConfig::bs_height_m)},
      {"scenario.sectors_per_site", scenario_number(&ScenarioConfig::sectors_per_site)},
      {"scenario.carrier_ghz", scenario_number(&ScenarioConfig::carrier_ghz)},
      {"scenario.bandwidth_hz", scenario_number(&ScenarioConfig::bandwidth_hz)},
      {"scenario.max_power_dbm", scenario_number(&ScenarioConfig::max_power_dbm)},
      {"scenario.min_power_dbm", scenario_number(&ScenarioConfig::min_power_dbm)},
      {"scenario.noise_psd_dbm_hz", scenario_number(&ScenarioConfig::noise_psd_dbm_hz)},
      {"scenario.noise_figure_db", scenario_number(&ScenarioConfig::noise_figure_db)},
      {"scenario.gue_height_m", scenario_number(&ScenarioConfig::gue_height_m)},
      {"scenario.mean_gues_per_sector", scenario_number(&ScenarioConfig::mean_gues_per_sector)},
      {"scenario.mean_uavs_per_corridor", scenario_number(&ScenarioConfig::mean_uavs_per_corridor)},
      {"scenario.hpbw_vert_deg", scenario_number(&ScenarioConfig::hpbw_vert_deg)},
      {"scenario.hpbw_horiz_deg", scenario_number(&ScenarioConfig::hpbw_horiz_deg)},
      {"scenario.max_antenna_gain_dbi", scenario_number(&ScenarioConfig::max_antenna_gain_dbi)},
      {"scenario.tilt_min_deg", scenario_number(&ScenarioConfig::tilt_min_deg)},
      {"scenario.tilt_max_deg", scenario_number(&ScenarioConfig::tilt_max_deg)},
      {"scenario.corridors",
       [](RunSpec& s, const std::string& k, const std::string& v) { s.scenario.corridors = parse_corridors(k, v); }},
      {"bo.n_candidates", bo_number(&BoSettings::n_candidates)},
      {"bo.batch_size", bo_number(&BoSettings::batch_size)},
      {"bo.xi", bo_number(&BoSettings::xi)},
      {"bo.l_max", bo_number(&BoSettings::l_max)},
      {"bo.n_initial", bo_number(&BoSettings::n_initial)},
      {"bo.max_iterations", bo_number(&BoSettings::max_iterations)},
      {"bo.hyper_random_starts", bo_number(&BoSettings::hyper_random_starts)},
      {"bo.hyper_max_iterations", bo_number(&BoSettings::hyper_max_iterations)},
      {"bo.ei_variant",
       [](RunSpec& s, const std::string&, const std::string& v) {
         try {
           s.bo.ei_variant = parse_ei_variant(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"bo.record_wall_time",
       [](RunSpec& s, const std::string& k, const std::string& v) { s.bo.record_wall_time = parse_bool(k, v); }},
      {"run.lambda", number(&RunSpec::lambda)},
      {"run.seed", number(&RunSpec::seed)},
      {"run.eval_seeds", number(&RunSpec::eval_seeds)},
      {"run.baseline_tilt_deg", number(&RunSpec::baseline_tilt_deg)},
  };
  return table;
}

}  // namespace

void set_config_value(RunSpec& spec, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second(spec, key, value);
}

void apply_config(std::istream& is, RunSpec& spec, const std::string& source) {
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      set_config_value(spec, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

void apply_config_file(const std::filesystem::path& path, RunSpec& spec) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  apply_config(in, spec, path.string());
}

}  // namespace cbo
