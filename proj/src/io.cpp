// SPDX-License-Identifier: Apache-2.0
#include "cbo/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace cbo::io {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw FormatError("not a number: '" + s + "'");
  return v;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

// JSON has no infinities; they travel as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_or_neg_inf(const json& j) {
  return j.is_null() ? -std::numeric_limits<double>::infinity() : j.get<double>();
}

json setting_json(const NetworkSetting& x) {
  return {{"tilts_deg", std::vector<double>(x.tilts_deg.begin(), x.tilts_deg.end())},
          {"powers_dbm", std::vector<double>(x.powers_dbm.begin(), x.powers_dbm.end())}};
}

NetworkSetting setting_from_json(const json& j) {
  const auto t = j.at("tilts_deg").get<std::vector<double>>();
  const auto p = j.at("powers_dbm").get<std::vector<double>>();
  if (t.size() != p.size()) throw FormatError("tilt and power lists differ in length");
  NetworkSetting x;
  x.tilts_deg = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  x.powers_dbm = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  return x;
}

CellRole parse_role(const std::string& s) {
  if (s == "ground") return CellRole::kGround;
  if (s == "aerial") return CellRole::kAerial;
  if (s == "off") return CellRole::kOff;
  throw FormatError("unknown cell role '" + s + "'");
}

}  // namespace

void write_dataset_csv(std::ostream& os, const Dataset& data) {
  const Eigen::Index dim = data.dim();
  const Eigen::Index n_bs = dim / 2;
  for (Eigen::Index i = 0; i < n_bs; ++i) os << 't' << i + 1 << ',';
  for (Eigen::Index i = 0; i < n_bs; ++i) os << 'p' << i + 1 << ',';
  os << "value\n";
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    const auto& x = data.point(r);
    for (Eigen::Index i = 0; i < dim; ++i) os << format_double(x[i]) << ',';
    os << format_double(data.value(r)) << '\n';
  }
}

Dataset read_dataset_csv(std::istream& is, const gp::InputBox<double>& box) {
  std::string line;
  if (!next_line(is, line)) throw FormatError("dataset CSV is empty");
  const auto header = split(line, ',');
  if (static_cast<Eigen::Index>(header.size()) != box.dim() + 1 || header.back() != "value")
    throw FormatError("dataset CSV header does not match the decision dimension");
  Dataset data(box);
  Eigen::VectorXd x(box.dim());
  long row = 1;
  while (next_line(is, line)) {
    ++row;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw FormatError("dataset CSV row " + std::to_string(row) + " has a wrong width");
    for (Eigen::Index i = 0; i < box.dim(); ++i) x[i] = parse_double(cells[static_cast<std::size_t>(i)]);
    try {
      data.append(x, parse_double(cells.back()));
    } catch (const std::invalid_argument& e) {
      throw FormatError("dataset CSV row " + std::to_string(row) + ": " + e.what());
    }
  }
  return data;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "n,b_n,tilt,power,f_n,f_star_n,wall_time_s\n";
  for (const auto& r : trace)
    os << r.n << ',' << r.bs << ',' << format_double(r.tilt_deg) << ',' << format_double(r.power_dbm) << ','
       << format_double(r.value) << ',' << format_double(r.best_value) << ',' << format_double(r.wall_time_s) << '\n';
}

std::vector<TraceRow> read_trace_csv(std::istream& is) {
  std::string line;
  if (!next_line(is, line) || line != "n,b_n,tilt,power,f_n,f_star_n,wall_time_s")
    throw FormatError("unexpected trace CSV header");
  std::vector<TraceRow> out;
  while (next_line(is, line)) {
    const auto c = split(line, ',');
    if (c.size() != 7) throw FormatError("trace CSV row has a wrong width");
    TraceRow r;
    r.n = std::stol(c[0]);
    r.bs = std::stoi(c[1]);
    r.tilt_deg = parse_double(c[2]);
    r.power_dbm = parse_double(c[3]);
    r.value = parse_double(c[4]);
    r.best_value = parse_double(c[5]);
    r.wall_time_s = parse_double(c[6]);
    out.push_back(r);
  }
  return out;
}

void write_state_json(std::ostream& os, const BoState& s, const RunIdentity& id) {
  json trace = json::array();
  for (const auto& r : s.trace)
    trace.push_back({r.n, r.bs, r.tilt_deg, r.power_dbm, r.value, number_or_null(r.best_value), r.wall_time_s});
  const json j = {
      {"lambda", id.lambda},
      {"seed", id.seed},
      {"ei_variant", id.ei_variant},
      {"iteration", s.iteration},
      {"current", setting_json(s.current)},
      {"running_best", number_or_null(s.running_best)},
      {"running_best_x", setting_json(s.running_best_x)},
      {"loop_best", number_or_null(s.loop_best)},
      {"loop_best_x", setting_json(s.loop_best_x)},
      {"stall_loops", s.stall_loops},
      {"hyper", {{"lengthscale", s.hyper.lengthscale}, {"signal_var", s.hyper.signal_var}, {"noise_var", s.hyper.noise_var}}},
      {"trace", trace},
  };
  os << j.dump(1) << '\n';
}

BoState read_state_json(std::istream& is, RunIdentity* id) {
  try {
    const json j = json::parse(is);
    if (id) {
      id->lambda = j.at("lambda").get<double>();
      id->seed = j.at("seed").get<std::uint64_t>();
      id->ei_variant = j.at("ei_variant").get<std::string>();
    }
    BoState s;
    s.iteration = j.at("iteration").get<long>();
    s.current = setting_from_json(j.at("current"));
    s.running_best = number_or_neg_inf(j.at("running_best"));
    s.running_best_x = setting_from_json(j.at("running_best_x"));
    s.loop_best = number_or_neg_inf(j.at("loop_best"));
    s.loop_best_x = setting_from_json(j.at("loop_best_x"));
    s.stall_loops = j.at("stall_loops").get<int>();
    const auto& h = j.at("hyper");
    s.hyper = {h.at("lengthscale").get<double>(), h.at("signal_var").get<double>(), h.at("noise_var").get<double>()};
    for (const auto& r : j.at("trace")) {
      TraceRow row;
      row.n = r.at(0).get<long>();
      row.bs = r.at(1).get<int>();
      row.tilt_deg = r.at(2).get<double>();
      row.power_dbm = r.at(3).get<double>();
      row.value = r.at(4).get<double>();
      row.best_value = number_or_neg_inf(r.at(5));
      row.wall_time_s = r.at(6).get<double>();
      s.trace.push_back(row);
    }
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad state file: ") + e.what());
  }
}

void write_best_config_json(std::ostream& os, const BestConfig& c, const Layout& layout) {
  const int n_bs = c.setting.n_bs();
  if (n_bs != layout.n_bs()) throw std::invalid_argument("setting and layout disagree on the BS count");
  json cells = json::array();
  for (int b = 0; b < n_bs; ++b) {
    const auto& bs = layout.bs_list[static_cast<std::size_t>(b)];
    json cell = {{"bs", b + 1},
                 {"site", bs.site + 1},
                 {"sector", bs.sector + 1},
                 {"tilt_deg", c.setting.tilts_deg[b]},
                 {"power_dbm", c.setting.powers_dbm[b]}};
    if (!c.roles.empty()) cell["role"] = to_string(c.roles[static_cast<std::size_t>(b)]);
    cells.push_back(cell);
  }
  const json j = {{"lambda", c.lambda},
                  {"seed", c.seed},
                  {"best_observed", number_or_null(c.best_observed)},
                  {"best_seed", c.best_seed},
                  {"cells", cells}};
  os << j.dump(1) << '\n';
}

BestConfig read_best_config_json(std::istream& is) {
  try {
    const json j = json::parse(is);
    BestConfig c;
    c.lambda = j.at("lambda").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.best_observed = number_or_neg_inf(j.at("best_observed"));
    c.best_seed = j.at("best_seed").get<std::uint64_t>();
    const auto& cells = j.at("cells");
    const auto n = static_cast<Eigen::Index>(cells.size());
    c.setting.tilts_deg.resize(n);
    c.setting.powers_dbm.resize(n);
    bool have_roles = true;
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto& cell = cells.at(static_cast<std::size_t>(b));
      if (cell.at("bs").get<Eigen::Index>() != b + 1) throw FormatError("cells must be listed in BS order");
      c.setting.tilts_deg[b] = cell.at("tilt_deg").get<double>();
      c.setting.powers_dbm[b] = cell.at("power_dbm").get<double>();
      have_roles = have_roles && cell.contains("role");
    }
    if (have_roles)
      for (const auto& cell : cells) c.roles.push_back(parse_role(cell.at("role").get<std::string>()));
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad best-config file: ") + e.what());
  }
}

void write_cdf_csv(std::ostream& os, std::vector<double> gue, std::vector<double> uav) {
  os << "population,sinr_db,cdf\n";
  auto emit = [&os](const char* name, std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      os << name << ',' << format_double(v[i]) << ',' << format_double(static_cast<double>(i + 1) / n) << '\n';
  };
  emit("gue", gue);
  emit("uav", uav);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cbo::io
