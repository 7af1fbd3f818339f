// SPDX-License-Identifier: Apache-2.0
//
// File formats: dataset and trace CSV, the JSON checkpoint blob, best
// configurations and SINR CDF tables. Doubles are written in their shortest
// round-trip form so a reload reproduces the exact bits.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cbo/bo.hpp"
#include "cbo/deploy.hpp"
#include "cbo/netsim.hpp"

namespace cbo::io {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(const std::string& s);

/// One row per observation: 114 input columns (t1..tB, p1..pB) then `value`.
void write_dataset_csv(std::ostream& os, const Dataset& data);
Dataset read_dataset_csv(std::istream& is, const gp::InputBox<double>& box);

/// Header n,b_n,tilt,power,f_n,f_star_n,wall_time_s.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);
std::vector<TraceRow> read_trace_csv(std::istream& is);

/// Identity of the run a checkpoint belongs to.
struct RunIdentity {
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::string ei_variant;
};

void write_state_json(std::ostream& os, const BoState& state, const RunIdentity& id);
BoState read_state_json(std::istream& is, RunIdentity* id = nullptr);

struct BestConfig {
  NetworkSetting setting;
  std::vector<CellRole> roles;  // empty when unknown
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double best_observed = 0.0;
  std::uint64_t best_seed = 0;
};

void write_best_config_json(std::ostream& os, const BestConfig& cfg, const Layout& layout);
BestConfig read_best_config_json(std::istream& is);

/// Sorted SINRs per population with empirical CDF: population,sinr_db,cdf.
void write_cdf_csv(std::ostream& os, std::vector<double> gue_sinr_db, std::vector<double> uav_sinr_db);

/// Writes `text` to `path` through a temporary file and a rename.
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace cbo::io
