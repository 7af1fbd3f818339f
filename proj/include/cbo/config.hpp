// SPDX-License-Identifier: Apache-2.0
//
// Flat `key = value` run configuration. Keys are dotted field names:
//
//   scenario.isd_m = 500
//   scenario.corridors = -650 -610 -780 780 150; -780 780 -650 -610 120; ...
//   bo.ei_variant = textbook
//   run.lambda = 0.5
//
// '#' starts a comment. Unknown keys, duplicates and malformed values throw ConfigError.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "cbo/bo.hpp"
#include "cbo/deploy.hpp"

namespace cbo {

enum class Mode { kOptimize, kBaseline, kEval, kReport };

Mode parse_mode(const std::string& s);
const char* to_string(Mode m);

struct RunSpec {
  ScenarioConfig scenario;
  BoSettings bo;
  double lambda = 0.5;
  std::uint64_t seed = 1;
  int eval_seeds = 20;
  double baseline_tilt_deg = -12.0;
  std::filesystem::path output_dir = ".";
  Mode mode = Mode::kOptimize;

  /// Throws ConfigError on the first inconsistency.
  void validate() const;
};

/// Applies every `key = value` line of the stream on top of `spec`.
void apply_config(std::istream& is, RunSpec& spec, const std::string& source = "<config>");
void apply_config_file(const std::filesystem::path& path, RunSpec& spec);

/// Sets one key; `value` is the raw text after '='.
void set_config_value(RunSpec& spec, const std::string& key, const std::string& value);

}  // namespace cbo
