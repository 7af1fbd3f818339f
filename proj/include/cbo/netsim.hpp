// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cbo/channel.hpp"
#include "cbo/deploy.hpp"

namespace cbo {

/// Decision vector: per-BS electrical tilt (deg) and transmit power (dBm).
struct NetworkSetting {
  Eigen::VectorXd tilts_deg;
  Eigen::VectorXd powers_dbm;

  static NetworkSetting uniform(int n_bs, double tilt_deg, double power_dbm) {
    return {Eigen::VectorXd::Constant(n_bs, tilt_deg), Eigen::VectorXd::Constant(n_bs, power_dbm)};
  }

  int n_bs() const { return static_cast<int>(tilts_deg.size()); }

  /// Stacked [tilts; powers].
  Eigen::VectorXd stacked() const;
  static NetworkSetting from_stacked(const Eigen::VectorXd& x);

  /// Throws std::invalid_argument when sizes mismatch or an entry leaves the box.
  void validate(const ScenarioConfig& cfg) const;

  bool operator==(const NetworkSetting& o) const {
    return tilts_deg == o.tilts_deg && powers_dbm == o.powers_dbm;
  }
};

/// One stochastic draw: user positions and every BS-UE link, tilt excluded.
/// Matrices are n_bs x n_ue with GUEs first, then UAVs.
struct DropRealization {
  UserDrop drop;
  Eigen::MatrixXd azimuth_off_deg;
  Eigen::MatrixXd elevation_deg;
  Eigen::MatrixXd loss_db;  // path loss + shadowing
  Eigen::MatrixXd fading;   // |h|^2
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> los;
  int n_gue = 0;
  int n_uav = 0;

  int n_ue() const { return n_gue + n_uav; }
};

DropRealization realize(const ScenarioConfig& cfg, const Layout& layout, std::uint64_t seed);

/// Large-scale gain matrix G (dB) for the given tilts.
Eigen::MatrixXd gain_matrix_db(const DropRealization& real, const Eigen::VectorXd& tilts_deg,
                               const AntennaPattern& pattern);

/// Serving BS per UE: argmax_b (p_b + G_bk), lowest index on ties.
std::vector<int> associate(const Eigen::MatrixXd& gain_db, const Eigen::VectorXd& powers_dbm);

/// Downlink SINR (dB) of UE k served by `serving`, all other BSs interfering.
double sinr_db(int k, int serving, const Eigen::MatrixXd& gain_db, const Eigen::MatrixXd& fading,
               const Eigen::VectorXd& powers_dbm, double noise_dbm);

enum class CellRole { kGround, kAerial, kOff };

const char* to_string(CellRole role);

struct CellRoles {
  std::vector<CellRole> roles;
  std::vector<bool> mixed;  // serves both GUEs and UAVs (reported as aerial)
};

/// UEs [0, n_gue) are GUEs, the rest UAVs.
CellRoles classify_cells(const std::vector<int>& serving, int n_gue, int n_bs);

struct EvalReport {
  Eigen::VectorXd sinr_db_per_gue;
  Eigen::VectorXd sinr_db_per_uav;
  std::vector<int> serving_bs;  // GUEs first, then UAVs
  double lambda = 0.0;
  double objective_value = 0.0;
  CellRoles cell_roles;

  double mean_gue_db() const { return sinr_db_per_gue.size() ? sinr_db_per_gue.mean() : 0.0; }
  double mean_uav_db() const { return sinr_db_per_uav.size() ? sinr_db_per_uav.mean() : 0.0; }
};

/// Objective of the mixing ratio: lambda * mean UAV SINR + (1 - lambda) * mean GUE SINR, in dB.
double mixed_objective(double lambda, double mean_uav_db, double mean_gue_db);

/// Evaluation on a fixed realization.
EvalReport evaluate(const DropRealization& real, const NetworkSetting& x, double lambda,
                    const ScenarioConfig& cfg);

/// One drop and one channel realization drawn from `seed`.
EvalReport evaluate(const ScenarioConfig& cfg, const Layout& layout, const NetworkSetting& x, double lambda,
                    std::uint64_t seed);

/// One row per UE: kind, x, y, z, serving BS, SINR.
void write_report_csv(std::ostream& os, const EvalReport& report, const UserDrop& drop);

}  // namespace cbo
