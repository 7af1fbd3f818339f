// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

#include "cbo/deploy.hpp"
#include "cbo/rng.hpp"

namespace cbo {

enum class UeKind { kGue, kUav };

struct LinkGeometry {
  double d2d_m = 0.0;
  double d3d_m = 0.0;
  double azimuth_off_deg = 0.0;  // (-180, 180]
  double elevation_deg = 0.0;    // positive upward, seen from the BS
  UeKind ue_kind = UeKind::kGue;
  double ue_height_m = 1.5;
};

/// Wrap-corrected geometry of the link from `bs` to a UE at `ue`.
LinkGeometry link_geometry(const BaseStation& bs, const Vec3& ue, UeKind kind, const Layout& layout);

/// Sector antenna pattern parameters (parabolic element pattern).
struct AntennaPattern {
  double max_gain_dbi = 8.0;
  double hpbw_vert_deg = 10.0;
  double hpbw_horiz_deg = 65.0;
  double front_back_db = 30.0;    // A_m
  double side_lobe_vert_db = 30.0;  // SLA_V

  static AntennaPattern from(const ScenarioConfig& cfg) {
    return {cfg.max_antenna_gain_dbi, cfg.hpbw_vert_deg, cfg.hpbw_horiz_deg, 30.0, 30.0};
  }
};

/// Directional gain in dBi. Electrical tilt enters as an elevation offset,
/// negative tilt points the main lobe below the horizon.
double antenna_gain_db(double azimuth_off_deg, double elevation_deg, double tilt_deg,
                       const AntennaPattern& pattern = {});

/// Ground LoS probability for the urban-macro model (UE at or below 13 m).
double los_probability_ground(double d2d_m);

/// Throws std::invalid_argument for UE heights outside {1.5} and [100, 300] m.
void check_ue_height(double ue_height_m);

bool los_state(const LinkGeometry& geom, Rng& rng);

/// Path loss in dB. Distances below 10 m are clamped to 10 m.
double path_loss_db(const LinkGeometry& geom, bool los, double bs_height_m = 25.0, double carrier_ghz = 2.0);

double shadow_sigma_db(bool los, UeKind kind, double ue_height_m);

/// Zero-mean Gaussian shadowing in dB, expressed as extra loss.
double shadow_fading_db(bool los, UeKind kind, double ue_height_m, Rng& rng);

/// |h|^2: unit-mean exponential for GUEs (Rayleigh), exactly 1 for UAVs.
double small_scale_power(UeKind kind, Rng& rng);

/// Tilt-independent part of one link draw.
struct LinkRealization {
  bool los = false;
  double pathloss_db = 0.0;
  double shadow_db = 0.0;
  double small_scale_power = 1.0;
};

LinkRealization draw_link(const LinkGeometry& geom, Rng& rng, double bs_height_m = 25.0, double carrier_ghz = 2.0);

/// Large-scale gain G in dB: antenna gain minus path loss and shadowing (UE antenna 0 dBi).
inline double large_scale_gain_db(double pathloss_db, double shadow_db, double antenna_db) {
  return -pathloss_db - shadow_db + antenna_db;
}

}  // namespace cbo
