// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cbo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Axis-aligned UAV corridor: a rectangle in the horizontal plane flown at a fixed height.
struct Corridor {
  double x_min, x_max;
  double y_min, y_max;
  double height_m;

  bool contains(const Vec3& p, double tol = 1e-9) const {
    return p.x() >= x_min - tol && p.x() <= x_max + tol && p.y() >= y_min - tol &&
           p.y() <= y_max + tol && std::abs(p.z() - height_m) <= tol;
  }
};

/// The four corridors of the reference deployment.
std::vector<Corridor> default_corridors();

/// Deployment, channel, population and noise parameters.
struct ScenarioConfig {
  double isd_m = 500.0;
  int n_sites = 19;
  double bs_height_m = 25.0;
  int sectors_per_site = 3;
  double carrier_ghz = 2.0;
  double bandwidth_hz = 1.0e7;
  double max_power_dbm = 46.0;
  double min_power_dbm = 6.0;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 9.0;
  double gue_height_m = 1.5;
  int mean_gues_per_sector = 15;
  int mean_uavs_per_corridor = 50;
  std::vector<Corridor> corridors = default_corridors();
  double hpbw_vert_deg = 10.0;
  double hpbw_horiz_deg = 65.0;
  double max_antenna_gain_dbi = 8.0;
  double tilt_min_deg = -90.0;
  double tilt_max_deg = 90.0;

  int n_bs() const { return n_sites * sectors_per_site; }
  int n_gues() const { return n_bs() * mean_gues_per_sector; }
  int n_uavs() const { return static_cast<int>(corridors.size()) * mean_uavs_per_corridor; }

  /// Thermal noise power over the full band in dBm.
  double noise_power_dbm() const;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

struct BaseStation {
  int site = 0;
  int sector = 0;
  double azimuth_deg = 0.0;  // boresight, counter-clockwise from +x
  Vec2 position = Vec2::Zero();
  double height_m = 0.0;
};

struct Layout {
  double isd_m = 0.0;
  std::vector<Vec2> site_positions;
  std::vector<BaseStation> bs_list;
  std::array<Vec2, 7> wrap_shifts;  // wrap_shifts[0] is the zero vector

  int n_bs() const { return static_cast<int>(bs_list.size()); }

  /// True if p lies in the union of the site hexagons (flat-topped, circumradius ISD/sqrt(3)).
  bool in_service_region(const Vec2& p) const;
};

Layout build_layout(const ScenarioConfig& cfg);

struct WrapResult {
  Vec3 displacement;
  double distance;
};

/// Displacement b' - a over the seven wrap images b' = b + s that minimizes the
/// horizontal distance; ties resolved by the lowest image index.
WrapResult wrap_displacement(const Vec3& a, const Vec3& b, const Layout& layout);

struct UserDrop {
  std::vector<Vec3> gue_positions;
  std::vector<Vec3> uav_positions;
  std::vector<int> uav_corridor;  // corridor index of each UAV
  std::uint64_t seed = 0;
};

/// Uniform GUEs over the service region and uniform UAVs per corridor. Pure in (cfg, seed).
UserDrop drop_users(const ScenarioConfig& cfg, const Layout& layout, std::uint64_t seed);

/// True if a flat-topped hexagon of circumradius `radius` centred at the origin contains p.
bool in_flat_hexagon(const Vec2& p, double radius);

}  // namespace cbo
