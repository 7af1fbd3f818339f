// SPDX-License-Identifier: Apache-2.0
#include "cbo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cbo {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kMinDistance = 10.0;

double wrap_angle_deg(double a) {
  a = std::fmod(a, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

double uma_los_db(double d2d, double d3d, double h_bs, double h_ut, double fc_ghz) {
  // Effective environment height 1 m for UEs below 13 m.
  const double h_e = 1.0;
  const double d_bp = 4.0 * (h_bs - h_e) * (h_ut - h_e) * fc_ghz * 1e9 / kSpeedOfLight;
  if (d2d <= d_bp) return 28.0 + 22.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
  return 28.0 + 40.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) -
         9.0 * std::log10(d_bp * d_bp + (h_bs - h_ut) * (h_bs - h_ut));
}

double uma_nlos_db(double d2d, double d3d, double h_bs, double h_ut, double fc_ghz) {
  const double nlos = 13.54 + 39.08 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) - 0.6 * (h_ut - 1.5);
  return std::max(uma_los_db(d2d, d3d, h_bs, h_ut, fc_ghz), nlos);
}

double aerial_los_db(double d3d, double h_ut, double fc_ghz) {
  return 30.9 + (22.25 - 0.5 * std::log10(h_ut)) * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
}

}  // namespace

LinkGeometry link_geometry(const BaseStation& bs, const Vec3& ue, UeKind kind, const Layout& layout) {
  const Vec3 bs_pos(bs.position.x(), bs.position.y(), bs.height_m);
  const WrapResult w = wrap_displacement(bs_pos, ue, layout);
  LinkGeometry g;
  g.d2d_m = std::hypot(w.displacement.x(), w.displacement.y());
  g.d3d_m = w.distance;
  const double az = std::atan2(w.displacement.y(), w.displacement.x()) * kRadToDeg;
  g.azimuth_off_deg = wrap_angle_deg(az - bs.azimuth_deg);
  g.elevation_deg = std::atan2(w.displacement.z(), g.d2d_m) * kRadToDeg;
  g.ue_kind = kind;
  g.ue_height_m = ue.z();
  return g;
}

double antenna_gain_db(double azimuth_off_deg, double elevation_deg, double tilt_deg,
                       const AntennaPattern& p) {
  const double v = (elevation_deg - tilt_deg) / p.hpbw_vert_deg;
  const double h = azimuth_off_deg / p.hpbw_horiz_deg;
  const double a_v = -std::min(12.0 * v * v, p.side_lobe_vert_db);
  const double a_h = -std::min(12.0 * h * h, p.front_back_db);
  return p.max_gain_dbi - std::min(-(a_v + a_h), p.front_back_db);
}

double los_probability_ground(double d2d_m) {
  if (d2d_m <= 18.0) return 1.0;
  return 18.0 / d2d_m + std::exp(-d2d_m / 63.0) * (1.0 - 18.0 / d2d_m);
}

void check_ue_height(double h) {
  const bool ground = std::abs(h - 1.5) < 1e-9;
  const bool aerial = h >= 100.0 && h <= 300.0;
  if (!ground && !aerial) throw std::invalid_argument("unsupported UE height " + std::to_string(h) + " m");
}

bool los_state(const LinkGeometry& geom, Rng& rng) {
  check_ue_height(geom.ue_height_m);
  if (geom.ue_height_m >= 100.0) return true;
  return uniform01(rng) < los_probability_ground(geom.d2d_m);
}

double path_loss_db(const LinkGeometry& geom, bool los, double bs_height_m, double carrier_ghz) {
  check_ue_height(geom.ue_height_m);
  const double dz = bs_height_m - geom.ue_height_m;
  const double d2d = std::max(geom.d2d_m, kMinDistance);
  const double d3d = std::max(std::sqrt(d2d * d2d + dz * dz), geom.d3d_m);
  if (geom.ue_kind == UeKind::kUav || geom.ue_height_m >= 100.0) {
    if (!los) throw std::invalid_argument("aerial links above 100 m are always line of sight");
    return aerial_los_db(d3d, geom.ue_height_m, carrier_ghz);
  }
  return los ? uma_los_db(d2d, d3d, bs_height_m, geom.ue_height_m, carrier_ghz)
             : uma_nlos_db(d2d, d3d, bs_height_m, geom.ue_height_m, carrier_ghz);
}

double shadow_sigma_db(bool los, UeKind kind, double ue_height_m) {
  if (kind == UeKind::kUav) return 4.64 * std::exp(-0.0066 * ue_height_m);
  return los ? 4.0 : 6.0;
}

double shadow_fading_db(bool los, UeKind kind, double ue_height_m, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return shadow_sigma_db(los, kind, ue_height_m) * n(rng);
}

double small_scale_power(UeKind kind, Rng& rng) {
  if (kind == UeKind::kUav) return 1.0;
  // Inverse-CDF draw; 1 - u lies in (0, 1].
  return -std::log(1.0 - uniform01(rng));
}

LinkRealization draw_link(const LinkGeometry& geom, Rng& rng, double bs_height_m, double carrier_ghz) {
  LinkRealization r;
  r.los = los_state(geom, rng);
  r.pathloss_db = path_loss_db(geom, r.los, bs_height_m, carrier_ghz);
  r.shadow_db = shadow_fading_db(r.los, geom.ue_kind, geom.ue_height_m, rng);
  r.small_scale_power = small_scale_power(geom.ue_kind, rng);
  return r;
}

}  // namespace cbo
