// SPDX-License-Identifier: Apache-2.0
#include "cbo/deploy.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cbo/rng.hpp"

namespace cbo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Vec2 polar(double r, double deg) { return {r * std::cos(deg * kDegToRad), r * std::sin(deg * kDegToRad)}; }

}  // namespace

std::vector<Corridor> default_corridors() {
  return {
      {-650.0, -610.0, -780.0, 780.0, 150.0},
      {-780.0, 780.0, -650.0, -610.0, 120.0},
      {-780.0, 780.0, 610.0, 650.0, 120.0},
      {610.0, 650.0, -780.0, 780.0, 150.0},
  };
}

double ScenarioConfig::noise_power_dbm() const {
  return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

void ScenarioConfig::validate() const {
  if (!(isd_m > 0.0)) throw ConfigError("scenario.isd_m must be positive");
  if (n_sites != 19) throw ConfigError("scenario.n_sites must be 19 (only the 19-site layout is supported)");
  if (sectors_per_site != 3) throw ConfigError("scenario.sectors_per_site must be 3");
  if (!(bs_height_m > 0.0)) throw ConfigError("scenario.bs_height_m must be positive");
  if (!(min_power_dbm < max_power_dbm)) throw ConfigError("scenario.min_power_dbm must be below max_power_dbm");
  if (tilt_min_deg != -tilt_max_deg || !(tilt_max_deg > 0.0) || tilt_max_deg > 90.0)
    throw ConfigError("tilt range must be symmetric about 0 and within [-90, 90]");
  if (!(carrier_ghz > 0.0) || !(bandwidth_hz > 0.0)) throw ConfigError("carrier and bandwidth must be positive");
  if (mean_gues_per_sector < 1 || mean_uavs_per_corridor < 0) throw ConfigError("user counts out of range");
  if (corridors.size() != 4) throw ConfigError("exactly four corridors are required");
  for (const auto& c : corridors) {
    if (!(c.x_min < c.x_max) || !(c.y_min < c.y_max)) throw ConfigError("corridor box is empty");
    if (c.height_m != 120.0 && c.height_m != 150.0) throw ConfigError("corridor heights must be 120 or 150 m");
  }
  if (!(hpbw_vert_deg > 0.0) || !(hpbw_horiz_deg > 0.0)) throw ConfigError("beamwidths must be positive");
}

bool in_flat_hexagon(const Vec2& p, double radius) {
  const double ax = std::abs(p.x());
  const double ay = std::abs(p.y());
  const double s3 = std::sqrt(3.0);
  return ay <= 0.5 * s3 * radius + 1e-9 && s3 * ax + ay <= s3 * radius + 1e-9;
}

bool Layout::in_service_region(const Vec2& p) const {
  const double radius = isd_m / std::sqrt(3.0);
  for (const auto& s : site_positions)
    if (in_flat_hexagon(p - s, radius)) return true;
  return false;
}

Layout build_layout(const ScenarioConfig& cfg) {
  cfg.validate();
  Layout layout;
  layout.isd_m = cfg.isd_m;

  // Lattice basis 60 degrees apart; site hexagons are then flat-topped.
  const Vec2 e1 = polar(cfg.isd_m, 30.0);
  const Vec2 e2 = polar(cfg.isd_m, 90.0);

  // Centre first, then ring 1 and ring 2, each ring counter-clockwise.
  layout.site_positions.push_back(Vec2::Zero());
  const std::array<std::array<int, 2>, 6> dirs{{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};
  for (int ring = 1; ring <= 2; ++ring) {
    int q = ring * dirs[4][0], r = ring * dirs[4][1];
    for (int side = 0; side < 6; ++side) {
      for (int step = 0; step < ring; ++step) {
        layout.site_positions.push_back(q * e1 + r * e2);
        q += dirs[side][0];
        r += dirs[side][1];
      }
    }
  }

  const std::array<double, 3> boresights{30.0, 150.0, 270.0};
  for (int site = 0; site < cfg.n_sites; ++site) {
    for (int sector = 0; sector < cfg.sectors_per_site; ++sector) {
      layout.bs_list.push_back(
          {site, sector, boresights[sector], layout.site_positions[site], cfg.bs_height_m});
    }
  }

  // Translations of the 19-site cluster: axial (5, -2) and its 60-degree rotations.
  layout.wrap_shifts[0] = Vec2::Zero();
  int q = 5, r = -2;
  for (int k = 1; k <= 6; ++k) {
    layout.wrap_shifts[k] = q * e1 + r * e2;
    const int nq = -r, nr = q + r;
    q = nq;
    r = nr;
  }
  return layout;
}

WrapResult wrap_displacement(const Vec3& a, const Vec3& b, const Layout& layout) {
  double best = std::numeric_limits<double>::infinity();
  Vec3 disp = Vec3::Zero();
  for (const auto& s : layout.wrap_shifts) {
    const double dx = b.x() + s.x() - a.x();
    const double dy = b.y() + s.y() - a.y();
    const double h2 = dx * dx + dy * dy;
    if (h2 < best) {
      best = h2;
      disp = {dx, dy, b.z() - a.z()};
    }
  }
  return {disp, disp.norm()};
}

UserDrop drop_users(const ScenarioConfig& cfg, const Layout& layout, std::uint64_t seed) {
  UserDrop drop;
  drop.seed = seed;
  Rng rng = make_rng(seed, Stream::kUserPositions);

  const double radius = cfg.isd_m / std::sqrt(3.0);
  const double half_h = 0.5 * std::sqrt(3.0) * radius;
  const int n_sites = static_cast<int>(layout.site_positions.size());

  drop.gue_positions.reserve(cfg.n_gues());
  for (int i = 0; i < cfg.n_gues(); ++i) {
    // Site hexagons have equal area, so a uniform site pick followed by a
    // uniform point in its hexagon is uniform over the union.
    const int site = std::min(n_sites - 1, static_cast<int>(uniform01(rng) * n_sites));
    Vec2 p;
    do {
      p = {uniform(rng, -radius, radius), uniform(rng, -half_h, half_h)};
    } while (!in_flat_hexagon(p, radius));
    const Vec2 pos = layout.site_positions[site] + p;
    drop.gue_positions.emplace_back(pos.x(), pos.y(), cfg.gue_height_m);
  }

  drop.uav_positions.reserve(cfg.n_uavs());
  for (std::size_t c = 0; c < cfg.corridors.size(); ++c) {
    const auto& box = cfg.corridors[c];
    for (int j = 0; j < cfg.mean_uavs_per_corridor; ++j) {
      const double x = uniform(rng, box.x_min, box.x_max);
      const double y = uniform(rng, box.y_min, box.y_max);
      drop.uav_positions.emplace_back(x, y, box.height_m);
      drop.uav_corridor.push_back(static_cast<int>(c));
    }
  }
  return drop;
}

}  // namespace cbo
