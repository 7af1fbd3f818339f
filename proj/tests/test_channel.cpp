// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cbo/channel.hpp"

using namespace cbo;

namespace {

LinkGeometry geom(double d2d, double h_ut, UeKind kind) {
  LinkGeometry g;
  g.d2d_m = d2d;
  g.d3d_m = std::hypot(d2d, 25.0 - h_ut);
  g.ue_height_m = h_ut;
  g.ue_kind = kind;
  return g;
}

}  // namespace

TEST_CASE("antenna: peak, half-power points, floor") {
  for (double tilt : {-90.0, -12.0, 0.0, 7.5, 45.0}) {
    CHECK(antenna_gain_db(0.0, tilt, tilt) == 8.0);
    CHECK(antenna_gain_db(0.0, tilt + 5.0, tilt) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(antenna_gain_db(0.0, tilt - 5.0, tilt) == doctest::Approx(5.0).epsilon(1e-14));
  }
  CHECK(antenna_gain_db(32.5, 3.0, 3.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(antenna_gain_db(-32.5, 3.0, 3.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(antenna_gain_db(180.0, -90.0, 90.0) == doctest::Approx(-22.0));

  Rng rng(1);
  for (int i = 0; i < 20000; ++i) {
    const double az = uniform(rng, -180, 180), el = uniform(rng, -90, 90), tilt = uniform(rng, -90, 90);
    const double g = antenna_gain_db(az, el, tilt);
    CHECK(g < 8.0);
    CHECK(g >= 8.0 - 30.0);
    CHECK(antenna_gain_db(-az, el, tilt) == g);
    const double d = uniform(rng, -20, 20);
    CHECK(antenna_gain_db(az, el + d, tilt + d) == doctest::Approx(g).epsilon(1e-12));
  }
}

TEST_CASE("antenna: independent evaluation of the parabolic pattern") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double az = uniform(rng, -180, 180), el = uniform(rng, -90, 90), tilt = uniform(rng, -90, 90);
    const double av = std::min(12.0 * std::pow((el - tilt) / 10.0, 2), 30.0);
    const double ah = std::min(12.0 * std::pow(az / 65.0, 2), 30.0);
    CHECK(antenna_gain_db(az, el, tilt) == doctest::Approx(8.0 - std::min(av + ah, 30.0)).epsilon(1e-12));
  }
}

TEST_CASE("link geometry is wrap-corrected with angles in range") {
  const ScenarioConfig cfg;
  const Layout l = build_layout(cfg);
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto& bs = l.bs_list[static_cast<std::size_t>(i % 57)];
    const Vec3 ue(uniform(rng, -1200, 1200), uniform(rng, -1200, 1200), i % 2 ? 1.5 : 150.0);
    const auto g = link_geometry(bs, ue, i % 2 ? UeKind::kGue : UeKind::kUav, l);
    CHECK(g.d3d_m >= g.d2d_m);
    CHECK(g.d2d_m >= 0.0);
    CHECK(g.azimuth_off_deg > -180.0);
    CHECK(g.azimuth_off_deg <= 180.0);
    CHECK(std::abs(g.elevation_deg) <= 90.0);
    CHECK((i % 2 ? g.elevation_deg < 0.0 : g.elevation_deg > 0.0));
  }
  // UE straight along the boresight of sector 0 of the centre site.
  const auto& bs0 = l.bs_list[0];
  const double a = bs0.azimuth_deg * std::numbers::pi / 180.0;
  const auto g = link_geometry(bs0, Vec3(100 * std::cos(a), 100 * std::sin(a), 125.0), UeKind::kUav, l);
  CHECK(g.azimuth_off_deg == doctest::Approx(0.0).scale(1.0));
  CHECK(g.elevation_deg == doctest::Approx(45.0));
}

TEST_CASE("LoS state") {
  Rng rng(4);
  CHECK(los_state(geom(900.0, 150.0, UeKind::kUav), rng));
  CHECK(los_state(geom(900.0, 120.0, UeKind::kUav), rng));
  CHECK(los_state(geom(10.0, 1.5, UeKind::kGue), rng));
  CHECK(los_probability_ground(18.0) == 1.0);
  CHECK_THROWS_AS(los_state(geom(100.0, 50.0, UeKind::kUav), rng), std::invalid_argument);
  CHECK_THROWS_AS(los_state(geom(100.0, 400.0, UeKind::kUav), rng), std::invalid_argument);

  const auto g = geom(500.0, 1.5, UeKind::kGue);
  const double p = 18.0 / 500.0 + std::exp(-500.0 / 63.0) * (1.0 - 18.0 / 500.0);
  CHECK(los_probability_ground(500.0) == doctest::Approx(p).epsilon(1e-15));
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += los_state(g, rng);
  const double se = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(hits / double(n) - p) < 3 * se);
}

TEST_CASE("path loss") {
  // aerial: doubling d3D at 150 m
  LinkGeometry a = geom(300.0, 150.0, UeKind::kUav);
  LinkGeometry b = a;
  b.d3d_m = 2 * a.d3d_m;
  b.d2d_m = std::sqrt(b.d3d_m * b.d3d_m - 125.0 * 125.0);
  const double expect = (22.25 - 0.5 * std::log10(150.0)) * std::log10(2.0);
  CHECK(expect == doctest::Approx(6.37).epsilon(1e-3));
  CHECK(path_loss_db(b, true) - path_loss_db(a, true) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(path_loss_db(a, false), std::invalid_argument);
  CHECK(path_loss_db(a, true) ==
        doctest::Approx(30.9 + (22.25 - 0.5 * std::log10(150.0)) * std::log10(a.d3d_m) + 20 * std::log10(2.0)));

  // ground: LoS before the 320 m breakpoint
  const auto g100 = geom(100.0, 1.5, UeKind::kGue);
  CHECK(path_loss_db(g100, true) == doctest::Approx(28.0 + 22.0 * std::log10(g100.d3d_m) + 20 * std::log10(2.0)));
  // NLoS never below LoS; both monotone in distance
  double prev_l = -1e9, prev_n = -1e9;
  for (int i = 0; i < 1000; ++i) {
    const auto g = geom(10.0 + i * 2.0, 1.5, UeKind::kGue);
    const double l = path_loss_db(g, true), nl = path_loss_db(g, false);
    CHECK(nl >= l);
    CHECK(l >= prev_l);
    CHECK(nl >= prev_n);
    prev_l = l;
    prev_n = nl;
  }
  double prev_a = -1e9;
  for (int i = 0; i < 1000; ++i) {
    const double pl = path_loss_db(geom(10.0 + i * 3.0, 120.0, UeKind::kUav), true);
    CHECK(pl >= prev_a);
    prev_a = pl;
  }
  // clamp: below 10 m behaves like 10 m
  CHECK(path_loss_db(geom(2.0, 1.5, UeKind::kGue), true) == path_loss_db(geom(10.0, 1.5, UeKind::kGue), true));
}

TEST_CASE("shadow fading statistics") {
  Rng rng(5);
  auto stats = [&](bool los, UeKind kind, double h, int n) {
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
      const double v = shadow_fading_db(los, kind, h, rng);
      s += v;
      ss += v * v;
    }
    const double m = s / n;
    return std::pair{m, std::sqrt(ss / n - m * m)};
  };
  const int n = 1000000;
  auto [m_nlos, sd_nlos] = stats(false, UeKind::kGue, 1.5, n);
  CHECK(std::abs(m_nlos) < 3 * 6.0 / std::sqrt(n));
  CHECK(sd_nlos == doctest::Approx(6.0).epsilon(0.02));
  auto [m_los, sd_los] = stats(true, UeKind::kGue, 1.5, 200000);
  CHECK(sd_los == doctest::Approx(4.0).epsilon(0.02));
  const double sigma_uav = 4.64 * std::exp(-0.0066 * 150.0);
  CHECK(sigma_uav == doctest::Approx(1.72).epsilon(0.01));
  CHECK(shadow_sigma_db(true, UeKind::kUav, 150.0) == doctest::Approx(sigma_uav).epsilon(1e-15));
  auto [m_uav, sd_uav] = stats(true, UeKind::kUav, 150.0, 200000);
  CHECK(sd_uav == doctest::Approx(sigma_uav).epsilon(0.02));
  (void)m_los;
  (void)m_uav;
}

TEST_CASE("small-scale power") {
  Rng rng(6);
  CHECK(small_scale_power(UeKind::kUav, rng) == 1.0);
  const int n = 1000000;
  double s = 0;
  int below1 = 0;
  for (int i = 0; i < n; ++i) {
    const double v = small_scale_power(UeKind::kGue, rng);
    REQUIRE(v >= 0.0);
    s += v;
    below1 += v <= 1.0;
  }
  CHECK(s / n == doctest::Approx(1.0).epsilon(0.005));
  CHECK(below1 / double(n) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(0.005 / 0.632));
}

TEST_CASE("large-scale gain is the component sum") {
  CHECK(large_scale_gain_db(120.0, 3.0, 8.0) == -115.0);
  CHECK(large_scale_gain_db(120.0, 3.0, 11.0) - large_scale_gain_db(120.0, 3.0, 8.0) == 3.0);
  const ScenarioConfig cfg;
  const Layout l = build_layout(cfg);
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto& bs = l.bs_list[static_cast<std::size_t>(i % 57)];
    const bool uav = i % 3 == 0;
    const Vec3 ue(uniform(rng, -1000, 1000), uniform(rng, -1000, 1000), uav ? 120.0 : 1.5);
    const auto g = link_geometry(bs, ue, uav ? UeKind::kUav : UeKind::kGue, l);
    Rng r1(100 + i), r2(100 + i);
    const auto real = draw_link(g, r1);
    // replay the draw order: LoS, shadowing, fading
    const bool los = los_state(g, r2);
    const double sh = shadow_fading_db(los, g.ue_kind, g.ue_height_m, r2);
    CHECK(real.los == los);
    CHECK(real.shadow_db == sh);
    CHECK(real.pathloss_db == path_loss_db(g, los));
    if (uav) {
      CHECK(real.los);
      CHECK(real.small_scale_power == 1.0);
    }
    const double tilt = uniform(rng, -90, 90);
    const double ant = antenna_gain_db(g.azimuth_off_deg, g.elevation_deg, tilt);
    CHECK(large_scale_gain_db(real.pathloss_db, real.shadow_db, ant) ==
          doctest::Approx(-real.pathloss_db - real.shadow_db + ant).epsilon(1e-15));
  }
}
