// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "cbo/deploy.hpp"
#include "cbo/rng.hpp"

using namespace cbo;

namespace {

const ScenarioConfig kCfg{};

// Independent 7-image enumeration.
double brute_wrap_distance2d(const Vec3& a, const Vec3& b, const Layout& l) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : l.wrap_shifts) {
    const Vec2 d = (b.head<2>() + s) - a.head<2>();
    best = std::min(best, d.norm());
  }
  return best;
}

}  // namespace

TEST_CASE("layout has 57 BSs at 25 m and a centred site grid") {
  const Layout l = build_layout(kCfg);
  REQUIRE(l.n_bs() == 57);
  REQUIRE(l.site_positions.size() == 19);
  for (const auto& bs : l.bs_list) CHECK(bs.height_m == 25.0);
  CHECK(l.site_positions[0].norm() == doctest::Approx(0.0));

  double dmin = std::numeric_limits<double>::infinity();
  int pairs = 0;
  for (std::size_t i = 0; i < 19; ++i)
    for (std::size_t j = i + 1; j < 19; ++j, ++pairs) dmin = std::min(dmin, (l.site_positions[i] - l.site_positions[j]).norm());
  CHECK(pairs == 171);
  CHECK(dmin == doctest::Approx(500.0).epsilon(1e-12));

  int ring1 = 0;
  for (const auto& p : l.site_positions)
    if (std::abs(p.norm() - 500.0) < 1e-6) ++ring1;
  CHECK(ring1 == 6);
}

TEST_CASE("sectors of a site point 120 degrees apart at 30/150/270") {
  const Layout l = build_layout(kCfg);
  for (int s = 0; s < 19; ++s) {
    const double az[3] = {l.bs_list[3 * s].azimuth_deg, l.bs_list[3 * s + 1].azimuth_deg, l.bs_list[3 * s + 2].azimuth_deg};
    CHECK(az[0] == 30.0);
    CHECK(az[1] == 150.0);
    CHECK(az[2] == 270.0);
    for (int k = 0; k < 3; ++k) {
      CHECK(l.bs_list[3 * s + k].site == s);
      CHECK(l.bs_list[3 * s + k].position == l.site_positions[s]);
    }
  }
}

TEST_CASE("wrap shifts: zero plus six distinct vectors of equal length") {
  const Layout l = build_layout(kCfg);
  CHECK(l.wrap_shifts[0].norm() == 0.0);
  std::set<std::pair<long, long>> distinct;
  for (const auto& s : l.wrap_shifts) distinct.insert({std::lround(s.x() * 1e6), std::lround(s.y() * 1e6)});
  CHECK(distinct.size() == 7);
  const double len = l.wrap_shifts[1].norm();
  for (int i = 1; i < 7; ++i) CHECK(l.wrap_shifts[i].norm() == doctest::Approx(len).epsilon(1e-12));
  CHECK(len == doctest::Approx(500.0 * std::sqrt(19.0)).epsilon(1e-12));
  // the cluster tiles the plane: every shift is a site-lattice vector, and the
  // shifted cluster centre is not one of the 19 sites
  for (int i = 1; i < 7; ++i)
    for (const auto& p : l.site_positions) CHECK((p - l.wrap_shifts[i]).norm() > 1.0);
}

TEST_CASE("wrap_displacement examples and properties") {
  const Layout l = build_layout(kCfg);
  const Vec3 a(123.0, -45.0, 25.0);
  CHECK(wrap_displacement(a, a, l).distance == 0.0);

  for (int i = 1; i < 7; ++i) {
    const Vec3 b(l.wrap_shifts[i].x(), l.wrap_shifts[i].y(), 0.0);
    const auto w = wrap_displacement(Vec3::Zero(), b, l);
    CHECK(w.displacement.head<2>().norm() == doctest::Approx(0.0).scale(1.0));
  }

  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 p(uniform(rng, -1300, 1300), uniform(rng, -1300, 1300), 25.0);
    const Vec3 q(uniform(rng, -1300, 1300), uniform(rng, -1300, 1300), uniform(rng, 1.5, 150));
    const auto pq = wrap_displacement(p, q, l);
    const auto qp = wrap_displacement(q, p, l);
    CHECK(pq.displacement.head<2>().norm() == brute_wrap_distance2d(p, q, l));
    CHECK(pq.distance == doctest::Approx(qp.distance).epsilon(1e-12));
    CHECK(pq.displacement.head<2>().norm() <= (q - p).head<2>().norm() + 1e-9);
    CHECK(pq.distance == doctest::Approx(pq.displacement.norm()));
    CHECK(pq.displacement.z() == q.z() - p.z());
  }
}

TEST_CASE("build_layout rejects unsupported site counts") {
  ScenarioConfig c;
  c.n_sites = 7;
  CHECK_THROWS_AS(build_layout(c), ConfigError);
}

TEST_CASE("ScenarioConfig validation and noise power") {
  CHECK(kCfg.n_bs() == 57);
  CHECK(kCfg.noise_power_dbm() == doctest::Approx(-95.0));
  CHECK_NOTHROW(kCfg.validate());
  ScenarioConfig c;
  c.min_power_dbm = 50.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.tilt_min_deg = -80.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.corridors.pop_back();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.corridors[0].height_m = 200.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("drop_users: counts, determinism, containment") {
  const Layout l = build_layout(kCfg);
  const UserDrop d1 = drop_users(kCfg, l, 42);
  const UserDrop d2 = drop_users(kCfg, l, 42);
  const UserDrop d3 = drop_users(kCfg, l, 43);
  REQUIRE(d1.gue_positions.size() == 855);
  REQUIRE(d1.uav_positions.size() == 200);
  CHECK(d1.gue_positions == d2.gue_positions);
  CHECK(d1.uav_positions == d2.uav_positions);
  CHECK(d1.gue_positions != d3.gue_positions);

  for (const auto& p : d1.gue_positions) {
    CHECK(p.z() == 1.5);
    CHECK(l.in_service_region(p.head<2>()));
  }
  std::vector<int> per(4, 0);
  for (std::size_t i = 0; i < d1.uav_positions.size(); ++i) {
    const auto& p = d1.uav_positions[i];
    int inside = 0;
    for (const auto& c : kCfg.corridors) inside += c.contains(p);
    CHECK(inside >= 1);
    CHECK(kCfg.corridors[static_cast<std::size_t>(d1.uav_corridor[i])].contains(p));
    ++per[static_cast<std::size_t>(d1.uav_corridor[i])];
    if (std::abs(p.x()) <= 610.0 && p.z() == 120.0) CHECK((std::abs(p.y()) >= 610.0 && std::abs(p.y()) <= 650.0));
  }
  for (int n : per) CHECK(n == 50);
}

TEST_CASE("GUE positions are uniform over the region (centroid test)") {
  const Layout l = build_layout(kCfg);
  double sx = 0, sy = 0, sxx = 0, syy = 0;
  long n = 0;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    for (const auto& p : drop_users(kCfg, l, seed).gue_positions) {
      sx += p.x();
      sy += p.y();
      sxx += p.x() * p.x();
      syy += p.y() * p.y();
      ++n;
    }
  }
  REQUIRE(n >= 10000);
  const double mx = sx / n, my = sy / n;
  const double se_x = std::sqrt((sxx / n - mx * mx) / n), se_y = std::sqrt((syy / n - my * my) / n);
  // the region is symmetric about the origin
  CHECK(std::abs(mx) < 3 * se_x);
  CHECK(std::abs(my) < 3 * se_y);
}

TEST_CASE("in_flat_hexagon corners and edges") {
  const double r = 100.0;
  CHECK(in_flat_hexagon(Vec2(0, 0), r));
  CHECK(in_flat_hexagon(Vec2(r, 0), r));
  CHECK(!in_flat_hexagon(Vec2(r + 0.1, 0), r));
  CHECK(in_flat_hexagon(Vec2(0, r * std::sqrt(3.0) / 2), r));
  CHECK(!in_flat_hexagon(Vec2(0, r * std::sqrt(3.0) / 2 + 0.1), r));
  CHECK(!in_flat_hexagon(Vec2(0.9 * r, 0.5 * r), r));
}
