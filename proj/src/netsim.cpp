// SPDX-License-Identifier: Apache-2.0
#include "cbo/netsim.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "cbo/parallel.hpp"

namespace cbo {

namespace {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

}  // namespace

Eigen::VectorXd NetworkSetting::stacked() const {
  Eigen::VectorXd x(tilts_deg.size() + powers_dbm.size());
  x << tilts_deg, powers_dbm;
  return x;
}

NetworkSetting NetworkSetting::from_stacked(const Eigen::VectorXd& x) {
  if (x.size() % 2 != 0) throw std::invalid_argument("stacked setting must have even length");
  const Eigen::Index n = x.size() / 2;
  return {x.head(n), x.tail(n)};
}

void NetworkSetting::validate(const ScenarioConfig& cfg) const {
  if (tilts_deg.size() != cfg.n_bs() || powers_dbm.size() != cfg.n_bs())
    throw std::invalid_argument("setting must hold one tilt and one power per BS");
  for (Eigen::Index b = 0; b < tilts_deg.size(); ++b) {
    if (!(tilts_deg[b] >= cfg.tilt_min_deg && tilts_deg[b] <= cfg.tilt_max_deg))
      throw std::invalid_argument("tilt of BS " + std::to_string(b + 1) + " outside the allowed range");
    if (!(powers_dbm[b] >= cfg.min_power_dbm && powers_dbm[b] <= cfg.max_power_dbm))
      throw std::invalid_argument("power of BS " + std::to_string(b + 1) + " outside the allowed range");
  }
}

DropRealization realize(const ScenarioConfig& cfg, const Layout& layout, std::uint64_t seed) {
  DropRealization r;
  r.drop = drop_users(cfg, layout, seed);
  r.n_gue = static_cast<int>(r.drop.gue_positions.size());
  r.n_uav = static_cast<int>(r.drop.uav_positions.size());
  const int n_bs = layout.n_bs();
  const int n_ue = r.n_ue();
  r.azimuth_off_deg.resize(n_bs, n_ue);
  r.elevation_deg.resize(n_bs, n_ue);
  r.loss_db.resize(n_bs, n_ue);
  r.fading.resize(n_bs, n_ue);
  r.los.resize(n_bs, n_ue);

  // One generator per UE so the draw does not depend on the thread count.
  parallel_for(static_cast<std::size_t>(n_ue), [&](std::size_t ku) {
    const int k = static_cast<int>(ku);
    const bool is_gue = k < r.n_gue;
    const Vec3& pos = is_gue ? r.drop.gue_positions[k] : r.drop.uav_positions[k - r.n_gue];
    const UeKind kind = is_gue ? UeKind::kGue : UeKind::kUav;
    Rng rng = make_rng(seed, Stream::kLink, ku);
    for (int b = 0; b < n_bs; ++b) {
      const LinkGeometry g = link_geometry(layout.bs_list[b], pos, kind, layout);
      const LinkRealization link = draw_link(g, rng, cfg.bs_height_m, cfg.carrier_ghz);
      r.azimuth_off_deg(b, k) = g.azimuth_off_deg;
      r.elevation_deg(b, k) = g.elevation_deg;
      r.loss_db(b, k) = link.pathloss_db + link.shadow_db;
      r.fading(b, k) = link.small_scale_power;
      r.los(b, k) = link.los;
    }
  });
  return r;
}

Eigen::MatrixXd gain_matrix_db(const DropRealization& real, const Eigen::VectorXd& tilts_deg,
                               const AntennaPattern& pattern) {
  const Eigen::Index n_bs = real.loss_db.rows();
  const Eigen::Index n_ue = real.loss_db.cols();
  if (tilts_deg.size() != n_bs) throw std::invalid_argument("tilt vector size does not match BS count");
  Eigen::MatrixXd g(n_bs, n_ue);
  for (Eigen::Index k = 0; k < n_ue; ++k)
    for (Eigen::Index b = 0; b < n_bs; ++b)
      g(b, k) = large_scale_gain_db(real.loss_db(b, k), 0.0,
                                    antenna_gain_db(real.azimuth_off_deg(b, k), real.elevation_deg(b, k),
                                                    tilts_deg[b], pattern));
  return g;
}

std::vector<int> associate(const Eigen::MatrixXd& gain_db, const Eigen::VectorXd& powers_dbm) {
  std::vector<int> serving(static_cast<std::size_t>(gain_db.cols()));
  for (Eigen::Index k = 0; k < gain_db.cols(); ++k) {
    Eigen::Index best = 0;
    // maxCoeff returns the first maximal index.
    (powers_dbm + gain_db.col(k)).maxCoeff(&best);
    serving[static_cast<std::size_t>(k)] = static_cast<int>(best);
  }
  return serving;
}

double sinr_db(int k, int serving, const Eigen::MatrixXd& gain_db, const Eigen::MatrixXd& fading,
               const Eigen::VectorXd& powers_dbm, double noise_dbm) {
  double signal = 0.0;
  double interference = 0.0;
  for (Eigen::Index b = 0; b < gain_db.rows(); ++b) {
    const double rx = dbm_to_mw(powers_dbm[b] + gain_db(b, k)) * fading(b, k);
    if (b == serving)
      signal = rx;
    else
      interference += rx;
  }
  return 10.0 * std::log10(signal / (interference + dbm_to_mw(noise_dbm)));
}

const char* to_string(CellRole role) {
  switch (role) {
    case CellRole::kGround: return "ground";
    case CellRole::kAerial: return "aerial";
    case CellRole::kOff: return "off";
  }
  return "off";
}

CellRoles classify_cells(const std::vector<int>& serving, int n_gue, int n_bs) {
  std::vector<int> gues(n_bs, 0), uavs(n_bs, 0);
  for (std::size_t k = 0; k < serving.size(); ++k) {
    if (static_cast<int>(k) < n_gue)
      ++gues[serving[k]];
    else
      ++uavs[serving[k]];
  }
  CellRoles out;
  out.roles.resize(n_bs);
  out.mixed.resize(n_bs);
  for (int b = 0; b < n_bs; ++b) {
    out.roles[b] = uavs[b] > 0 ? CellRole::kAerial : gues[b] > 0 ? CellRole::kGround : CellRole::kOff;
    out.mixed[b] = uavs[b] > 0 && gues[b] > 0;
  }
  return out;
}

double mixed_objective(double lambda, double mean_uav_db, double mean_gue_db) {
  return lambda * mean_uav_db + (1.0 - lambda) * mean_gue_db;
}

EvalReport evaluate(const DropRealization& real, const NetworkSetting& x, double lambda,
                    const ScenarioConfig& cfg) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  x.validate(cfg);
  const Eigen::MatrixXd g = gain_matrix_db(real, x.tilts_deg, AntennaPattern::from(cfg));
  EvalReport rep;
  rep.lambda = lambda;
  rep.serving_bs = associate(g, x.powers_dbm);
  const double noise = cfg.noise_power_dbm();
  rep.sinr_db_per_gue.resize(real.n_gue);
  rep.sinr_db_per_uav.resize(real.n_uav);
  for (int k = 0; k < real.n_ue(); ++k) {
    const double s = sinr_db(k, rep.serving_bs[k], g, real.fading, x.powers_dbm, noise);
    if (k < real.n_gue)
      rep.sinr_db_per_gue[k] = s;
    else
      rep.sinr_db_per_uav[k - real.n_gue] = s;
  }
  rep.objective_value = mixed_objective(lambda, rep.mean_uav_db(), rep.mean_gue_db());
  rep.cell_roles = classify_cells(rep.serving_bs, real.n_gue, x.n_bs());
  return rep;
}

EvalReport evaluate(const ScenarioConfig& cfg, const Layout& layout, const NetworkSetting& x, double lambda,
                    std::uint64_t seed) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  x.validate(cfg);
  return evaluate(realize(cfg, layout, seed), x, lambda, cfg);
}

void write_report_csv(std::ostream& os, const EvalReport& report, const UserDrop& drop) {
  os << "kind,x_m,y_m,z_m,serving_bs,sinr_db\n";
  const auto n_gue = static_cast<std::size_t>(report.sinr_db_per_gue.size());
  for (std::size_t k = 0; k < report.serving_bs.size(); ++k) {
    const bool gue = k < n_gue;
    const Vec3& p = gue ? drop.gue_positions[k] : drop.uav_positions[k - n_gue];
    const double s = gue ? report.sinr_db_per_gue[k] : report.sinr_db_per_uav[k - n_gue];
    os << (gue ? "GUE" : "UAV") << ',' << p.x() << ',' << p.y() << ',' << p.z() << ','
       << report.serving_bs[k] + 1 << ',' << s << '\n';
  }
}

}  // namespace cbo
