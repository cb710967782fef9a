#include "obmimo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "obmimo/errors.hpp"

namespace obmimo::scenario {

void CellConfig::validate() const {
  if (!(side_m > 0.0)) throw ContractViolation("cell side must be positive");
  if (!(min_dist_m >= 0.0 && min_dist_m < side_m / 2.0))
    throw ContractViolation("min_dist_m must lie in [0, side_m/2)");
}

void PowerControlConfig::validate() const {
  if (!(p_max_w > 0.0)) throw ContractViolation("p_max_w must be positive");
  if (!(delta_db >= 0.0)) throw ContractViolation("delta_db must be nonnegative");
}

double path_loss_beta(const CellConfig& cfg, double dist_m) {
  const double d_km = dist_m / 1000.0;
  const double pl_db = cfg.pl_const_db + cfg.pl_slope * std::log10(d_km);
  return std::pow(10.0, -pl_db / 10.0);
}

UserDrop drop_users(const CellConfig& cfg, int K, rng::Stream& rs) {
  if (K < 1) throw ContractViolation("drop_users: K must be at least 1");
  cfg.validate();

  UserDrop drop;
  drop.positions.resize(K, 2);
  drop.beta.resize(K);
  const double half = cfg.side_m / 2.0;
  for (int k = 0; k < K; ++k) {
    double x = 0.0, y = 0.0, dist = 0.0;
    do {
      x = rs.uniform(-half, half);
      y = rs.uniform(-half, half);
      dist = std::hypot(x, y);
    } while (dist < cfg.min_dist_m);
    drop.positions(k, 0) = x;
    drop.positions(k, 1) = y;
    drop.beta(k) = path_loss_beta(cfg, dist);
  }
  return drop;
}

Vec power_control(const Vec& beta, const PowerControlConfig& pc) {
  pc.validate();
  for (Eigen::Index k = 0; k < beta.size(); ++k)
    if (!(beta(k) > 0.0)) throw ContractViolation("beta must be positive");

  const double beta_min = beta.minCoeff();
  const double cap = std::pow(10.0, pc.delta_db / 10.0);
  Vec p(beta.size());
  for (Eigen::Index k = 0; k < beta.size(); ++k)
    p(k) = std::min(pc.p_max_w, pc.p_max_w * beta_min * cap / beta(k));
  return p;
}

Vec average_snr(const Vec& beta, const Vec& p, Eigen::Index M,
                const model::ImpairmentParams& imp) {
  Vec snr(beta.size());
  for (Eigen::Index k = 0; k < beta.size(); ++k)
    snr(k) = p(k) * beta(k) * static_cast<double>(M) * imp.kappa_r *
             imp.kappa_t(k) / imp.sigma2;
  return snr;
}

std::vector<int> snr_order(const Vec& snr) {
  std::vector<int> order(snr.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&snr](int a, int b) { return snr(a) < snr(b); });
  return order;
}

model::ChannelBlock draw_block(const Vec& beta, const Vec& p, Eigen::Index M,
                               const model::ImpairmentParams& imp,
                               rng::Stream& rs) {
  const Eigen::Index K = beta.size();
  CMat G(M, K);
  for (Eigen::Index k = 0; k < K; ++k) G.col(k) = rs.cnormal_vec(M, beta(k));
  return model::make_block(std::move(G), p, imp);
}

}  // namespace obmimo::scenario
