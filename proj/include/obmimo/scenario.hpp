#pragma once

#include <vector>

#include "obmimo/model.hpp"
#include "obmimo/rng.hpp"
#include "obmimo/types.hpp"

namespace obmimo::scenario {

/// Square cell with the BS at its center; distance-based path loss
/// PL(dB) = pl_const_db + pl_slope * log10(d_km).
struct CellConfig {
  double side_m = 250.0;
  double min_dist_m = 10.0;  // guard radius; the loss formula diverges at d = 0
  double pl_const_db = 130.0;
  double pl_slope = 37.6;

  void validate() const;
};

/// Uplink power control: every user transmits at p_max unless that would put
/// its average SNR more than delta_db above the worst user's.
struct PowerControlConfig {
  double p_max_w = 0.1;
  double delta_db = 15.0;

  void validate() const;
};

/// One user drop: positions, large-scale fading, allocated powers, and the
/// permutation that sorts users by ascending average SNR.
struct UserDrop {
  Mat positions;               // K x 2, meters, BS at the origin
  Vec beta;                    // large-scale fading coefficients (linear)
  Vec p;                       // allocated powers (watts)
  std::vector<int> snr_order;  // snr_order[rank] = original user index
};

/// Large-scale fading from distance: beta = 10^(-PL(dB)/10).
double path_loss_beta(const CellConfig& cfg, double dist_m);

/// Drops K users i.i.d. uniform over the cell, resampling any position closer
/// to the BS than min_dist_m. Fills positions and beta only.
UserDrop drop_users(const CellConfig& cfg, int K, rng::Stream& rs);

/// p_k = min(p_max, p_max * beta_min * 10^(delta/10) / beta_k).
Vec power_control(const Vec& beta, const PowerControlConfig& pc);

/// Per-user average SNR (linear) used for ordering and reporting:
/// p_k * beta_k * M * kappa_r * kappa_t_k / sigma2.
Vec average_snr(const Vec& beta, const Vec& p, Eigen::Index M,
                const model::ImpairmentParams& imp);

/// Ascending-SNR permutation; ties broken by user index.
std::vector<int> snr_order(const Vec& snr);

/// Rayleigh fading draw g_km ~ CN(0, beta_k) and block assembly via `model`.
model::ChannelBlock draw_block(const Vec& beta, const Vec& p, Eigen::Index M,
                               const model::ImpairmentParams& imp,
                               rng::Stream& rs);

}  // namespace obmimo::scenario
