#pragma once

#include "obmimo/admm.hpp"
#include "obmimo/model.hpp"
#include "obmimo/receivers.hpp"
#include "obmimo/rng.hpp"
#include "obmimo/types.hpp"

namespace obmimo::diag {

/// Independent numerical routes for the closed-form results. Everything here
/// re-derives its target from first principles (direct matrix assembly,
/// generic minimizers, sample statistics) so it can stand as an oracle
/// against the production path.

/// A~ = A diag(r), assembled from the definition.
Mat assemble_a_tilde(const Mat& A, const Vec& r);

/// B~ = (diag(r) - H A~)^T C^-1 (diag(r) - H A~), assembled from the
/// definition with a pivoted LU solve (not the production Cholesky path).
Mat assemble_b_tilde(const model::ChannelBlock& block, const Mat& A, const Vec& r);

/// Direct inverse of (B~/rho + I + A~^T A~) via full-pivot LU.
Mat direct_symbol_inverse(const model::ChannelBlock& block, const Mat& A,
                          const Vec& r, double rho);

/// One randomized mid-iteration ADMM state for update-oracle checks.
struct AdmmProbe {
  Vec t, x, u1, u2;
};
AdmmProbe random_probe(Eigen::Index n2m, Eigen::Index n2k, rng::Stream& rs);

/// Minimizer of the z~ subproblem
///   z~^T B~ z~ + rho ||t - z~ + u1||^2 + rho ||x - A~ z~ + u2||^2
/// by steepest descent with exact line search on the assembled quadratic.
Vec oracle_z_update(const Mat& b_tilde, const Mat& a_tilde, const AdmmProbe& probe,
                    double rho, int max_iters = 20000, double grad_tol = 1e-12);

/// Minimizer of the t subproblem (t >= 0) by per-coordinate golden-section
/// search; the objective is separable.
Vec oracle_t_update(const Vec& z_new, const Vec& u1);

/// Minimizer of the x subproblem (x_k^2 = 1/2) by exhaustive enumeration of
/// all sign patterns.
Vec oracle_x_update(const Vec& az_new, const Vec& u2);

/// Small synthetic block with O(1) scales (unit-variance fading); zero kappa
/// spread keeps it generic. Used by oracle checks where the physical scenario
/// scale is irrelevant.
model::ChannelBlock random_unit_block(Eigen::Index M, Eigen::Index K,
                                      double kappa, double sigma2,
                                      rng::Stream& rs);

/// Monte-Carlo check of build_sigma/transmit: sample covariance of
/// mu = y - G~ s against Sigma. Returns the worst entrywise deviation in
/// standard-error units.
double effective_noise_cov_max_se(const model::ChannelBlock& block,
                                  const model::ImpairmentParams& imp, int draws,
                                  rng::Stream& rs);

/// Monte-Carlo Bussgang statistics with Gaussian signaling, y ~ CN(0, C_yy):
/// worst deviation of Cov(r~) from the arcsine-law C_rr in standard-error
/// units, and the largest |entry| of the sample cross-covariance E[e y^H].
struct BussgangStats {
  double cov_max_se = 0.0;
  double cross_max_abs = 0.0;
};
BussgangStats bussgang_statistics(const model::ChannelBlock& block, int draws,
                                  rng::Stream& rs);

}  // namespace obmimo::diag
