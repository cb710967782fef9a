#pragma once

#include <utility>

#include "obmimo/errors.hpp"
#include "obmimo/rng.hpp"
#include "obmimo/types.hpp"

namespace obmimo::model {

/// Hardware quality coefficients and thermal noise power.
/// kappa = 1 means ideal hardware; smaller kappa means more distortion.
struct ImpairmentParams {
  double kappa_r = 0.98;  // BS receive hardware quality, in (0, 1]
  Vec kappa_t;            // per-user transmit hardware quality, each in (0, 1]
  double sigma2 = 2e-13;  // thermal noise variance (linear, watts)

  void validate() const;

  static ImpairmentParams uniform(int K, double kappa_r, double kappa_t,
                                  double sigma2);
};

/// One coherence block: raw and effective channels plus every matrix derived
/// from them. Immutable after construction; shared read-only across workers.
struct ChannelBlock {
  CMat G;      // raw channel, M x K (column k is user k)
  Vec p;       // transmit powers, length K
  CMat G_eff;  // effective channel, column k = sqrt(kr * kt_k * p_k) * g_k
  CMat Sigma;  // covariance of the effective noise, M x M Hermitian
  Mat H;       // real-stacked effective channel, 2M x 2K
  Mat C;       // covariance of the real-stacked noise, 2M x 2M

  Eigen::Index M() const { return G.rows(); }
  Eigen::Index K() const { return G.cols(); }
};

/// A transmitted QPSK symbol vector in complex and real-stacked form.
struct SymbolFrame {
  CVec s;  // length K, entries in {(+-1 +- j)/sqrt(2)}
  Vec x;   // length 2K, x = [Re s; Im s], entries +-1/sqrt(2)
};

/// One-bit quantizer output in real and complex form.
struct QuantizedObservation {
  Vec r;          // length 2M, entries in {-1, +1}
  CVec r_complex; // length M, entries in {(+-1 +- j)/sqrt(2)}
};

/// Effective-noise covariance: Sigma = kr * sum_k (1 - kt_k) p_k g_k g_k^H + D
/// with D diagonal, D_mm = (1 - kr) * sum_k p_k |g_km|^2 + sigma2.
CMat build_sigma(const CMat& G, const Vec& p, const ImpairmentParams& imp);

/// Real-stacked channel H = [[Re Ge, -Im Ge], [Im Ge, Re Ge]] and noise
/// covariance C = 0.5 * [[Re S, -Im S], [Im S, Re S]].
std::pair<Mat, Mat> real_stack(const CMat& G_eff, const CMat& Sigma);

/// Assembles a ChannelBlock from a raw channel draw.
ChannelBlock make_block(CMat G, Vec p, const ImpairmentParams& imp);

/// One channel use: y = sqrt(kr) * sum_k g_k (sqrt(kt_k p_k) s_k + eta_t_k)
/// + eta_r + n, and its real stacking z = [Re y; Im y].
std::pair<CVec, Vec> transmit(const ChannelBlock& block, const SymbolFrame& frame,
                              const ImpairmentParams& imp, rng::Stream& rs);

/// Elementwise sign of z with sgn(0) = +1, plus the complex form
/// r_complex = (1/sqrt(2)) (sgn(Re y) + j sgn(Im y)).
QuantizedObservation quantize_one_bit(const Vec& z);

/// Uniformly random QPSK frame.
SymbolFrame random_frame(Eigen::Index K, rng::Stream& rs);

/// Frame from a real-stacked sign pattern (used by slicers).
SymbolFrame frame_from_x(const Vec& x);

}  // namespace obmimo::model
