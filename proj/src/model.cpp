#include "obmimo/model.hpp"

#include <cmath>

namespace obmimo::model {

void ImpairmentParams::validate() const {
  if (!(kappa_r > 0.0 && kappa_r <= 1.0))
    throw ContractViolation("kappa_r must lie in (0, 1]");
  for (Eigen::Index k = 0; k < kappa_t.size(); ++k)
    if (!(kappa_t(k) > 0.0 && kappa_t(k) <= 1.0))
      throw ContractViolation("kappa_t must lie in (0, 1] for every user");
  if (!(sigma2 > 0.0)) throw ContractViolation("sigma2 must be positive");
}

ImpairmentParams ImpairmentParams::uniform(int K, double kappa_r, double kappa_t,
                                           double sigma2) {
  ImpairmentParams imp;
  imp.kappa_r = kappa_r;
  imp.kappa_t = Vec::Constant(K, kappa_t);
  imp.sigma2 = sigma2;
  return imp;
}

namespace {

// Averages a matrix with its conjugate transpose and checks that the
// asymmetry it removed is negligible relative to the matrix scale.
void enforce_hermitian(CMat& S) {
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  const double asym = (S - S.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw ContractViolation("covariance asymmetry exceeds 1e-12");
  S = 0.5 * (S + S.adjoint()).eval();
}

void enforce_symmetric(Mat& S) {
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw ContractViolation("covariance asymmetry exceeds 1e-12");
  S = 0.5 * (S + S.transpose()).eval();
}

}  // namespace

CMat build_sigma(const CMat& G, const Vec& p, const ImpairmentParams& imp) {
  const Eigen::Index M = G.rows();
  const Eigen::Index K = G.cols();
  if (p.size() != K || imp.kappa_t.size() != K)
    throw ContractViolation("build_sigma: dimension mismatch");

  CMat Sigma = CMat::Zero(M, M);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double w = imp.kappa_r * (1.0 - imp.kappa_t(k)) * p(k);
    if (w != 0.0) Sigma.noalias() += w * (G.col(k) * G.col(k).adjoint());
  }
  for (Eigen::Index m = 0; m < M; ++m) {
    double d = imp.sigma2;
    for (Eigen::Index k = 0; k < K; ++k)
      d += (1.0 - imp.kappa_r) * p(k) * std::norm(G(m, k));
    Sigma(m, m) += d;
  }
  enforce_hermitian(Sigma);
  return Sigma;
}

std::pair<Mat, Mat> real_stack(const CMat& G_eff, const CMat& Sigma) {
  const Eigen::Index M = G_eff.rows();
  const Eigen::Index K = G_eff.cols();
  if (Sigma.rows() != M || Sigma.cols() != M)
    throw ContractViolation("real_stack: dimension mismatch");

  Mat H(2 * M, 2 * K);
  H.topLeftCorner(M, K) = G_eff.real();
  H.topRightCorner(M, K) = -G_eff.imag();
  H.bottomLeftCorner(M, K) = G_eff.imag();
  H.bottomRightCorner(M, K) = G_eff.real();

  Mat C(2 * M, 2 * M);
  C.topLeftCorner(M, M) = 0.5 * Sigma.real();
  C.topRightCorner(M, M) = -0.5 * Sigma.imag();
  C.bottomLeftCorner(M, M) = 0.5 * Sigma.imag();
  C.bottomRightCorner(M, M) = 0.5 * Sigma.real();
  enforce_symmetric(C);
  return {std::move(H), std::move(C)};
}

ChannelBlock make_block(CMat G, Vec p, const ImpairmentParams& imp) {
  ChannelBlock block;
  block.G = std::move(G);
  block.p = std::move(p);
  const Eigen::Index K = block.G.cols();
  if (block.p.size() != K || imp.kappa_t.size() != K)
    throw ContractViolation("make_block: dimension mismatch");
  for (Eigen::Index k = 0; k < K; ++k)
    if (!(block.p(k) > 0.0)) throw ContractViolation("powers must be positive");

  block.G_eff.resize(block.G.rows(), K);
  for (Eigen::Index k = 0; k < K; ++k)
    block.G_eff.col(k) =
        std::sqrt(imp.kappa_r * imp.kappa_t(k) * block.p(k)) * block.G.col(k);
  block.Sigma = build_sigma(block.G, block.p, imp);
  std::tie(block.H, block.C) = real_stack(block.G_eff, block.Sigma);
  return block;
}

std::pair<CVec, Vec> transmit(const ChannelBlock& block, const SymbolFrame& frame,
                              const ImpairmentParams& imp, rng::Stream& rs) {
  const Eigen::Index M = block.M();
  const Eigen::Index K = block.K();
  if (frame.s.size() != K) throw ContractViolation("transmit: dimension mismatch");

  CVec y = block.G_eff * frame.s;
  const double sqrt_kr = std::sqrt(imp.kappa_r);
  for (Eigen::Index k = 0; k < K; ++k) {
    const Complex eta_t = rs.cnormal((1.0 - imp.kappa_t(k)) * block.p(k));
    y += sqrt_kr * eta_t * block.G.col(k);
  }
  for (Eigen::Index m = 0; m < M; ++m) {
    double var_r = 0.0;
    for (Eigen::Index k = 0; k < K; ++k)
      var_r += (1.0 - imp.kappa_r) * block.p(k) * std::norm(block.G(m, k));
    y(m) += rs.cnormal(var_r);
  }
  y += rs.cnormal_vec(M, imp.sigma2);

  Vec z(2 * M);
  z.head(M) = y.real();
  z.tail(M) = y.imag();
  return {std::move(y), std::move(z)};
}

QuantizedObservation quantize_one_bit(const Vec& z) {
  const Eigen::Index M2 = z.size();
  const Eigen::Index M = M2 / 2;
  QuantizedObservation obs;
  obs.r.resize(M2);
  for (Eigen::Index m = 0; m < M2; ++m) obs.r(m) = sign_pos(z(m));
  obs.r_complex.resize(M);
  for (Eigen::Index m = 0; m < M; ++m)
    obs.r_complex(m) = Complex(obs.r(m) * kInvSqrt2, obs.r(M + m) * kInvSqrt2);
  return obs;
}

SymbolFrame random_frame(Eigen::Index K, rng::Stream& rs) {
  Vec x(2 * K);
  for (Eigen::Index i = 0; i < 2 * K; ++i)
    x(i) = rs.uniform() < 0.5 ? -kInvSqrt2 : kInvSqrt2;
  return frame_from_x(x);
}

SymbolFrame frame_from_x(const Vec& x) {
  const Eigen::Index K = x.size() / 2;
  SymbolFrame frame;
  frame.x = x;
  frame.s.resize(K);
  for (Eigen::Index k = 0; k < K; ++k) frame.s(k) = Complex(x(k), x(K + k));
  return frame;
}

}  // namespace obmimo::model
