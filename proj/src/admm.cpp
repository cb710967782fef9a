#include "obmimo/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "obmimo/errors.hpp"

namespace obmimo::admm {

void AdmmConfig::validate() const {
  if (!(rho > 0.0)) throw ContractViolation("rho must be positive");
  if (iterations < 1) throw ContractViolation("iterations must be at least 1");
}

double softplus(double a) {
  const double v = std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a)));
  // exp underflows to 0 near a = -745; keep the image strictly positive.
  return std::max(v, std::numeric_limits<double>::min());
}

Vec ml_unquantized(const model::ChannelBlock& block, const Vec& z) {
  if (z.size() != 2 * block.M())
    throw ContractViolation("ml_unquantized: dimension mismatch");
  Eigen::LLT<Mat> lltC(block.C);
  if (lltC.info() != Eigen::Success)
    throw SingularMatrixError("ml_unquantized noise covariance");
  const Mat CiH = lltC.solve(block.H);
  const Mat normal = block.H.transpose() * CiH;
  Eigen::LLT<Mat> lltN(normal);
  if (lltN.info() != Eigen::Success)
    throw SingularMatrixError("ml_unquantized normal matrix");
  return lltN.solve(CiH.transpose() * z);
}

BlockPrecompute precompute_block(const model::ChannelBlock& block, double rho) {
  if (!(rho > 0.0)) throw ContractViolation("rho must be positive");
  const Mat& H = block.H;
  const Eigen::Index n = H.rows();  // 2M

  Eigen::LLT<Mat> lltC(block.C);
  if (lltC.info() != Eigen::Success)
    throw SingularMatrixError("precompute_block noise covariance");
  const Mat CiH = lltC.solve(H);
  const Mat normal = H.transpose() * CiH;
  Eigen::LLT<Mat> lltN(normal);
  if (lltN.info() != Eigen::Success)
    throw SingularMatrixError("precompute_block normal matrix");

  BlockPrecompute pre;
  pre.rho = rho;
  pre.A = lltN.solve(CiH.transpose());

  Mat resid = Mat::Identity(n, n);
  resid.noalias() -= H * pre.A;
  pre.B = resid.transpose() * lltC.solve(resid);
  pre.B = 0.5 * (pre.B + pre.B.transpose()).eval();

  Mat kernel = pre.B / rho;
  kernel.noalias() += pre.A.transpose() * pre.A;
  kernel.diagonal().array() += 1.0;
  kernel = 0.5 * (kernel + kernel.transpose()).eval();
  Eigen::LLT<Mat> lltK(kernel);
  if (lltK.info() != Eigen::Success)
    throw SingularMatrixError("precompute_block ADMM kernel");
  pre.M0 = lltK.solve(Mat::Identity(n, n));
  pre.M0 = 0.5 * (pre.M0 + pre.M0.transpose()).eval();
  return pre;
}

namespace {

void check_iterate(const AdmmState& st, const AdmmConfig& cfg, int iteration) {
  if (!(st.z_tilde.allFinite() && st.t.allFinite() && st.x.allFinite() &&
        st.u1.allFinite() && st.u2.allFinite()))
    throw DivergenceError("non-finite ADMM iterate", iteration);
  if (cfg.variant == Variant::Hard) {
    if ((st.t.array() < 0.0).any())
      throw ContractViolation("hard t-update produced a negative entry");
    if ((st.x.array().abs() != kInvSqrt2).any())
      throw ContractViolation("hard x-update left {+-1/sqrt(2)}");
  } else {
    if (!(st.t.array() > 0.0).all())
      throw ContractViolation("soft t-update left the softplus range");
    if (!(st.x.array().abs() < kInvSqrt2).all())
      throw ContractViolation("soft x-update left the tanh range");
  }
}

}  // namespace

Vec z_update(const BlockPrecompute& pre, const Vec& r, const Vec& t, const Vec& x,
             const Vec& u1, const Vec& u2) {
  // (B~/rho + I + A~^T A~)^-1 = diag(r) M0 diag(r), so the Eq-form
  // right-hand side t + u1 + A~^T (x + u2) turns into
  // diag(r) M0 [diag(r)(t + u1) + A^T (x + u2)].
  Vec inner = r.cwiseProduct(t + u1);
  inner.noalias() += pre.A.transpose() * (x + u2);
  return r.cwiseProduct(pre.M0 * inner);
}

Vec t_update_hard(const Vec& z_new, const Vec& u1) {
  return (z_new - u1).cwiseMax(0.0);
}

Vec t_update_soft(const Vec& z_new, const Vec& u1) {
  return (z_new - u1).unaryExpr([](double v) { return softplus(v); });
}

Vec x_update_hard(const Vec& az_new, const Vec& u2) {
  return (az_new - u2).unaryExpr([](double v) { return sign_pos(v) * kInvSqrt2; });
}

Vec x_update_soft(const Vec& az_new, const Vec& u2) {
  // tanh rounds to +-1 for |v| above ~19; cap half an ulp inside so the open
  // range (-1/sqrt(2), 1/sqrt(2)) survives in floating point.
  constexpr double kTanhCap = 1.0 - 1.1102230246251565e-16;
  return (az_new - u2).unaryExpr([](double v) {
    return std::clamp(std::tanh(v), -kTanhCap, kTanhCap) * kInvSqrt2;
  });
}

AdmmResult admm_detect(const BlockPrecompute& pre, const Vec& r,
                       const AdmmConfig& cfg, rng::Stream& rs) {
  cfg.validate();
  const Eigen::Index n = pre.M0.rows();   // 2M
  const Eigen::Index m = pre.A.rows();    // 2K
  if (r.size() != n) throw ContractViolation("admm_detect: sign vector size");

  AdmmState st;
  st.u1 = Vec::Zero(n);
  st.u2 = Vec::Zero(m);
  st.t = rs.normal_vec(n).cwiseAbs();
  st.x = rs.normal_vec(m);
  st.z_tilde = Vec::Zero(n);

  AdmmResult result;
  if (cfg.record_trace) result.trace.emplace();

  Vec Az(m);
  for (int it = 0; it < cfg.iterations; ++it) {
    st.z_tilde = z_update(pre, r, st.t, st.x, st.u1, st.u2);
    Az.noalias() = pre.A * r.cwiseProduct(st.z_tilde);

    if (cfg.variant == Variant::Hard) {
      st.t = t_update_hard(st.z_tilde, st.u1);
      st.x = x_update_hard(Az, st.u2);
    } else {
      st.t = t_update_soft(st.z_tilde, st.u1);
      st.x = x_update_soft(Az, st.u2);
    }

    st.u1 += st.t - st.z_tilde;
    st.u2 += st.x - Az;

    if (cfg.check_invariants) check_iterate(st, cfg, it);
    if (result.trace)
      result.trace->emplace_back((st.t - st.z_tilde).norm(), (st.x - Az).norm());
  }

  if (!st.x.allFinite())
    throw DivergenceError("non-finite ADMM result", cfg.iterations - 1);
  result.x_final = std::move(st.x);
  return result;
}

model::SymbolFrame slice_admm(const Vec& x_final) {
  if (!x_final.allFinite())
    throw ContractViolation("slice_admm: non-finite input");
  Vec x(x_final.size());
  for (Eigen::Index i = 0; i < x_final.size(); ++i)
    x(i) = sign_pos(x_final(i)) * kInvSqrt2;
  return model::frame_from_x(x);
}

}  // namespace obmimo::admm
