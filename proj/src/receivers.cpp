#include "obmimo/receivers.hpp"

#include <cmath>

#include "obmimo/errors.hpp"

namespace obmimo::receivers {

namespace detail {
namespace {
double g_arcsine_clamp_hi = 1.0;
}
void set_arcsine_clamp_for_tests(double hi) { g_arcsine_clamp_hi = hi; }
double arcsine_clamp() { return g_arcsine_clamp_hi; }
}  // namespace detail

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::MRC: return "MRC";
    case Kind::ZF: return "ZF";
    case Kind::MMSE: return "MMSE";
    case Kind::BMRC: return "BMRC";
    case Kind::BZF: return "BZF";
    case Kind::BMMSE: return "BMMSE";
  }
  return "?";
}

namespace {

// Elementwise (2/pi) arcsin with clamping of floating-point overshoot.
Mat arcsine_scaled(const Mat& R) {
  const double hi = detail::arcsine_clamp();
  const double lo = -hi;
  Mat out(R.rows(), R.cols());
  for (Eigen::Index i = 0; i < R.rows(); ++i)
    for (Eigen::Index j = 0; j < R.cols(); ++j) {
      const double v = R(i, j);
      if (std::abs(v) > 1.0 + 1e-9)
        throw ContractViolation("arcsine argument overshoot exceeds 1e-9");
      out(i, j) = (2.0 / M_PI) * std::asin(std::min(hi, std::max(lo, v)));
    }
  return out;
}

}  // namespace

BussgangData bussgang(const model::ChannelBlock& block) {
  BussgangData data;
  data.C_yy = block.G_eff * block.G_eff.adjoint() + block.Sigma;

  const Eigen::Index M = block.M();
  Vec dinv(M);
  for (Eigen::Index m = 0; m < M; ++m) {
    const double d = data.C_yy(m, m).real();
    if (!(d > 0.0))
      throw ContractViolation("bussgang: non-positive diagonal of C_yy");
    dinv(m) = 1.0 / std::sqrt(d);
  }
  data.F = CMat::Zero(M, M);
  const double gain = std::sqrt(2.0 / M_PI);
  for (Eigen::Index m = 0; m < M; ++m) data.F(m, m) = gain * dinv(m);

  const Mat corr_re = dinv.asDiagonal() * data.C_yy.real() * dinv.asDiagonal();
  const Mat corr_im = dinv.asDiagonal() * data.C_yy.imag() * dinv.asDiagonal();
  data.C_rr = arcsine_scaled(corr_re).cast<Complex>() +
              Complex(0.0, 1.0) * arcsine_scaled(corr_im).cast<Complex>();
  return data;
}

CombinerMatrix make_combiner(const model::ChannelBlock& block, Kind kind) {
  const CMat& Ge = block.G_eff;
  CombinerMatrix out;
  out.kind = kind;

  switch (kind) {
    case Kind::MRC:
      out.W = Ge.adjoint();
      break;
    case Kind::ZF: {
      const CMat gram = Ge.adjoint() * Ge;
      Eigen::LLT<CMat> llt(gram);
      if (llt.info() != Eigen::Success) throw SingularMatrixError("ZF Gram matrix");
      out.W = llt.solve(Ge.adjoint());
      break;
    }
    case Kind::MMSE: {
      const CMat C_yy = Ge * Ge.adjoint() + block.Sigma;
      Eigen::LLT<CMat> llt(C_yy);
      if (llt.info() != Eigen::Success) throw SingularMatrixError("MMSE covariance");
      out.W = llt.solve(Ge).adjoint();
      break;
    }
    case Kind::BMRC: {
      const BussgangData bg = bussgang(block);
      out.W = (bg.F * Ge).adjoint();
      break;
    }
    case Kind::BZF: {
      const BussgangData bg = bussgang(block);
      const CMat FG = bg.F * Ge;
      const CMat gram = FG.adjoint() * FG;
      Eigen::LLT<CMat> llt(gram);
      if (llt.info() != Eigen::Success) throw SingularMatrixError("BZF Gram matrix");
      out.W = llt.solve(FG.adjoint());
      break;
    }
    case Kind::BMMSE: {
      const BussgangData bg = bussgang(block);
      // C_rr can be nearly singular at high SNR; a small jitter keeps the
      // factorization stable.
      CMat reg = bg.C_rr;
      reg.diagonal().array() += 1e-12;
      Eigen::LLT<CMat> llt(reg);
      if (llt.info() != Eigen::Success)
        throw SingularMatrixError("BMMSE quantized covariance");
      out.W = llt.solve(bg.F * Ge).adjoint();
      break;
    }
  }
  return out;
}

model::SymbolFrame detect_linear(const CombinerMatrix& combiner,
                                 const model::QuantizedObservation& obs) {
  if (combiner.W.cols() != obs.r_complex.size())
    throw ContractViolation("detect_linear: dimension mismatch");
  const CVec stat = combiner.W * obs.r_complex;
  const Eigen::Index K = stat.size();
  Vec x(2 * K);
  for (Eigen::Index k = 0; k < K; ++k) {
    x(k) = sign_pos(stat(k).real()) * kInvSqrt2;
    x(K + k) = sign_pos(stat(k).imag()) * kInvSqrt2;
  }
  return model::frame_from_x(x);
}

}  // namespace obmimo::receivers
