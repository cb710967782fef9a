#include <doctest.h>

#include <cmath>

#include "obmimo/diag.hpp"
#include "obmimo/errors.hpp"
#include "obmimo/receivers.hpp"

using namespace obmimo;
using receivers::Kind;

namespace {

// Block with prescribed G_eff and Sigma, bypassing the physical constructors.
model::ChannelBlock synthetic_block(const CMat& G_eff, const CMat& Sigma) {
  model::ChannelBlock block;
  block.G = G_eff;
  block.G_eff = G_eff;
  block.p = Vec::Ones(G_eff.cols());
  block.Sigma = Sigma;
  std::tie(block.H, block.C) = model::real_stack(G_eff, Sigma);
  return block;
}

}  // namespace

TEST_SUITE_BEGIN("receivers");

TEST_CASE("bussgang with C_yy = I") {
  const auto block = synthetic_block(CMat::Zero(2, 1), CMat::Identity(2, 2));
  const auto bg = receivers::bussgang(block);
  const double gain = std::sqrt(2.0 / M_PI);
  CHECK((bg.F - gain * CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((bg.C_rr - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("bussgang arcsine law at correlation 1/2") {
  CMat Sigma(2, 2);
  Sigma << 1.0, 0.5, 0.5, 1.0;
  const auto bg = receivers::bussgang(synthetic_block(CMat::Zero(2, 1), Sigma));
  // (2/pi) arcsin(1/2) = 1/3.
  CHECK(bg.C_rr(0, 1).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(bg.C_rr(0, 1).imag() == 0.0);
  CHECK(bg.C_rr(0, 0).real() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("C_rr is Hermitian with unit diagonal") {
  rng::Stream rs(23, {1});
  const auto block = diag::random_unit_block(6, 3, 0.95, 0.4, rs);
  const auto bg = receivers::bussgang(block);
  CHECK((bg.C_rr - bg.C_rr.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((bg.C_rr.diagonal().real().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(bg.C_rr.diagonal().imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Monte-Carlo Bussgang statistics at small M") {
  rng::Stream rs(29, {2});
  const auto block = diag::random_unit_block(4, 2, 0.98, 0.5, rs);
  rng::Stream mc(29, {3});
  const auto stats = diag::bussgang_statistics(block, 30000, mc);
  CHECK(stats.cov_max_se < 4.0);  // light version of the acceptance check
  CHECK(stats.cross_max_abs < 0.02);
}

TEST_CASE("MRC combiner is the adjoint effective channel") {
  rng::Stream rs(37, {4});
  const auto block = diag::random_unit_block(5, 2, 0.9, 0.3, rs);
  const auto mrc = receivers::make_combiner(block, Kind::MRC);
  CHECK((mrc.W - block.G_eff.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ZF and BZF invert their effective channels") {
  rng::Stream rs(41, {5});
  const auto block = diag::random_unit_block(8, 3, 0.95, 0.2, rs);
  const auto zf = receivers::make_combiner(block, Kind::ZF);
  const CMat I3 = CMat::Identity(3, 3);
  CHECK((zf.W * block.G_eff - I3).cwiseAbs().maxCoeff() < 1e-8);

  const auto bzf = receivers::make_combiner(block, Kind::BZF);
  const auto bg = receivers::bussgang(block);
  CHECK((bzf.W * bg.F * block.G_eff - I3).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("MMSE with ideal hardware equals the textbook receiver") {
  rng::Stream rs(43, {6});
  const auto imp = model::ImpairmentParams::uniform(2, 1.0, 1.0, 0.3);
  CMat G(6, 2);
  for (int k = 0; k < 2; ++k) G.col(k) = rs.cnormal_vec(6, 1.0);
  const auto block = model::make_block(G, Vec::Ones(2), imp);

  const auto mmse = receivers::make_combiner(block, Kind::MMSE);
  const CMat C_yy = block.G_eff * block.G_eff.adjoint() +
                    0.3 * CMat::Identity(6, 6);
  const CMat W_ref = block.G_eff.adjoint() * Eigen::FullPivLU<CMat>(C_yy).inverse();
  CHECK((mmse.W - W_ref).cwiseAbs().maxCoeff() /
            W_ref.cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("BMMSE with ideal hardware reduces to the unimpaired receiver") {
  rng::Stream rs(47, {7});
  const auto imp = model::ImpairmentParams::uniform(2, 1.0, 1.0, 0.4);
  CMat G(5, 2);
  for (int k = 0; k < 2; ++k) G.col(k) = rs.cnormal_vec(5, 1.0);
  const auto block = model::make_block(G, Vec::Ones(2), imp);

  // Reference from the unimpaired one-bit literature: F and C_rr built from
  // C_yy = G~ G~^H + sigma2 I, W = G~^H F^H C_rr^-1.
  const auto bg = receivers::bussgang(block);
  const CMat C_yy_ref =
      block.G_eff * block.G_eff.adjoint() + 0.4 * CMat::Identity(5, 5);
  CHECK((bg.C_yy - C_yy_ref).cwiseAbs().maxCoeff() < 1e-14);
  CMat reg = bg.C_rr;
  reg.diagonal().array() += 1e-12;
  const CMat W_ref = block.G_eff.adjoint() * bg.F.adjoint() *
                     Eigen::FullPivLU<CMat>(reg).inverse();
  const auto bmmse = receivers::make_combiner(block, Kind::BMMSE);
  CHECK((bmmse.W - W_ref).cwiseAbs().maxCoeff() / W_ref.cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("singular Gram matrix raises a named singularity error") {
  CMat G(4, 2);
  G.col(0) = CVec::Ones(4);
  G.col(1) = CVec::Ones(4);  // exactly dependent columns
  const auto block = synthetic_block(G, CMat::Identity(4, 4));
  CHECK_THROWS_AS(receivers::make_combiner(block, Kind::ZF), SingularMatrixError);
  try {
    receivers::make_combiner(block, Kind::ZF);
  } catch (const SingularMatrixError& e) {
    CHECK(e.where.find("ZF") != std::string::npos);
  }
}

TEST_CASE("detect_linear slices by sign") {
  receivers::CombinerMatrix identity;
  identity.kind = Kind::MRC;
  identity.W = CMat::Identity(1, 1);
  model::QuantizedObservation obs;
  obs.r_complex = CVec::Constant(1, Complex(0.3, -0.7));
  obs.r = Vec::Zero(2);
  const auto frame = receivers::detect_linear(identity, obs);
  CHECK(frame.s(0).real() == doctest::Approx(kInvSqrt2));
  CHECK(frame.s(0).imag() == doctest::Approx(-kInvSqrt2));

  obs.r_complex(0) = Complex(0.0, 0.0);  // boundary: sgn(0) = +1
  const auto zero_frame = receivers::detect_linear(identity, obs);
  CHECK(zero_frame.s(0).real() == doctest::Approx(kInvSqrt2));
  CHECK(zero_frame.s(0).imag() == doctest::Approx(kInvSqrt2));
}

TEST_CASE("sign slicing equals minimum-distance slicing") {
  rng::Stream rs(53, {8});
  const Complex points[4] = {{kInvSqrt2, kInvSqrt2},
                             {kInvSqrt2, -kInvSqrt2},
                             {-kInvSqrt2, kInvSqrt2},
                             {-kInvSqrt2, -kInvSqrt2}};
  receivers::CombinerMatrix identity;
  identity.kind = Kind::MRC;
  identity.W = CMat::Identity(1, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    model::QuantizedObservation obs;
    obs.r_complex = CVec::Constant(1, Complex(rs.normal(), rs.normal()));
    obs.r = Vec::Zero(2);
    const auto sliced = receivers::detect_linear(identity, obs).s(0);
    Complex best = points[0];
    double best_d = std::abs(obs.r_complex(0) - points[0]);
    for (const Complex& c : points) {
      if (std::abs(obs.r_complex(0) - c) < best_d) {
        best_d = std::abs(obs.r_complex(0) - c);
        best = c;
      }
    }
    CHECK(sliced == best);
  }
}

TEST_CASE("arcsine clamp corruption hook shifts the C_rr diagonal") {
  rng::Stream rs(59, {9});
  const auto block = diag::random_unit_block(4, 2, 0.95, 0.4, rs);
  receivers::detail::set_arcsine_clamp_for_tests(0.9);
  const auto bg = receivers::bussgang(block);
  receivers::detail::set_arcsine_clamp_for_tests(1.0);
  CHECK((bg.C_rr.diagonal().real().array() - 1.0).abs().maxCoeff() > 1e-3);
}

TEST_SUITE_END();
