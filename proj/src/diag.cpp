#include "obmimo/diag.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include "obmimo/errors.hpp"

namespace obmimo::diag {

Mat assemble_a_tilde(const Mat& A, const Vec& r) {
  return A * r.asDiagonal();
}

Mat assemble_b_tilde(const model::ChannelBlock& block, const Mat& A, const Vec& r) {
  const Mat a_tilde = assemble_a_tilde(A, r);
  Mat resid = Mat(r.asDiagonal());
  resid.noalias() -= block.H * a_tilde;
  Eigen::FullPivLU<Mat> lu(block.C);
  return resid.transpose() * lu.solve(resid);
}

Mat direct_symbol_inverse(const model::ChannelBlock& block, const Mat& A,
                          const Vec& r, double rho) {
  const Eigen::Index n = block.H.rows();
  const Mat a_tilde = assemble_a_tilde(A, r);
  Mat system = assemble_b_tilde(block, A, r) / rho;
  system += Mat::Identity(n, n);
  system.noalias() += a_tilde.transpose() * a_tilde;
  Eigen::FullPivLU<Mat> lu(system);
  if (!lu.isInvertible()) throw SingularMatrixError("direct_symbol_inverse");
  return lu.inverse();
}

AdmmProbe random_probe(Eigen::Index n2m, Eigen::Index n2k, rng::Stream& rs) {
  AdmmProbe probe;
  probe.t = rs.normal_vec(n2m).cwiseAbs();
  probe.x = rs.normal_vec(n2k);
  probe.u1 = rs.normal_vec(n2m);
  probe.u2 = rs.normal_vec(n2k);
  return probe;
}

Vec oracle_z_update(const Mat& b_tilde, const Mat& a_tilde, const AdmmProbe& probe,
                    double rho, int max_iters, double grad_tol) {
  const Eigen::Index n = b_tilde.rows();
  // f(z) = z^T B~ z + rho||t - z + u1||^2 + rho||x - A~ z + u2||^2
  // grad = 2 B~ z - 2 rho (t - z + u1) - 2 rho A~^T (x - A~ z + u2)
  const Vec c1 = probe.t + probe.u1;
  const Vec c2 = probe.x + probe.u2;
  Vec z = Vec::Zero(n);
  const double scale = std::max(1.0, c1.norm() + c2.norm());
  for (int it = 0; it < max_iters; ++it) {
    Vec grad = 2.0 * (b_tilde * z);
    grad -= 2.0 * rho * (c1 - z);
    grad -= 2.0 * rho * (a_tilde.transpose() * (c2 - a_tilde * z));
    if (grad.norm() <= grad_tol * scale) break;
    // Exact line search for a quadratic: step = g^T g / (g^T Hess g),
    // Hess = 2 (B~ + rho I + rho A~^T A~).
    Vec hess_g = 2.0 * (b_tilde * grad);
    hess_g += 2.0 * rho * grad;
    hess_g.noalias() += 2.0 * rho * (a_tilde.transpose() * (a_tilde * grad));
    const double denom = grad.dot(hess_g);
    if (!(denom > 0.0)) break;
    z -= (grad.squaredNorm() / denom) * grad;
  }
  return z;
}

namespace {

double golden_section_min(double lo, double hi, const std::function<double(double)>& f) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Vec oracle_t_update(const Vec& z_new, const Vec& u1) {
  // Separable: per coordinate minimize (t - (z - u1))^2 over t >= 0.
  Vec t(z_new.size());
  for (Eigen::Index i = 0; i < z_new.size(); ++i) {
    const double target = z_new(i) - u1(i);
    const double hi = std::abs(target) + 1.0;
    t(i) = golden_section_min(0.0, hi,
                              [target](double v) { return (v - target) * (v - target); });
  }
  return t;
}

Vec oracle_x_update(const Vec& az_new, const Vec& u2) {
  const Eigen::Index n = az_new.size();
  if (n > 20) throw ContractViolation("oracle_x_update: enumeration too large");
  const Vec target = az_new - u2;
  double best = std::numeric_limits<double>::infinity();
  Vec best_x = Vec::Zero(n);
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    Vec x(n);
    for (Eigen::Index i = 0; i < n; ++i)
      x(i) = (mask >> i) & 1 ? kInvSqrt2 : -kInvSqrt2;
    const double val = (x - target).squaredNorm();
    if (val < best) {
      best = val;
      best_x = x;
    }
  }
  return best_x;
}

model::ChannelBlock random_unit_block(Eigen::Index M, Eigen::Index K,
                                      double kappa, double sigma2,
                                      rng::Stream& rs) {
  const auto imp = model::ImpairmentParams::uniform(static_cast<int>(K), kappa,
                                                    kappa, sigma2);
  CMat G(M, K);
  for (Eigen::Index k = 0; k < K; ++k) G.col(k) = rs.cnormal_vec(M, 1.0);
  return model::make_block(std::move(G), Vec::Ones(K), imp);
}

double effective_noise_cov_max_se(const model::ChannelBlock& block,
                                  const model::ImpairmentParams& imp, int draws,
                                  rng::Stream& rs) {
  const Eigen::Index M = block.M();
  const Eigen::Index K = block.K();
  model::SymbolFrame frame = model::frame_from_x(Vec::Constant(2 * K, kInvSqrt2));
  const CVec mean = block.G_eff * frame.s;

  // Entrywise running sums of mu_i conj(mu_j) and of the squared deviations
  // of its real/imag parts, for standard errors.
  CMat sum = CMat::Zero(M, M);
  Mat sum_sq_re = Mat::Zero(M, M), sum_sq_im = Mat::Zero(M, M);
  for (int d = 0; d < draws; ++d) {
    const auto [y, z] = model::transmit(block, frame, imp, rs);
    const CVec mu = y - mean;
    for (Eigen::Index i = 0; i < M; ++i)
      for (Eigen::Index j = 0; j < M; ++j) {
        const Complex w = mu(i) * std::conj(mu(j));
        sum(i, j) += w;
        sum_sq_re(i, j) += w.real() * w.real();
        sum_sq_im(i, j) += w.imag() * w.imag();
      }
  }

  double worst = 0.0;
  const double n = static_cast<double>(draws);
  for (Eigen::Index i = 0; i < M; ++i)
    for (Eigen::Index j = 0; j < M; ++j) {
      const Complex mean_ij = sum(i, j) / n;
      const double var_re = sum_sq_re(i, j) / n - mean_ij.real() * mean_ij.real();
      const double var_im = sum_sq_im(i, j) / n - mean_ij.imag() * mean_ij.imag();
      const double se_re = std::sqrt(std::max(var_re, 1e-300) / n);
      const double se_im = std::sqrt(std::max(var_im, 1e-300) / n);
      const Complex expected = block.Sigma(i, j);
      worst = std::max(worst, std::abs(mean_ij.real() - expected.real()) / se_re);
      worst = std::max(worst, std::abs(mean_ij.imag() - expected.imag()) / se_im);
    }
  return worst;
}

BussgangStats bussgang_statistics(const model::ChannelBlock& block, int draws,
                                  rng::Stream& rs) {
  const Eigen::Index M = block.M();
  const receivers::BussgangData bg = receivers::bussgang(block);

  Eigen::LLT<CMat> llt(bg.C_yy);
  if (llt.info() != Eigen::Success)
    throw SingularMatrixError("bussgang_statistics C_yy factor");
  const CMat chol = llt.matrixL();

  CMat sum_rr = CMat::Zero(M, M), sum_ey = CMat::Zero(M, M);
  Mat sum_sq_re = Mat::Zero(M, M), sum_sq_im = Mat::Zero(M, M);
  Vec z(2 * M);
  for (int d = 0; d < draws; ++d) {
    // Gaussian signaling reference: y ~ CN(0, C_yy).
    const CVec y = chol * rs.cnormal_vec(M, 1.0);
    z.head(M) = y.real();
    z.tail(M) = y.imag();
    const model::QuantizedObservation obs = model::quantize_one_bit(z);
    const CVec e = obs.r_complex - bg.F * y;
    for (Eigen::Index i = 0; i < M; ++i)
      for (Eigen::Index j = 0; j < M; ++j) {
        const Complex w = obs.r_complex(i) * std::conj(obs.r_complex(j));
        sum_rr(i, j) += w;
        sum_sq_re(i, j) += w.real() * w.real();
        sum_sq_im(i, j) += w.imag() * w.imag();
        sum_ey(i, j) += e(i) * std::conj(y(j));
      }
  }

  BussgangStats stats;
  const double n = static_cast<double>(draws);
  for (Eigen::Index i = 0; i < M; ++i)
    for (Eigen::Index j = 0; j < M; ++j) {
      const Complex mean_ij = sum_rr(i, j) / n;
      const double var_re = sum_sq_re(i, j) / n - mean_ij.real() * mean_ij.real();
      const double var_im = sum_sq_im(i, j) / n - mean_ij.imag() * mean_ij.imag();
      // Diagonal entries are deterministic (|r~_m|^2 = 1); skip the 0/0.
      const Complex expected = bg.C_rr(i, j);
      if (i != j) {
        const double se_re = std::sqrt(std::max(var_re, 1e-300) / n);
        const double se_im = std::sqrt(std::max(var_im, 1e-300) / n);
        stats.cov_max_se = std::max(
            stats.cov_max_se, std::abs(mean_ij.real() - expected.real()) / se_re);
        stats.cov_max_se = std::max(
            stats.cov_max_se, std::abs(mean_ij.imag() - expected.imag()) / se_im);
      } else if (std::abs(mean_ij.real() - expected.real()) > 1e-12) {
        stats.cov_max_se = std::numeric_limits<double>::infinity();
      }
      stats.cross_max_abs = std::max(stats.cross_max_abs, std::abs(sum_ey(i, j)) / n);
    }
  return stats;
}

}  // namespace obmimo::diag
