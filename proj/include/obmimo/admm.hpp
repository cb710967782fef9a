#pragma once

#include <optional>
#include <vector>

#include "obmimo/model.hpp"
#include "obmimo/rng.hpp"
#include "obmimo/types.hpp"

namespace obmimo::admm {

enum class Variant { Hard, Soft };

/// How the per-symbol initialization stream is derived. There is a single
/// policy: a fresh substream per (setup, channel use, variant); no
/// warm-starting across symbols.
enum class InitSeedPolicy { PerSymbol };

struct AdmmConfig {
  double rho = 0.2;
  int iterations = 100;
  Variant variant = Variant::Soft;
  InitSeedPolicy init_seed_policy = InitSeedPolicy::PerSymbol;
  bool check_invariants = false;  // per-iteration feasibility/finiteness hooks
  bool record_trace = false;      // primal residual history for diagnostics

  void validate() const;
};

/// Once-per-coherence-block matrices. A is the unquantized ML operator, B the
/// sign-free cost kernel, M0 the single inverse reused for every symbol via
/// the sign-refinement identity
///   (B~/rho + I + A~^T A~)^(-1) = diag(r) M0 diag(r),  A~ = A diag(r).
struct BlockPrecompute {
  Mat A;   // 2K x 2M, (H^T C^-1 H)^-1 H^T C^-1
  Mat B;   // 2M x 2M, (I - H A)^T C^-1 (I - H A)
  Mat M0;  // 2M x 2M, (B/rho + I + A^T A)^-1
  double rho = 0.2;
};

/// Per-symbol ADMM iterate (primal z~, t, x and scaled duals u1, u2).
struct AdmmState {
  Vec z_tilde;
  Vec t;
  Vec x;
  Vec u1;
  Vec u2;
};

struct AdmmResult {
  Vec x_final;  // length 2K; detection is sgn(x_final)
  // Optional per-iteration primal residuals (||t - z~||, ||x - A~ z~||).
  std::optional<std::vector<std::pair<double, double>>> trace;
};

/// Unquantized maximum-likelihood estimate x^ = (H^T C^-1 H)^-1 H^T C^-1 z.
Vec ml_unquantized(const model::ChannelBlock& block, const Vec& z);

/// Builds A, B and M0 for one block. All inversions happen here, once.
BlockPrecompute precompute_block(const model::ChannelBlock& block, double rho);

/// One z~-update: the closed-form minimizer of the augmented-Lagrangian
/// z~ subproblem, evaluated through the sign-refinement identity so only
/// matrix-vector products are needed per symbol.
Vec z_update(const BlockPrecompute& pre, const Vec& r, const Vec& t, const Vec& x,
             const Vec& u1, const Vec& u2);

/// Projection onto t >= 0 and its softplus surrogate.
Vec t_update_hard(const Vec& z_new, const Vec& u1);
Vec t_update_soft(const Vec& z_new, const Vec& u1);

/// Projection onto x_k^2 = 1/2 and its tanh surrogate. az_new = A~ z~.
Vec x_update_hard(const Vec& az_new, const Vec& u2);
Vec x_update_soft(const Vec& az_new, const Vec& u2);

/// Runs `iterations` rounds of the scaled ADMM on the sign vector r.
/// Initialization: u1 = u2 = 0, t = |N(0,1)| draws, x = N(0,1) draws.
AdmmResult admm_detect(const BlockPrecompute& pre, const Vec& r,
                       const AdmmConfig& cfg, rng::Stream& rs);

/// Sign slicing of the final iterate into a QPSK frame (sgn(0) = +1).
model::SymbolFrame slice_admm(const Vec& x_final);

/// Overflow-safe softplus ln(1 + e^a) = max(a, 0) + ln(1 + e^-|a|).
double softplus(double a);

}  // namespace obmimo::admm
