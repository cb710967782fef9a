#pragma once

#include <string>

#include "obmimo/model.hpp"
#include "obmimo/types.hpp"

namespace obmimo::receivers {

enum class Kind { MRC, ZF, MMSE, BMRC, BZF, BMMSE };

const char* kind_name(Kind kind);

/// Receive combining matrix W (K x M); row k is the combiner for user k, the
/// detection statistic being (W r~)_k.
struct CombinerMatrix {
  CMat W;
  Kind kind;
};

/// Bussgang decomposition data for one block: r~ = F y + e with e
/// uncorrelated with y.
struct BussgangData {
  CMat F;     // M x M diagonal, sqrt(2/pi) / sqrt(diag(C_yy))
  CMat C_yy;  // pre-quantization covariance, G~ G~^H + Sigma
  CMat C_rr;  // quantized-signal covariance from the arcsine law
};

/// Builds F and the arcsine-law C_rr. Normalized correlation arguments are
/// clamped to [-1, 1]; overshoot beyond 1e-9 is a contract violation.
BussgangData bussgang(const model::ChannelBlock& block);

/// Builds one of the six linear combiners. ZF/BZF/MMSE/BMMSE use linear
/// solves; a numerically singular system raises SingularMatrixError naming
/// the receiver.
CombinerMatrix make_combiner(const model::ChannelBlock& block, Kind kind);

/// QPSK slicing of the combined quantized signal: per user, the nearest of
/// {(+-1 +- j)/sqrt(2)} to (W r~)_k, which reduces to independent sign
/// decisions on the real and imaginary parts (sgn(0) = +1).
model::SymbolFrame detect_linear(const CombinerMatrix& combiner,
                                 const model::QuantizedObservation& obs);

namespace detail {
/// Test hook: upper clamp used for the arcsine arguments (1.0 in production).
/// Lowering it corrupts the C_rr diagonal, which `validate` must detect.
void set_arcsine_clamp_for_tests(double hi);
double arcsine_clamp();
}  // namespace detail

}  // namespace obmimo::receivers
