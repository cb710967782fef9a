#pragma once

#include <complex>

#include <Eigen/Dense>

namespace obmimo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// sgn with the sgn(0) = +1 convention used throughout (quantizer and slicers).
inline double sign_pos(double v) { return v >= 0.0 ? 1.0 : -1.0; }

}  // namespace obmimo
