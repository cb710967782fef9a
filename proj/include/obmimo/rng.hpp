#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "obmimo/types.hpp"

namespace obmimo::rng {

/// Purpose tags for deriving independent substreams. Every (setup, use,
/// purpose) tuple gets its own stream, so results do not depend on worker
/// scheduling.
enum Purpose : std::uint64_t {
  kUserDrop = 1,
  kFading = 2,
  kSymbols = 3,
  kNoise = 4,
  kAdmmInit = 5,
};

/// Deterministic random stream keyed by a master seed and an integer path.
///
/// The generator is mt19937_64 (fully specified by the standard) seeded
/// through std::seed_seq, and all variates are produced by explicit
/// transforms (53-bit uniforms, Box-Muller normals) rather than
/// std::*_distribution, so a given (seed, path) reproduces bit-identical
/// values on any conforming platform.
class Stream {
 public:
  Stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (1 + path.size()));
    auto push = [&words](std::uint64_t v) {
      words.push_back(static_cast<std::uint32_t>(v));
      words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(master_seed);
    for (std::uint64_t p : path) push(p);
    std::seed_seq seq(words.begin(), words.end());
    gen_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  Vec normal_vec(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  /// CN(0, var): real and imaginary parts are independent N(0, var/2).
  Complex cnormal(double var) {
    const double s = std::sqrt(var / 2.0);
    const double re = s * normal();
    const double im = s * normal();
    return {re, im};
  }

  CVec cnormal_vec(Eigen::Index n, double var) {
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cnormal(var);
    return v;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace obmimo::rng
