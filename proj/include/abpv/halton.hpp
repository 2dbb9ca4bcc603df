#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "abpv/common.hpp"

namespace abpv {

/// Radical-inverse Halton sequence. Deterministic: the sample stream is a
/// pure function of (dimension, seed). The seed selects the start offset of
/// the subsequence, so concurrent consumers can draw disjoint streams.
class HaltonSequence {
 public:
  explicit HaltonSequence(int dim, std::uint64_t seed = 0)
      : dim_(dim), index_(1 + 64 + seed * 7919ull) {
    require(dim >= 1 && dim <= 12, "HaltonSequence: dim = ", dim, " outside [1, 12]");
  }

  /// Next point in the unit cube [0,1)^dim.
  Eigen::VectorXd next() {
    Eigen::VectorXd p(dim_);
    for (int d = 0; d < dim_; ++d) p[d] = radical_inverse(index_, kPrimes[d]);
    ++index_;
    return p;
  }

  static double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double x = 0.0;
    while (i > 0) {
      x += f * static_cast<double>(i % base);
      i /= base;
      f *= inv;
    }
    return x;
  }

 private:
  static constexpr std::uint64_t kPrimes[12] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  int dim_;
  std::uint64_t index_;
};

/// Quasi-random points in the open unit ball of R^dim, by rejection from the
/// enclosing cube. Deterministic for a fixed seed.
class BallSampler {
 public:
  explicit BallSampler(int dim, std::uint64_t seed = 0) : dim_(dim), halton_(dim, seed) {}

  Eigen::VectorXd next() {
    for (;;) {
      Eigen::VectorXd p = 2.0 * halton_.next() - Eigen::VectorXd::Ones(dim_);
      if (p.squaredNorm() < 1.0) return p;
    }
  }

 private:
  int dim_;
  HaltonSequence halton_;
};

/// Inverse of the standard normal CDF (Acklam's rational approximation with
/// one Halley refinement against erfc, accurate to ~1e-15).
inline double inverse_normal_cdf(double p) {
  require(p > 0.0 && p < 1.0, "inverse_normal_cdf: p = ", p, " outside (0, 1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement; erfc gives the residual of the current estimate.
  double e = 0.5 * std::erfc(-x / M_SQRT2) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

/// Quasi-random points distributed as the unnormalized density
/// exp(-|xi|^2 / 4) on R^dim, i.e. a centered Gaussian with variance 2 per
/// coordinate.
class GaussianSampler {
 public:
  explicit GaussianSampler(int dim, std::uint64_t seed = 0) : dim_(dim), halton_(dim, seed) {}

  Eigen::VectorXd next() {
    Eigen::VectorXd u = halton_.next();
    Eigen::VectorXd p(dim_);
    for (int d = 0; d < dim_; ++d) {
      double q = std::min(std::max(u[d], 1e-15), 1.0 - 1e-15);
      p[d] = std::sqrt(2.0) * inverse_normal_cdf(q);
    }
    return p;
  }

 private:
  int dim_;
  HaltonSequence halton_;
};

}  // namespace abpv
