#pragma once

#include <cmath>

#include "abpv/common.hpp"

namespace abpv {

inline constexpr int kMaxDim = 32;

/// Intrinsic dimension / codimension pair for submanifold statements.
struct DimPair {
  int n = 1;  // intrinsic dimension
  int m = 0;  // codimension

  DimPair(int n_, int m_) : n(n_), m(m_) {
    require(n >= 1, "DimPair: intrinsic dimension must be >= 1, got ", n);
    require(m >= 0, "DimPair: codimension must be >= 0, got ", m);
    require(n + m <= 16, "DimPair: n + m = ", n + m, " exceeds supported range 16");
  }
};

/// Volume of the unit ball in R^n. Computed through lgamma so that the
/// result stays accurate up to n = 32 without overflow in Gamma itself.
inline double ball_volume(int n) {
  require(n >= 1 && n <= kMaxDim, "ball_volume: n = ", n, " out of range [1, ", kMaxDim, "]");
  return std::exp(0.5 * n * std::log(M_PI) - std::lgamma(0.5 * n + 1.0));
}

/// Surface area of the unit n-sphere S^n in R^{n+1}.
/// Satisfies sphere_area(n-1) = n * ball_volume(n).
inline double sphere_area(int n) {
  require(n >= 1 && n <= kMaxDim, "sphere_area: n = ", n, " out of range [1, ", kMaxDim, "]");
  return 2.0 * std::exp(0.5 * (n + 1) * std::log(M_PI) - std::lgamma(0.5 * (n + 1)));
}

/// Moment integral over the unit ball of the normal space:
///   integral over {y in R^m, |y| < 1} of (-<a, y>)_+^n dy
///     = (|B^{n+m}| / |S^n|) * |a|^n.
/// Homogeneous of degree n in |a|.
inline double codim_moment_integral(int n, int m, double a_norm) {
  require(n >= 1, "codim_moment_integral: n must be >= 1, got ", n);
  require(m >= 1, "codim_moment_integral: m must be >= 1, got ", m);
  require(n + m <= kMaxDim, "codim_moment_integral: n + m = ", n + m, " exceeds ", kMaxDim);
  require(a_norm >= 0.0, "codim_moment_integral: a_norm must be >= 0, got ", a_norm);
  if (a_norm == 0.0) return 0.0;
  return ball_volume(n + m) / sphere_area(n) * std::pow(a_norm, n);
}

/// Sharp constant n * ((n+m) |B^{n+m}| / (m |B^m|))^{1/n} of the codimension
/// m >= 2 submanifold Sobolev inequality. For m = 2 this collapses to
/// n * |B^n|^{1/n}.
inline double michael_simon_constant(int n, int m) {
  require(n >= 1, "michael_simon_constant: n must be >= 1, got ", n);
  require(m >= 2, "michael_simon_constant: requires codimension m >= 2, got ", m);
  require(n + m <= kMaxDim, "michael_simon_constant: n + m = ", n + m, " exceeds ", kMaxDim);
  double ratio = (n + m) * ball_volume(n + m) / (m * ball_volume(m));
  return n * std::pow(ratio, 1.0 / n);
}

/// Margin of the slab inequality used in the sigma -> 1 limit step:
///   (m/2)(1 - sigma^2) - [ (1 - s^2)^{m/2} - ((sigma^2 - s^2)_+)^{m/2} ].
/// Nonnegative on 0 <= s < 1, 0 <= sigma <= 1, m >= 2.
inline double slab_inequality_margin(double s, double sigma, int m) {
  require(s >= 0.0 && s < 1.0, "slab_inequality_margin: s = ", s, " outside [0, 1)");
  require(sigma >= 0.0 && sigma <= 1.0, "slab_inequality_margin: sigma = ", sigma,
          " outside [0, 1]");
  require(m >= 2, "slab_inequality_margin: m must be >= 2, got ", m);
  double half_m = 0.5 * m;
  double lhs = std::pow(1.0 - s * s, half_m) - std::pow(pos(sigma * sigma - s * s), half_m);
  return half_m * (1.0 - sigma * sigma) - lhs;
}

/// Normalized Gaussian mass (4 pi)^{-k/2} * integral over R^k of
/// exp(-|xi|^2 / 4), evaluated by a truncated tensor-product trapezoid rule.
/// The integrand is separable, so the k-dimensional product sum equals the
/// k-th power of the one-dimensional sum. Converges to 1 as the quadrature
/// level grows.
inline double gaussian_mass(int k, int quadrature_level) {
  require(k >= 1, "gaussian_mass: k must be >= 1, got ", k);
  require(quadrature_level >= 0, "gaussian_mass: level must be >= 0, got ", quadrature_level);
  // After xi = 2x the 1D factor is pi^{-1/2} * integral exp(-x^2) dx.
  double h = 1.0 / (1.0 + quadrature_level);
  double half_width = 5.0 + quadrature_level;
  int jmax = static_cast<int>(std::ceil(half_width / h));
  KahanSum s;
  s.add(1.0);  // j = 0 term
  for (int j = 1; j <= jmax; ++j) {
    s.add(2.0 * std::exp(-sqr(j * h)));
  }
  double one_dim = h * s.value() / std::sqrt(M_PI);
  return std::pow(one_dim, k);
}

}  // namespace abpv
