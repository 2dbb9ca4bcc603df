#pragma once

#include <Eigen/Dense>
#include <functional>

#include "abpv/common.hpp"

namespace abpv {

/// Radial density profile on [0, 1] with its derivative.
struct RadialProfile {
  std::function<double(double)> f;
  std::function<double(double)> df;
};

/// Sampled radial potential u(r) on the unit ball with derivative values.
struct RadialSolution {
  Eigen::VectorXd r;
  Eigen::VectorXd u;
  Eigen::VectorXd du;

  /// Cubic Hermite interpolation of u'(r) between samples.
  double du_at(double rq) const {
    int n = static_cast<int>(r.size());
    require(rq >= r[0] - 1e-12 && rq <= r[n - 1] + 1e-12, "du_at: query ", rq, " out of range");
    rq = std::clamp(rq, r[0], r[n - 1]);
    int i = std::min(static_cast<int>((rq - r[0]) / (r[1] - r[0])), n - 2);
    double h = r[i + 1] - r[i];
    double t = (rq - r[i]) / h;
    // Derivative slopes from central differences on du.
    auto slope = [&](int k) {
      if (k == 0) return (du[1] - du[0]) / h;
      if (k == n - 1) return (du[n - 1] - du[n - 2]) / h;
      return (du[k + 1] - du[k - 1]) / (2.0 * h);
    };
    double h00 = (1 + 2 * t) * sqr(1 - t), h10 = t * sqr(1 - t);
    double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * du[i] + h * h10 * slope(i) + h01 * du[i + 1] + h * h11 * slope(i + 1);
  }
};

/// High-accuracy oracle for the radial reduction of div(f grad u) = rho on
/// the unit ball of R^n with rho = n f^{n/(n-1)} - |f'|:
///     (r^{n-1} f u')' = r^{n-1} rho.
/// After F = r^n G the auxiliary G satisfies the nonsingular equation
/// G' = (rho - n G)/r with G(0) = rho(0)/n, and u' = r G / f. Classical RK4
/// with a fixed step. For a normalized profile the computed flux satisfies
/// u'(1) = 1 automatically.
inline RadialSolution solve_radial(int n, const RadialProfile& profile, int samples) {
  require(n >= 1, "solve_radial: dimension must be >= 1, got ", n);
  require(samples >= 16, "solve_radial: need at least 16 samples, got ", samples);

  auto rho = [&](double r) {
    double fr = profile.f(r);
    require(fr > 0.0, "solve_radial: profile must stay positive, f(", r, ") = ", fr);
    return n * std::pow(fr, n / (n - 1.0)) - std::abs(profile.df(r));
  };
  const double rho0 = rho(0.0);
  const double drho0 = (rho(1e-5) - rho0) / 1e-5;
  auto g_rate = [&](double r, double g) {
    if (r < 1e-12) return drho0 / (n + 1.0);
    return (rho(r) - n * g) / r;
  };
  auto u_rate = [&](double r, double g) { return r * g / profile.f(r); };

  RadialSolution sol;
  sol.r.resize(samples + 1);
  sol.u.resize(samples + 1);
  sol.du.resize(samples + 1);
  double h = 1.0 / samples;
  double g = rho0 / n, u = 0.0;
  sol.r[0] = 0.0;
  sol.u[0] = 0.0;
  sol.du[0] = 0.0;
  for (int i = 0; i < samples; ++i) {
    double r0 = i * h;
    double k1g = g_rate(r0, g), k1u = u_rate(r0, g);
    double k2g = g_rate(r0 + 0.5 * h, g + 0.5 * h * k1g), k2u = u_rate(r0 + 0.5 * h, g + 0.5 * h * k1g);
    double k3g = g_rate(r0 + 0.5 * h, g + 0.5 * h * k2g), k3u = u_rate(r0 + 0.5 * h, g + 0.5 * h * k2g);
    double k4g = g_rate(r0 + h, g + h * k3g), k4u = u_rate(r0 + h, g + h * k3g);
    g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    double r1 = (i + 1) * h;
    sol.r[i + 1] = r1;
    sol.u[i + 1] = u;
    sol.du[i + 1] = u_rate(r1, g);
  }
  return sol;
}

}  // namespace abpv
