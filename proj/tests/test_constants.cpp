#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "abpv/constants.hpp"
#include "abpv/halton.hpp"

using namespace abpv;

namespace {

// Independent quadrature oracle for the codimension moment integral with
// m = 2, a a unit vector: polar coordinates give 2 * int_0^1 s^n sqrt(1-s^2) ds,
// evaluated after s = sin(t) so the integrand is smooth.
double moment_oracle_m2(int n, int panels = 4096) {
  auto integrand = [n](double t) {
    return 2.0 * std::pow(std::sin(t), n) * sqr(std::cos(t));
  };
  double h = 0.5 * M_PI / panels;
  double acc = 0.0;
  for (int i = 0; i < panels; ++i) {
    double a = i * h;
    acc += h / 6.0 * (integrand(a) + 4.0 * integrand(a + 0.5 * h) + integrand(a + h));
  }
  return acc;
}

}  // namespace

TEST_CASE("ball volume closed forms") {
  CHECK(ball_volume(1) == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(ball_volume(2) == Catch::Approx(M_PI).epsilon(1e-14));
  CHECK(ball_volume(3) == Catch::Approx(4.0 * M_PI / 3.0).epsilon(1e-14));
  CHECK(ball_volume(4) == Catch::Approx(sqr(M_PI) / 2.0).epsilon(1e-14));
  CHECK_THROWS(ball_volume(0));
  CHECK_THROWS(ball_volume(33));
}

TEST_CASE("sphere area closed forms and ball identity") {
  CHECK(sphere_area(1) == Catch::Approx(2.0 * M_PI).epsilon(1e-14));
  CHECK(sphere_area(2) == Catch::Approx(4.0 * M_PI).epsilon(1e-14));
  CHECK(sphere_area(3) == Catch::Approx(2.0 * sqr(M_PI)).epsilon(1e-14));
  for (int n = 2; n <= 32; ++n) {
    CHECK(sphere_area(n - 1) == Catch::Approx(n * ball_volume(n)).epsilon(1e-13));
  }
  // Gamma recurrence: |B^n| = (2 pi / n) |B^{n-2}|.
  for (int n = 3; n <= 32; ++n) {
    CHECK(ball_volume(n) ==
          Catch::Approx(2.0 * M_PI / n * ball_volume(n - 2)).epsilon(1e-13));
  }
}

TEST_CASE("codim moment integral") {
  SECTION("closed-form cases") {
    CHECK(codim_moment_integral(1, 2, 1.0) == Catch::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(codim_moment_integral(2, 1, 1.0) == Catch::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(codim_moment_integral(3, 5, 0.0) == 0.0);
  }
  SECTION("matches the quadrature oracle for m = 2") {
    for (int n = 1; n <= 6; ++n) {
      CHECK(codim_moment_integral(n, 2, 1.0) == Catch::Approx(moment_oracle_m2(n)).epsilon(1e-9));
    }
  }
  SECTION("degree-n homogeneity") {
    for (int n = 1; n <= 5; ++n) {
      for (int m = 1; m <= 4; ++m) {
        for (double t : {0.25, 0.5, 2.0, 3.5}) {
          double lhs = codim_moment_integral(n, m, t * 1.3);
          double rhs = std::pow(t, n) * codim_moment_integral(n, m, 1.3);
          CHECK(lhs == Catch::Approx(rhs).epsilon(1e-13));
        }
      }
    }
  }
  SECTION("agrees with quasi-Monte Carlo within 3 standard errors for n + m <= 8") {
    const int nsamples = 40000;
    for (int m = 1; m <= 7; ++m) {
      for (int n = 1; n + m <= 8; ++n) {
        BallSampler sampler(m, /*seed=*/7);
        // a = first coordinate direction.
        double mean = 0.0, m2 = 0.0;
        for (int i = 0; i < nsamples; ++i) {
          Eigen::VectorXd y = sampler.next();
          double g = std::pow(pos(-y[0]), n);
          double delta = g - mean;
          mean += delta / (i + 1);
          m2 += delta * (g - mean);
        }
        double vol = ball_volume(m);
        double estimate = vol * mean;
        double stderr_est = vol * std::sqrt(m2 / (nsamples - 1.0) / nsamples);
        double exact = codim_moment_integral(n, m, 1.0);
        INFO("n=" << n << " m=" << m << " est=" << estimate << " exact=" << exact
                  << " se=" << stderr_est);
        CHECK(std::abs(estimate - exact) <= 3.0 * stderr_est);
      }
    }
  }
}

TEST_CASE("michael simon constant") {
  CHECK(michael_simon_constant(2, 2) == Catch::Approx(2.0 * std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(michael_simon_constant(1, 2) == Catch::Approx(2.0).epsilon(1e-14));
  for (int n = 1; n <= 14; ++n) {
    CHECK(michael_simon_constant(n, 2) ==
          Catch::Approx(n * std::pow(ball_volume(n), 1.0 / n)).epsilon(1e-13));
  }
  CHECK_THROWS(michael_simon_constant(2, 1));
}

TEST_CASE("slab inequality margin") {
  SECTION("equality cases") {
    for (double s : {0.0, 0.3, 0.9}) {
      CHECK(slab_inequality_margin(s, 1.0, 2) == Catch::Approx(0.0).margin(1e-15));
      CHECK(slab_inequality_margin(s, 1.0, 5) == Catch::Approx(0.0).margin(1e-15));
    }
    CHECK(slab_inequality_margin(0.0, 0.0, 2) == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("nonnegative on a dense sweep") {
    double worst = 1.0;
    for (int m = 2; m <= 8; ++m) {
      for (int i = 0; i < 200; ++i) {
        double s = i / 200.0;
        for (int j = 0; j <= 200; ++j) {
          double sigma = j / 200.0;
          worst = std::min(worst, slab_inequality_margin(s, sigma, m));
        }
      }
    }
    CHECK(worst >= -1e-15);
  }
  CHECK_THROWS(slab_inequality_margin(1.0, 0.5, 2));
  CHECK_THROWS(slab_inequality_margin(0.5, 0.5, 1));
}

TEST_CASE("gaussian mass converges to one") {
  CHECK(gaussian_mass(1, 6) == Catch::Approx(1.0).margin(1e-10));
  CHECK(gaussian_mass(2, 6) == Catch::Approx(1.0).margin(1e-10));
  CHECK(gaussian_mass(5, 4) == Catch::Approx(1.0).margin(1e-8));
  // Level 0 is visibly cruder than level 3: the rule really converges.
  double err0 = std::abs(gaussian_mass(1, 0) - 1.0);
  double err3 = std::abs(gaussian_mass(1, 3) - 1.0);
  CHECK(err3 < err0);
  CHECK(err0 < 1e-3);
}

TEST_CASE("dim pair invariants") {
  CHECK_NOTHROW(DimPair(2, 2));
  CHECK_THROWS(DimPair(0, 2));
  CHECK_THROWS(DimPair(2, -1));
  CHECK_THROWS(DimPair(15, 3));
}

TEST_CASE("halton streams are deterministic and seed-disjoint") {
  HaltonSequence a(3, 5), b(3, 5), c(3, 6);
  bool same = true, differ = false;
  for (int i = 0; i < 64; ++i) {
    Eigen::VectorXd pa = a.next(), pb = b.next(), pc = c.next();
    same = same && (pa == pb);
    differ = differ || (pa != pc);
    for (int d = 0; d < 3; ++d) {
      REQUIRE(pa[d] >= 0.0);
      REQUIRE(pa[d] < 1.0);
    }
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("inverse normal cdf round-trips erfc") {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
    double x = inverse_normal_cdf(p);
    double back = 0.5 * std::erfc(-x / M_SQRT2);
    CHECK(back == Catch::Approx(p).epsilon(1e-12).margin(1e-14));
  }
}
