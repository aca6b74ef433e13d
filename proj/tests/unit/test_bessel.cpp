#include "oracles.hpp"

#include "sivae/bessel.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace sivae;

TEST_SUITE("bessel") {
  TEST_CASE("K_nu agrees with a 50-digit reference across both argument regimes") {
    const double orders[] = {0.0, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.7, 5.0, 6.0, 10.5};
    const double args[] = {1e-6, 1e-3, 0.05, 0.3, 1.0, 1.9, 1.99, 2.0, 2.01, 3.5, 10.0, 35.0, 120.0, 600.0};
    for (double nu : orders) {
      for (double x : args) {
        const double ref = testing::bessel_k_reference(nu, x);
        const double got = bessel_k(nu, x);
        INFO("nu=" << nu << " x=" << x << " got=" << got << " ref=" << ref);
        if (ref == 0.0) {
          CHECK(got == 0.0);
        } else {
          CHECK(std::abs(got - ref) / ref < 1e-12);
        }
      }
    }
  }

  TEST_CASE("half-integer orders have closed forms") {
    for (double x : {0.01, 0.5, 2.0, 7.5}) {
      const double k12 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);
      CHECK(bessel_k(0.5, x) == doctest::Approx(k12).epsilon(1e-13));
      CHECK(bessel_k(1.5, x) == doctest::Approx(k12 * (1.0 + 1.0 / x)).epsilon(1e-13));
    }
  }

  TEST_CASE("scaled form avoids underflow") {
    const double x = 800.0;
    CHECK(bessel_k(1.0, x) == 0.0);
    const double scaled = bessel_k_scaled(1.0, x);
    // exp(x) K_1(x) ~ sqrt(pi / 2x) (1 + 3 / 8x)
    CHECK(scaled == doctest::Approx(std::sqrt(std::numbers::pi / (2 * x)) * (1 + 3.0 / (8 * x) - 15.0 / (128 * x * x)))
                        .epsilon(1e-8));
  }

  TEST_CASE("x^nu K_nu(x) tends to 2^(nu-1) Gamma(nu) at the origin") {
    for (double nu : {0.2, 0.5, 1.0, 2.5, 6.0}) {
      const double limit = std::pow(2.0, nu - 1.0) * std::tgamma(nu);
      CHECK(matern_kernel_term(nu, 0.0) == doctest::Approx(limit).epsilon(1e-14));
      const double x = 1e-9;
      CHECK(matern_kernel_term(nu, x) == doctest::Approx(std::pow(x, nu) * testing::bessel_k_reference(nu, x)).epsilon(1e-12));
    }
  }

  TEST_CASE("invalid arguments are rejected") {
    CHECK_THROWS_AS(bessel_k(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k(0.5, -1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k(-0.5, 1.0), std::domain_error);
  }

  TEST_CASE("K_nu is decreasing in x and increasing in nu") {
    double prev = bessel_k(1.3, 0.01);
    for (int i = 1; i < 200; ++i) {
      const double v = bessel_k(1.3, 0.01 + 0.1 * i);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(bessel_k(0.5, 1.0) < bessel_k(1.0, 1.0));
    CHECK(bessel_k(1.0, 1.0) < bessel_k(2.5, 1.0));
  }
}
