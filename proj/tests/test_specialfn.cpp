#include <cmath>

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <boost/math/special_functions/lambert_w.hpp>
#include <gtest/gtest.h>

#include "sinebeta/error.hpp"
#include "sinebeta/specialfn.hpp"

namespace sf = sinebeta::specialfn;

namespace {

// Boost works in the modulus k on [0, 1); move m < 0 there with the
// imaginary-modulus transformation m -> m / (m - 1).
double boost_k(double m) {
  const double mm = m / (m - 1.0);
  return boost::math::ellint_1(std::sqrt(mm)) / std::sqrt(1.0 - m);
}

double boost_e(double m) {
  const double mm = m / (m - 1.0);
  return boost::math::ellint_2(std::sqrt(mm)) * std::sqrt(1.0 - m);
}

}  // namespace

TEST(SpecialFn, EllipticAgainstBoost) {
  for (int i = 0; i <= 60; ++i) {
    const double m = -std::pow(10.0, -4.0 + 10.0 * i / 60.0);
    // Boost's K drifts to a few 1e-12 as k -> 1; see the mpmath values below.
    EXPECT_NEAR(sf::elliptic_k(m) / boost_k(m), 1.0, 1e-11) << m;
    EXPECT_NEAR(sf::elliptic_e(m) / boost_e(m), 1.0, 1e-12) << m;
  }
  for (double m : {0.1, 0.5, 0.9, 0.999}) {
    EXPECT_NEAR(sf::elliptic_k(m), boost::math::ellint_1(std::sqrt(m)), 1e-13);
    EXPECT_NEAR(sf::elliptic_e(m), boost::math::ellint_2(std::sqrt(m)), 1e-13);
  }
}

// 40-digit values from mpmath.ellipk / ellipe.
TEST(SpecialFn, EllipticReferenceValues) {
  struct Ref {
    double m, k, e;
  };
  for (const Ref& r : {Ref{-1e6, 0.0082940478165906199329, 1000.0043970243485481},
                       Ref{-215443.46900318866, 0.016215382215521694488, 464.16752966498127663},
                       Ref{0.5, 1.8540746773013719184, 1.3506438810476755025}}) {
    EXPECT_NEAR(sf::elliptic_k(r.m) / r.k, 1.0, 1e-15) << r.m;
    EXPECT_NEAR(sf::elliptic_e(r.m) / r.e, 1.0, 1e-15) << r.m;
  }
}

TEST(SpecialFn, EllipticSpecialValues) {
  EXPECT_DOUBLE_EQ(sf::elliptic_k(0.0), sf::kPi / 2);
  EXPECT_DOUBLE_EQ(sf::elliptic_e(0.0), sf::kPi / 2);
  // Legendre's relation at m = 1/2: 2 E K - K^2 = pi / 2.
  const double k = sf::elliptic_k(0.5), e = sf::elliptic_e(0.5);
  EXPECT_NEAR(2 * e * k - k * k, sf::kPi / 2, 1e-14);
}

TEST(SpecialFn, EllipticDomain) {
  EXPECT_THROW(sf::elliptic_k(1.0), sinebeta::Error);
  EXPECT_THROW(sf::elliptic_k(2.0), sinebeta::Error);
  EXPECT_THROW(sf::elliptic_e(std::nan("")), sinebeta::Error);
}

TEST(SpecialFn, KInverseRoundTrip) {
  for (double x : {1e-6, 1e-3, 0.05, 0.4, 1.0, 1.5, 1.57}) {
    const double m = sf::k_inverse(x);
    EXPECT_LE(m, 0.0);
    EXPECT_NEAR(sf::elliptic_k(m) / x, 1.0, 1e-12) << x;
  }
  EXPECT_DOUBLE_EQ(sf::k_inverse(sf::kPi / 2), 0.0);
  EXPECT_THROW(sf::k_inverse(0.0), sinebeta::Error);
  EXPECT_THROW(sf::k_inverse(1.6), sinebeta::Error);
}

TEST(SpecialFn, KInverseAsymptoticApproachesExact) {
  double prev = INFINITY;
  for (double x : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const double gap = std::abs(sf::k_inverse_asymptotic(x) / sf::k_inverse(x) - 1.0);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
}

TEST(SpecialFn, LambertAgainstBoost) {
  for (int i = 0; i <= 80; ++i) {
    const double z = -sf::kInvE * std::pow(10.0, -30.0 * i / 80.0);
    const double w = sf::lambert_w_lower(z);
    EXPECT_LE(w, -1.0);
    EXPECT_NEAR(w, boost::math::lambert_wm1(z), 1e-12 * std::abs(w)) << z;
  }
  EXPECT_DOUBLE_EQ(sf::lambert_w_lower(-sf::kInvE), -1.0);
  EXPECT_THROW(sf::lambert_w_lower(0.0), sinebeta::Error);
  EXPECT_THROW(sf::lambert_w_lower(-0.5), sinebeta::Error);
}

TEST(SpecialFn, NormalCdf) {
  for (double x : {-8.0, -2.0, -0.3, 0.0, 0.7, 3.0}) {
    EXPECT_NEAR(sf::normal_cdf(x), 0.5 * std::erfc(-x / std::sqrt(2.0)), 1e-15);
  }
}

TEST(SpecialFn, BrownianSupBound) {
  EXPECT_GE(sf::brownian_sup_lower_bound(1e-3), 0.0);
  EXPECT_NEAR(sf::brownian_sup_lower_bound(1.0), 2.0 * (2.0 * sf::normal_cdf(0.25) - 1.0), 1e-15);
  EXPECT_LT(sf::brownian_sup_lower_bound(1.0), sf::brownian_sup_lower_bound(2.0));
  const double d = 4.0 * 1.959963984540054;
  EXPECT_NEAR(sf::brownian_sup_lower_bound(d), 2.0 * (2.0 * 0.975 - 1.0), 1e-12);
  EXPECT_THROW(sf::brownian_sup_lower_bound(0.0), sinebeta::Error);
}
