#include <gtest/gtest.h>

#include <cmath>

#include "greeks/ad/dual.hpp"
#include "greeks/math/rng.hpp"

using namespace greeks;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswers) {
  auto r = math::philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(r[0], 0x6627e8d5u);
  EXPECT_EQ(r[1], 0xe169c58du);
  EXPECT_EQ(r[2], 0xbc57ac4cu);
  EXPECT_EQ(r[3], 0x9b00dbd8u);

  r = math::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(r[0], 0x408f276du);
  EXPECT_EQ(r[1], 0x41c83b0eu);
  EXPECT_EQ(r[2], 0xa20bc7c6u);
  EXPECT_EQ(r[3], 0x6d5451fdu);

  r = math::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(r[0], 0xd16cfe09u);
  EXPECT_EQ(r[1], 0x94fdccebu);
  EXPECT_EQ(r[2], 0x5001e420u);
  EXPECT_EQ(r[3], 0x24126ea1u);
}

TEST(InverseNormal, KnownQuantiles) {
  EXPECT_EQ(math::inverse_normal_cdf(0.5), 0.0);
  EXPECT_NEAR(math::inverse_normal_cdf(0.975), 1.959963984540054, 1e-14);
  EXPECT_NEAR(math::inverse_normal_cdf(0.025), -1.959963984540054, 1e-14);
  EXPECT_NEAR(math::inverse_normal_cdf(1e-10), -6.361340902404056, 1e-12);
}

TEST(InverseNormal, RoundTrip) {
  for (double p = 1e-6; p < 1.0; p += 0.01237) {
    double x = math::inverse_normal_cdf(p);
    EXPECT_NEAR(ad::norm_cdf(x), p, 4e-16 + 1e-14 * p);
  }
}

TEST(RngStream, ReproducibleAndPositional) {
  math::RngStream a(42, 7), b(42, 7);
  std::vector<double> xs;
  for (int k = 0; k < 10; ++k) {
    xs.push_back(a.normal());
    EXPECT_EQ(xs.back(), b.normal());
  }
  math::RngStream c(42, 7, 5);
  EXPECT_EQ(c.normal(), xs[5]);
  math::RngStream d(42, 7);
  d.skip(3);
  EXPECT_EQ(d.normal(), xs[3]);
  math::RngStream e(42, 8), f(43, 7);
  EXPECT_NE(e.normal(), xs[0]);
  EXPECT_NE(f.normal(), xs[0]);
}

TEST(RngStream, UniformOpenInterval) {
  math::RngStream s(1, 0);
  for (int k = 0; k < 10000; ++k) {
    double u = s.uniform();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(RngStream, NormalMoments) {
  math::RngStream s(3, 1);
  const int n = 200000;
  auto v = math::sample_normal(s, n);
  double m = 0, m2 = 0, m4 = 0;
  for (double x : v) {
    m += x;
    m2 += x * x;
    m4 += x * x * x * x;
  }
  m /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(m, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m4, 3.0, 4.0 * std::sqrt(96.0 / n));
}
