#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "greeks/ad/dual.hpp"
#include "greeks/ad/nonsmooth.hpp"
#include "greeks/math/complex_step.hpp"

using namespace greeks;
using ad::Dual;
using ad::HyperDual;

namespace {

template <class S>
S smooth(const S& x) {
  using std::exp, std::log, std::sin, std::sqrt;
  using ad::exp, ad::log, ad::sin, ad::sqrt;
  return exp(S(0.3) * x) * sin(x) / (S(1.0) + x * x) + log(S(2.0) + x) * sqrt(S(1.5) + x);
}

template <class S>
S two_args(const S& x, const S& y) {
  using std::exp, std::log;
  using ad::exp, ad::log;
  return x * x * y + exp(x * y) / (S(1.0) + y * y) + log(S(3.0) + x - y);
}

}  // namespace

TEST(Dual, MatchesComplexStep) {
  for (double u : {-0.9, -0.2, 0.0, 0.7, 2.3}) {
    auto d = smooth(Dual<double, 1>::variable(u, 0));
    double cs = math::complex_step_derivative([](std::complex<double> z) { return smooth(z); }, u);
    EXPECT_NEAR(d.v, smooth(u), 1e-15);
    EXPECT_NEAR(d.d[0], cs, 1e-8 * (1.0 + std::fabs(cs)));
  }
}

TEST(Dual, NestedGivesSecondDerivative) {
  using DD = Dual<Dual<double, 1>, 1>;
  const double u = 0.4, h = 1e-5;
  DD x(Dual<double, 1>::variable(u, 0));
  x.d[0] = Dual<double, 1>(1.0);
  auto y = smooth(x);
  auto first = [](double t) { return smooth(Dual<double, 1>::variable(t, 0)).d[0]; };
  double fd = (first(u + h) - first(u - h)) / (2 * h);
  EXPECT_NEAR(y.d[0].d[0], fd, 1e-7);
}

TEST(HyperDual, HessianMatchesNestedFd) {
  using H = HyperDual<double, 2>;
  const double x0 = 0.6, y0 = -0.3, h = 1e-5;
  auto r = two_args(H::variable(x0, 0), H::variable(y0, 1));
  auto grad = [](double x, double y) {
    auto g = two_args(Dual<double, 2>::variable(x, 0), Dual<double, 2>::variable(y, 1));
    return g.d;
  };
  auto gx = grad(x0 + h, y0), gxm = grad(x0 - h, y0);
  auto gy = grad(x0, y0 + h), gym = grad(x0, y0 - h);
  EXPECT_NEAR(r.hess(0, 0), (gx[0] - gxm[0]) / (2 * h), 1e-7);
  EXPECT_NEAR(r.hess(0, 1), (gy[0] - gym[0]) / (2 * h), 1e-7);
  EXPECT_NEAR(r.hess(1, 1), (gy[1] - gym[1]) / (2 * h), 1e-7);
  EXPECT_EQ(r.hess(0, 1), r.hess(1, 0));
  auto g = grad(x0, y0);
  EXPECT_NEAR(r.g[0], g[0], 1e-14);
  EXPECT_NEAR(r.g[1], g[1], 1e-14);
}

TEST(Dual, NormCdfDerivative) {
  auto y = ad::norm_cdf(Dual<double, 1>::variable(0.3, 0));
  EXPECT_NEAR(y.d[0], ad::norm_pdf(0.3), 1e-15);
  auto z = ad::norm_cdf(HyperDual<double, 1>::variable(0.3, 0));
  EXPECT_NEAR(z.hess(0, 0), -0.3 * ad::norm_pdf(0.3), 1e-15);
}

TEST(Nonsmooth, DiracIntegratesToOne) {
  for (double a : {0.01, 0.5, 2.0}) {
    ad::DiracParam dp{a, {}};
    const double lim = 12.0 * std::sqrt(a), dx = lim / 20000.0;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double x = -lim; x <= lim; x += dx) {
      s0 += ad::dirac_k(x, 0, dp) * dx;
      s1 += x * ad::dirac_k(x, 0, dp) * dx;
      s2 += x * x * ad::dirac_k(x, 2, dp) * dx;
    }
    EXPECT_NEAR(s0, 1.0, 1e-8);
    EXPECT_NEAR(s1, 0.0, 1e-8);
    // integral of x^2 delta'' = 2
    EXPECT_NEAR(s2, 2.0, 1e-6);
  }
}

TEST(Nonsmooth, DerivativesChainThroughRamp) {
  ad::DiracParam dp{0.25, {}};
  auto r = ad::ramp(HyperDual<double, 1>::variable(0.2, 0), dp);
  EXPECT_EQ(r.v, 0.2);
  EXPECT_EQ(r.g[0], 1.0);
  EXPECT_NEAR(r.hess(0, 0), std::exp(-0.04 / 0.25) / std::sqrt(0.25 * M_PI), 1e-15);
  auto hv = ad::heaviside(Dual<double, 1>::variable(-0.1, 0), dp);
  EXPECT_EQ(hv.v, 0.0);
  EXPECT_GT(hv.d[0], 0.0);
}
