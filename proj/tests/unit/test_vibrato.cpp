#include <gtest/gtest.h>

#include <cmath>

#include "greeks/analytics/black_scholes.hpp"
#include "greeks/errors.hpp"
#include "greeks/models/builtin.hpp"
#include "greeks/vibrato/estimators.hpp"

using namespace greeks;
using namespace greeks::vibrato;

namespace {

auto exact_bs(double x0, double sigma, double r, double t) {
  return models::make_sde(models::LogGbmCorr({x0}, {sigma}, r, math::CorrelationMatrix::identity(1)), t);
}

Payoff log_call(double k) {
  Payoff p = Payoff::call(k);
  p.exp_state = true;
  return p;
}

}  // namespace

TEST(Vibrato, DeltaAndGammaMatchClosedForm) {
  auto sde = exact_bs(100.0, 0.2, 0.05, 1.0);
  VibratoConfig cfg;
  cfg.M = 200000;
  cfg.n = 1;
  auto delta = vibrato_first(sde, log_call(105.0), 0, cfg);
  auto gamma = vibrato_second_vad(sde, log_call(105.0), 0, 0, cfg);
  using analytics::BsGreek;
  EXPECT_NEAR(delta.estimate, analytics::bs_closed_form(100, 105, 0.2, 0.05, 1.0, BsGreek::Delta),
              4 * delta.std_error);
  EXPECT_NEAR(gamma.estimate, analytics::bs_closed_form(100, 105, 0.2, 0.05, 1.0, BsGreek::Gamma),
              4 * gamma.std_error);
  EXPECT_LT(gamma.std_error, 2e-4);
}

TEST(Vibrato, PriceMatchesClosedForm) {
  auto sde = exact_bs(100.0, 0.2, 0.05, 1.0);
  VibratoConfig cfg;
  cfg.M = 100000;
  cfg.n = 1;
  auto p = vibrato_price(sde, log_call(100.0), cfg);
  EXPECT_NEAR(p.estimate, analytics::bs_call_price(100.0, 100.0, 0.2, 0.05, 1.0), 4 * p.std_error);
}

TEST(Vibrato, LikelihoodRatioModeMatchesExplicitWeights) {
  auto sde = models::make_sde(models::Bs1d{100.0, 0.03, 0.25}, 1.0);
  VibratoConfig cfg;
  cfg.n = 12;
  cfg.mode = LastStepMode::LikelihoodRatio;
  for (auto anti : {Antithetic::Off, Antithetic::TwoPoint, Antithetic::ThreePoint}) {
    cfg.antithetic = anti;
    for (auto [i, j] : {std::pair{0, 0}, {0, 2}, {2, 2}, {1, 3}}) {
      for (std::uint64_t p = 0; p < 25; ++p) {
        double e = 0.0, v = 0.0;
        ASSERT_TRUE(vibrato_second_explicit_path(sde, Payoff::call(95.0), i, j, cfg, p, e));
        ASSERT_TRUE(vibrato_second_vad_path(sde, Payoff::call(95.0), i, j, cfg, p, v));
        EXPECT_NEAR(v, e, 1e-9 * (1.0 + std::fabs(e))) << "i=" << i << " j=" << j << " path " << p;
      }
    }
  }
}

TEST(Vibrato, ReverseHessianMatchesForwardKernels) {
  auto sde = models::make_sde(models::Bs1d{90.0, 0.05, 0.2}, 1.0);
  VibratoConfig cfg;
  cfg.M = 4000;
  cfg.n = 10;
  const std::vector<int> params{0, 2, 1, 3};
  auto h = hessian_vrad(sde, Payoff::call(100.0), params, cfg);
  for (int a = 0; a < 4; ++a) {
    auto g = vibrato_first(sde, Payoff::call(100.0), params[a], cfg);
    EXPECT_NEAR(h.gradient[a].estimate, g.estimate, 1e-10 * (1.0 + std::fabs(g.estimate)));
    for (int b = 0; b < 4; ++b) {
      auto f = vibrato_second_vad(sde, Payoff::call(100.0), params[a], params[b], cfg);
      EXPECT_NEAR(h.raw[a][b].estimate, f.estimate, 1e-10 * (1.0 + std::fabs(f.estimate)));
    }
  }
  EXPECT_GT(h.tape_nodes_last_path, 0u);
}

TEST(Vibrato, ReverseHessianTwoFactor) {
  auto sde = models::make_sde(models::Heston{100.0, 0.04, 0.01, 2.0, 0.04, 0.1, -0.5}, 1.0);
  VibratoConfig cfg;
  cfg.M = 2000;
  cfg.n = 8;
  const std::vector<int> params{0, 1};
  auto h = hessian_vrad(sde, Payoff::call(100.0), params, cfg);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      auto f = vibrato_second_vad(sde, Payoff::call(100.0), params[a], params[b], cfg);
      EXPECT_NEAR(h.raw[a][b].estimate, f.estimate, 1e-9 * (1.0 + std::fabs(f.estimate)));
    }
}

TEST(Vibrato, ZeroVolatilityIsSingular) {
  auto sde = models::make_sde(models::Bs1d{100.0, 0.05, 0.0}, 1.0);
  VibratoConfig cfg;
  cfg.M = 1000;
  cfg.n = 5;
  EXPECT_THROW(vibrato_first(sde, Payoff::call(100.0), 0, cfg), SingularDiffusion);
}

TEST(Vibrato, ThirdOrderSpeed) {
  auto sde = exact_bs(100.0, 0.2, 0.05, 1.0);
  VibratoConfig cfg;
  cfg.M = 400000;
  cfg.n = 1;
  auto s = vibrato_third(sde, log_call(100.0), 0, 0, 0, cfg);
  const double ref = analytics::bs_closed_form(100, 100, 0.2, 0.05, 1.0, analytics::BsGreek::Speed);
  EXPECT_NEAR(s.estimate, ref, 4 * s.std_error);
}

TEST(Vibrato, DeterministicAcrossThreads) {
  auto sde = models::make_sde(models::Bs1d{100.0, 0.05, 0.2}, 1.0);
  VibratoConfig cfg;
  cfg.M = 10000;
  cfg.n = 10;
  cfg.threads = 1;
  auto a = vibrato_second_vad(sde, Payoff::call(100.0), 0, 0, cfg);
  cfg.threads = 4;
  auto b = vibrato_second_vad(sde, Payoff::call(100.0), 0, 0, cfg);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.variance, b.variance);
}
