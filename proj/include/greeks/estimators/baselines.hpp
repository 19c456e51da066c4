#pragma once

// Comparison estimators: finite differences on common random numbers,
// pathwise and complex-step first derivatives, and the Black-Scholes Gamma
// weights (likelihood ratio, LRPW, Malliavin).

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "greeks/vibrato/engine.hpp"
#include "greeks/vibrato/estimators.hpp"

namespace greeks::estimators {

using vibrato::EstimatorResult;
using vibrato::Payoff;
using vibrato::VibratoConfig;

struct BumpScheme {
  enum class Mode { Central, Forward };
  Mode mode = Mode::Central;
  bool relative = true;
  double bump = 0.01;

  double step(double theta) const;
};

// Fills one discounted sample per path for the parameter vector theta.  The
// same path index must always use the same random numbers.
using PathPricer = std::function<void(const std::vector<double>& theta, std::vector<double>& samples)>;

// Counts pricer calls and caches them by bumped parameter vector.
class BumpedEvaluator {
 public:
  BumpedEvaluator(PathPricer pricer, std::vector<double> theta) : pricer_(std::move(pricer)), theta_(std::move(theta)) {}

  // Samples at theta + sum_k offsets[k].second * e_{offsets[k].first}.
  const std::vector<double>& at(const std::vector<std::pair<int, double>>& offsets);
  int evaluations() const { return evaluations_; }
  const std::vector<double>& theta() const { return theta_; }

 private:
  PathPricer pricer_;
  std::vector<double> theta_;
  std::map<std::vector<double>, std::vector<double>> cache_;
  int evaluations_ = 0;
};

// First derivative (j < 0) or second derivative in (i, j).  Central second
// difference when i == j, four-point cross difference otherwise.
EstimatorResult fd_greek(BumpedEvaluator& ev, int i, int j, const BumpScheme& scheme);
EstimatorResult fd_greek(const PathPricer& pricer, const std::vector<double>& theta, int i, int j,
                         const BumpScheme& scheme, int* evaluations = nullptr);

struct FdHessian {
  std::vector<int> params;
  std::vector<std::vector<EstimatorResult>> entries;
  int evaluations = 0;
  double wall_time = 0.0;
};

FdHessian fd_hessian(const PathPricer& pricer, const std::vector<double>& theta, const std::vector<int>& params,
                     const BumpScheme& scheme);

// Plain Euler Monte Carlo price samples.  Random numbers are consumed exactly
// as in the Vibrato engine with MZ = 1.
template <class M, class S>
S euler_price_path(const models::Sde<M>& sde, const Payoff& payoff, const S* th, int n, math::RngStream& rs) {
  vibrato::TangentRequest req;
  vibrato::LastStep<S> ls;
  vibrato::simulate_to_last_step(sde, th, n, req, rs, ls);
  const int d = sde.dim();
  std::array<double, models::kMaxDim> z;
  for (int a = 0; a < d; ++a) z[a] = rs.normal();
  models::Vec<S> x;
  for (int a = 0; a < d; ++a) {
    S noise(0.0);
    for (int c = 0; c <= a; ++c) noise += ls.sig[models::at(a, c)] * z[c];
    x[a] = ls.mu[a] + noise;
  }
  return sde.discount(th) * payoff(x.data());
}

template <class M>
PathPricer euler_pricer(const models::Sde<M>& sde, const Payoff& payoff, const VibratoConfig& cfg) {
  return [sde, payoff, cfg](const std::vector<double>& th, std::vector<double>& out) {
    out.assign(cfg.M, 0.0);
    math::run_paths(cfg.M, 1, cfg.threads, [&] {
      return [&](std::uint64_t p, std::span<double> o) {
        math::RngStream rs(cfg.seed, p);
        out[p] = euler_price_path(sde, payoff, th.data(), cfg.n, rs);
        o[0] = out[p];
        return true;
      };
    });
  };
}

template <class M>
EstimatorResult mc_price(const models::Sde<M>& sde, const Payoff& payoff, const VibratoConfig& cfg) {
  vibrato::detail::Stopwatch sw;
  const std::vector<double> th = sde.params();
  auto out = math::run_paths(cfg.M, 1, cfg.threads, [&] {
    return [&](std::uint64_t p, std::span<double> o) {
      math::RngStream rs(cfg.seed, p);
      o[0] = euler_price_path(sde, payoff, th.data(), cfg.n, rs);
      return true;
    };
  });
  auto r = vibrato::detail::finish(out.stats[0], out, cfg, sw.seconds());
  r.MZ = 1;
  return r;
}

// Pathwise derivative: forward AD through the whole Euler path.  The call
// payoff is differentiated a.e.; digital payoffs are refused.
template <class M>
EstimatorResult pathwise_first(const models::Sde<M>& sde, const Payoff& payoff, int i, const VibratoConfig& cfg) {
  if (payoff.is_digital()) throw NotApplicable("pathwise derivative of a digital payoff is zero almost surely");
  vibrato::detail::Stopwatch sw;
  using D = ad::Dual<double, 1>;
  const std::vector<D> th = vibrato::detail::seeded<D>(sde.params(), i);
  auto out = math::run_paths(cfg.M, 1, cfg.threads, [&] {
    return [&](std::uint64_t p, std::span<double> o) {
      math::RngStream rs(cfg.seed, p);
      o[0] = euler_price_path(sde, payoff, th.data(), cfg.n, rs).d[0];
      return true;
    };
  });
  auto r = vibrato::detail::finish(out.stats[0], out, cfg, sw.seconds());
  r.MZ = 1;
  return r;
}

template <class M>
EstimatorResult pathwise_delta(const models::Sde<M>& sde, const Payoff& payoff, const VibratoConfig& cfg) {
  return pathwise_first(sde, payoff, 0, cfg);
}

// Second derivative by hyper-dual AD through the whole path.  Only meaningful
// when the payoff's distributional derivatives are smoothed (ramp/heaviside
// with a Dirac bandwidth), which is what it is meant to exercise.
template <class M>
EstimatorResult pathwise_second(const models::Sde<M>& sde, const Payoff& payoff, int i, int j,
                                const VibratoConfig& cfg) {
  vibrato::detail::Stopwatch sw;
  using H = ad::HyperDual<double, 2>;
  const std::vector<double> t0 = sde.params();
  std::vector<H> th(t0.begin(), t0.end());
  th[i].g[0] = 1.0;
  th[j].g[1] = 1.0;
  auto out = math::run_paths(cfg.M, 1, cfg.threads, [&] {
    return [&](std::uint64_t p, std::span<double> o) {
      math::RngStream rs(cfg.seed, p);
      o[0] = euler_price_path(sde, payoff, th.data(), cfg.n, rs).hess(0, 1);
      return true;
    };
  });
  auto r = vibrato::detail::finish(out.stats[0], out, cfg, sw.seconds());
  r.MZ = 1;
  return r;
}

// Complex step through the Euler path: Im f(theta + i du e_i) / du.
template <class M>
EstimatorResult complex_step_first(const models::Sde<M>& sde, const Payoff& payoff, int i, const VibratoConfig& cfg,
                                   double du = 1e-20) {
  if (payoff.is_digital()) throw NotApplicable("complex step of a digital payoff is zero almost surely");
  vibrato::detail::Stopwatch sw;
  using C = std::complex<double>;
  const std::vector<double> t0 = sde.params();
  std::vector<C> th(t0.begin(), t0.end());
  th[i] += C(0.0, du);
  auto out = math::run_paths(cfg.M, 1, cfg.threads, [&] {
    return [&](std::uint64_t p, std::span<double> o) {
      math::RngStream rs(cfg.seed, p);
      o[0] = euler_price_path(sde, payoff, th.data(), cfg.n, rs).imag() / du;
      return true;
    };
  });
  auto r = vibrato::detail::finish(out.stats[0], out, cfg, sw.seconds());
  r.MZ = 1;
  return r;
}

// ---------------------------------------------------------------------------
// Black-Scholes Gamma of a call with exact one-step lognormal sampling.
// Path p uses the first normal of stream (seed, p) as Z and W_T = sqrt(T) Z,
// the same number the one-step Vibrato engine uses for its last step.

struct BsCase {
  double x0, k, sigma, r, t;
};

struct GammaRun {
  std::uint64_t M = 100000;
  std::uint64_t seed = 1;
  int threads = 0;
};

EstimatorResult lrm_gamma_bs(const BsCase& c, const GammaRun& run);
EstimatorResult lrpw_gamma_bs(const BsCase& c, const GammaRun& run);
EstimatorResult malliavin_gamma_bs(const BsCase& c, const GammaRun& run);
// Central second difference on exact samples with absolute bump h.
EstimatorResult fd_gamma_bs(const BsCase& c, const GammaRun& run, double h);
// Vibrato + AD Gamma with a single Euler step, three-point bracket.
EstimatorResult vad_gamma_bs(const BsCase& c, const GammaRun& run);
// Sample mean of the likelihood-ratio Gamma weight alone (should be ~0).
EstimatorResult lrm_weight_mean(const BsCase& c, const GammaRun& run);

enum class GammaMethod { Vad, Fd, Lrpw, Malliavin, Lrm };
const char* to_string(GammaMethod m);

struct VarianceRow {
  double t = 0.0;
  std::vector<EstimatorResult> results;  // in the order of `methods`
};

// Per-maturity Gamma estimates on common samples.  The FD bump is
// x0 * sigma * sqrt(T), i.e. one standard deviation of the terminal law.
std::vector<VarianceRow> variance_table(const std::vector<double>& maturities, const std::vector<GammaMethod>& methods,
                                        BsCase base, const GammaRun& run);

}  // namespace greeks::estimators
