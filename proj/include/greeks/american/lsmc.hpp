#pragma once

// Longstaff-Schwartz for one-dimensional models with Vibrato + AD greeks.
// The exercise policy (regressed continuation values) is held fixed when
// differentiating.  Two kernels are available: the Vibrato step ending at
// each path's exercise time, or the first step with the downstream
// cash flow, under the frozen policy, playing the role of the payoff.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "greeks/math/linalg.hpp"
#include "greeks/vibrato/estimators.hpp"

namespace greeks::american {

using vibrato::EstimatorResult;
using vibrato::Payoff;

// Monomials 1, u, ..., u^degree in u = x / scale.
struct Basis {
  int degree = 2;
  double scale = 1.0;

  int size() const { return degree + 1; }
  void eval(double x, double* out) const;
};

struct LsmcConfig {
  std::uint64_t M = 50000;
  int n = 50;
  std::uint64_t seed = 1;
  int threads = 0;
  vibrato::Antithetic antithetic = vibrato::Antithetic::ThreePoint;
  // Regress on in-the-money paths only (default: all paths).
  bool itm_only = false;
  // Ignore early exercise; the result is then a European estimate.
  bool never_exercise = false;
  enum class GreekKernel { FirstStep, AtExercise };
  GreekKernel kernel = GreekKernel::FirstStep;
  // AtExercise only: draw the kernel normal independently of the increment
  // that decided exercise (stream position n) instead of reusing Z_tau.
  bool fresh_kernel_normal = true;
};

// Continuation-value coefficients for exercise dates k = 1..n-1 (index k).
struct ExercisePolicy {
  std::vector<Eigen::VectorXd> coefficients;
  Basis basis;
  // Log-price state: the basis is evaluated at exp(x).
  bool exp_state = false;
  int rank_deficient_steps = 0;

  double continuation(int k, double x) const;
};

struct LsmcResult {
  EstimatorResult price, delta, gamma;
  ExercisePolicy policy;
  std::vector<int> exercise_step;  // per path
};

// Least-squares fit of targets on the basis at states xs; rows with
// use[p] == 0 are skipped.
math::LeastSquaresResult regress(const Basis& basis, const std::vector<double>& xs, const std::vector<double>& targets,
                                 const std::vector<char>& use);

namespace detail {

template <class M>
void check(const models::Sde<M>& sde, const Payoff& payoff, const LsmcConfig& cfg) {
  if (sde.dim() != 1) throw NotApplicable("LSMC is implemented for one-dimensional models");
  if (payoff.arity() != 1) throw NotApplicable("LSMC needs a one-dimensional payoff");
  if (cfg.M < 1 || cfg.n < 1) throw DomainError("LSMC needs M >= 1 and n >= 1");
}

// Stores x_k, k = 0..n, path-major, from stream (seed, p).
template <class M>
std::vector<double> simulate_states(const models::Sde<M>& sde, const LsmcConfig& cfg) {
  const int n = cfg.n;
  const double h = 1.0 / n;
  const std::vector<double> th = sde.params();
  std::vector<double> xs(cfg.M * (n + 1));
  math::run_paths(cfg.M, 1, cfg.threads, [&] {
    return [&](std::uint64_t p, std::span<double> o) {
      math::RngStream rs(cfg.seed, p);
      double x, z;
      sde.initial_state(th.data(), &x);
      double* row = &xs[p * (n + 1)];
      row[0] = x;
      for (int k = 1; k <= n; ++k) {
        z = rs.normal();
        double xn;
        models::euler_step(sde, th.data(), h, &x, &z, &xn);
        x = xn;
        row[k] = x;
      }
      models::check_state(&x, 1);
      o[0] = 0.0;
      return true;
    };
  });
  return xs;
}

}  // namespace detail

// Backward induction.  Returns the per-path exercise step and fills the
// policy; the price estimate averages the realized discounted cash flows.
template <class M>
LsmcResult lsmc_value(const models::Sde<M>& sde, const Payoff& payoff, const Basis& basis, const LsmcConfig& cfg) {
  detail::check(sde, payoff, cfg);
  vibrato::detail::Stopwatch sw;
  const int n = cfg.n;
  const std::uint64_t Mp = cfg.M;
  const std::vector<double> th = sde.params();
  const double step_disc = std::exp(-sde.rate(th.data()) * sde.maturity / n);

  const std::vector<double> xs = detail::simulate_states(sde, cfg);
  auto xk = [&](std::uint64_t p, int k) { return xs[p * (n + 1) + k]; };

  LsmcResult res;
  res.policy.basis = basis;
  res.policy.exp_state = payoff.exp_state;
  res.policy.coefficients.assign(n, Eigen::VectorXd());
  res.exercise_step.assign(Mp, n);
  std::vector<double> cash(Mp);
  for (std::uint64_t p = 0; p < Mp; ++p) cash[p] = payoff(&xs[p * (n + 1) + n]);

  std::vector<double> state(Mp), price(Mp), target(Mp);
  std::vector<char> use(Mp, 1);
  for (int k = n - 1; k >= 1 && !cfg.never_exercise; --k) {
    for (std::uint64_t p = 0; p < Mp; ++p) {
      state[p] = xk(p, k);
      price[p] = payoff.exp_state ? std::exp(state[p]) : state[p];
      target[p] = cash[p] * std::pow(step_disc, res.exercise_step[p] - k);
      if (cfg.itm_only) use[p] = payoff(&state[p]) > 0.0;
    }
    auto fit = regress(basis, price, target, use);
    if (fit.rank_deficient) ++res.policy.rank_deficient_steps;
    res.policy.coefficients[k] = fit.coefficients;
    for (std::uint64_t p = 0; p < Mp; ++p) {
      const double ex = payoff(&state[p]);
      if (ex > 0.0 && ex >= res.policy.continuation(k, state[p])) {
        cash[p] = ex;
        res.exercise_step[p] = k;
      }
    }
  }
  math::SampleStats st;
  for (std::uint64_t p = 0; p < Mp; ++p) st.add(cash[p] * std::pow(step_disc, res.exercise_step[p]));
  res.price = EstimatorResult::from(st);
  res.price.n = n;
  res.price.wall_time = sw.seconds();
  return res;
}

namespace detail {

// Discounted cash flow of the path continued from x1 at step 1 with the
// path's own later increments, exercising by the frozen policy.
template <class M, class S>
struct Downstream {
  const models::Sde<M>* sde;
  const S* th;
  const Payoff* payoff;
  const ExercisePolicy* policy;
  const double* z;  // z[k] drives step k -> k+1, k = 1..n-1
  int n;
  double step_disc;
  bool never_exercise;

  int arity() const { return 1; }
  S operator()(const S* x1) const {
    const double h = 1.0 / n;
    S x = x1[0];
    double disc = step_disc;
    for (int k = 1; k < n; ++k) {
      if (!never_exercise) {
        const S ex = (*payoff)(&x);
        const double ev = ad::value_of(ex);
        if (ev > 0.0 && ev >= policy->continuation(k, ad::value_of(x))) return disc * ex;
      }
      S xn;
      models::euler_step(*sde, th, h, &x, &z[k], &xn);
      x = xn;
      disc *= step_disc;
    }
    return disc * (*payoff)(&x);
  }
};

}  // namespace detail

// Price, Delta and Gamma in X0.  Delta is a Vibrato kernel and Gamma its
// forward derivative in X0 (a dual number carried along the path).
template <class M>
LsmcResult lsmc_greeks_vad(const models::Sde<M>& sde, const Payoff& payoff, const Basis& basis,
                           const LsmcConfig& cfg) {
  vibrato::detail::Stopwatch sw;
  LsmcResult res = lsmc_value(sde, payoff, basis, cfg);
  const int n = cfg.n;
  const double h = 1.0 / n;
  using D = ad::Dual<double, 1>;
  const int ix = 0;
  const std::vector<D> th = vibrato::detail::seeded<D>(sde.params(), ix);
  const double step_disc = std::exp(-sde.rate(sde.params().data()) * sde.maturity / n);
  const auto req = vibrato::TangentRequest::one(ix);
  const bool first_step = cfg.kernel == LsmcConfig::GreekKernel::FirstStep;

  auto out = math::run_paths(cfg.M, 2, cfg.threads, [&] {
    return [&, zs = std::vector<double>(n + 1)](std::uint64_t p, std::span<double> o) mutable {
      math::RngStream rs(cfg.seed, p);
      vibrato::PathState<D> ps;
      vibrato::init_state(sde, th.data(), req, ps);
      vibrato::LastStep<D> ls;
      D k1, vbar;
      if (first_step) {
        for (int k = 0; k < n; ++k) zs[k] = rs.normal();
        vibrato::compute_last_step(sde, th.data(), h, req, ps, ls);
        detail::Downstream<M, D> down{&sde, th.data(), &payoff, &res.policy, zs.data(), n, step_disc,
                                      cfg.never_exercise};
        if (!vibrato::first_kernels(down, ls, 1, &zs[0], cfg.antithetic, vibrato::LastStepMode::Pathwise, &k1,
                                    vbar))
          return false;
        o[0] = k1.v;
        o[1] = k1.d[0];
        return true;
      }
      const int tau = res.exercise_step[p];
      double z;
      for (int k = 1; k < tau; ++k) {
        z = rs.normal();
        vibrato::advance(sde, th.data(), h, req, &z, ps);
      }
      vibrato::compute_last_step(sde, th.data(), h, req, ps, ls);
      if (cfg.fresh_kernel_normal) {
        math::RngStream extra(cfg.seed, p, static_cast<std::uint64_t>(n));
        z = extra.normal();
      } else {
        z = rs.normal();
      }
      if (!vibrato::first_kernels(payoff, ls, 1, &z, cfg.antithetic, vibrato::LastStepMode::Pathwise, &k1, vbar))
        return false;
      const double disc = std::pow(step_disc, tau);
      o[0] = disc * k1.v;
      o[1] = disc * k1.d[0];
      return true;
    };
  });
  vibrato::VibratoConfig vc;
  vc.M = cfg.M;
  vc.n = n;
  vibrato::detail::check_rejections(out, vc);
  res.delta = vibrato::detail::finish(out.stats[0], out, vc, 0.0);
  res.gamma = vibrato::detail::finish(out.stats[1], out, vc, 0.0);
  res.delta.wall_time = res.gamma.wall_time = sw.seconds();
  return res;
}

}  // namespace greeks::american
