#pragma once

#include <array>
#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "greeks/ad/tape.hpp"
#include "greeks/vibrato/engine.hpp"

namespace greeks::vibrato {

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

inline void check_config(const VibratoConfig& cfg) {
  if (cfg.M < 1 || cfg.MZ < 1 || cfg.n < 1) throw DomainError("VibratoConfig needs M, MZ, n >= 1");
}

inline void check_rejections(const math::PathRunOutput& out, const VibratoConfig& cfg) {
  if (static_cast<double>(out.rejected) > cfg.max_rejected_fraction * static_cast<double>(cfg.M))
    throw SingularDiffusion("last-step covariance singular on " + std::to_string(out.rejected) + " of " +
                            std::to_string(cfg.M) + " paths");
}

inline EstimatorResult finish(const math::SampleStats& s, const math::PathRunOutput& out,
                              const VibratoConfig& cfg, double secs) {
  EstimatorResult r = EstimatorResult::from(s);
  r.MZ = cfg.MZ;
  r.n = cfg.n;
  r.rejected = out.rejected;
  r.wall_time = secs;
  return r;
}

template <class S>
std::vector<S> seeded(const std::vector<double>& th, int j) {
  std::vector<S> t(th.begin(), th.end());
  if (j >= 0) t[j] = S::variable(th[j], 0);
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Per-path contributions.  Each returns false for a rejected path.

template <class M>
bool vibrato_first_path(const Sde<M>& sde, const Payoff& payoff, int i, const VibratoConfig& cfg,
                        std::uint64_t path, double& out) {
  const std::vector<double> th = sde.params();
  math::RngStream rs(cfg.seed, path);
  const auto req = TangentRequest::one(i);
  LastStep<double> ls;
  simulate_to_last_step(sde, th.data(), cfg.n, req, rs, ls);
  const auto dt = discount_terms(sde, th.data(), i);
  std::array<double, kMaxDim> z;
  double acc = 0.0;
  for (int r = 0; r < cfg.MZ; ++r) {
    for (int a = 0; a < sde.dim(); ++a) z[a] = rs.normal();
    double k1, vbar;
    if (!first_kernels(payoff, ls, 1, z.data(), cfg.antithetic, cfg.mode, &k1, vbar)) return false;
    acc += dt.d * k1 + dt.di * vbar;
  }
  out = acc / cfg.MZ;
  return true;
}

template <class M>
bool vibrato_second_explicit_path(const Sde<M>& sde, const Payoff& payoff, int i, int j, const VibratoConfig& cfg,
                                  std::uint64_t path, double& out) {
  const std::vector<double> th = sde.params();
  math::RngStream rs(cfg.seed, path);
  const auto req = TangentRequest::two(i, j, true);
  LastStep<double> ls;
  simulate_to_last_step(sde, th.data(), cfg.n, req, rs, ls);
  const auto dt = discount_terms(sde, th.data(), i, j);
  std::array<double, kMaxDim> z;
  double acc = 0.0;
  for (int r = 0; r < cfg.MZ; ++r) {
    for (int a = 0; a < sde.dim(); ++a) z[a] = rs.normal();
    SecondKernels<double> k;
    if (!second_kernel(payoff, ls, 0, 0, 1, z.data(), cfg.antithetic, cfg.mode, k)) return false;
    acc += dt.d * k.k2 + dt.di * k.k1b + dt.dj * k.k1a + dt.dij * k.vbar;
  }
  out = acc / cfg.MZ;
  return true;
}

// AD over the first-order kernel: theta_j is the single dual direction.
template <class M>
bool vibrato_second_vad_path(const Sde<M>& sde, const Payoff& payoff, int i, int j, const VibratoConfig& cfg,
                             std::uint64_t path, double& out) {
  using D = ad::Dual<double, 1>;
  const std::vector<D> th = detail::seeded<D>(sde.params(), j);
  math::RngStream rs(cfg.seed, path);
  const auto req = TangentRequest::one(i);
  LastStep<D> ls;
  simulate_to_last_step(sde, th.data(), cfg.n, req, rs, ls);
  const auto dt = discount_terms(sde, th.data(), i);
  std::array<double, kMaxDim> z;
  double acc = 0.0;
  for (int r = 0; r < cfg.MZ; ++r) {
    for (int a = 0; a < sde.dim(); ++a) z[a] = rs.normal();
    D k1, vbar;
    if (!first_kernels(payoff, ls, 1, z.data(), cfg.antithetic, cfg.mode, &k1, vbar)) return false;
    acc += (dt.d * k1 + dt.di * vbar).d[0];
  }
  out = acc / cfg.MZ;
  return true;
}

// AD over the explicit second-order kernel: theta_k is the dual direction.
template <class M>
bool vibrato_third_path(const Sde<M>& sde, const Payoff& payoff, int i, int j, int k, const VibratoConfig& cfg,
                        std::uint64_t path, double& out) {
  using D = ad::Dual<double, 1>;
  const std::vector<D> th = detail::seeded<D>(sde.params(), k);
  math::RngStream rs(cfg.seed, path);
  const auto req = TangentRequest::two(i, j, true);
  LastStep<D> ls;
  simulate_to_last_step(sde, th.data(), cfg.n, req, rs, ls);
  const auto dt = discount_terms(sde, th.data(), i, j);
  std::array<double, kMaxDim> z;
  double acc = 0.0;
  for (int r = 0; r < cfg.MZ; ++r) {
    for (int a = 0; a < sde.dim(); ++a) z[a] = rs.normal();
    SecondKernels<D> kk;
    if (!second_kernel(payoff, ls, 0, 0, 1, z.data(), cfg.antithetic, cfg.mode, kk)) return false;
    acc += (dt.d * kk.k2 + dt.di * kk.k1b + dt.dj * kk.k1a + dt.dij * kk.vbar).d[0];
  }
  out = acc / cfg.MZ;
  return true;
}

// ---------------------------------------------------------------------------
// Estimators.

namespace detail {

template <class PathFn>
EstimatorResult run_scalar(const VibratoConfig& cfg, PathFn fn) {
  check_config(cfg);
  Stopwatch sw;
  auto out = math::run_paths(cfg.M, 1, cfg.threads, [&] {
    return [&](std::uint64_t p, std::span<double> o) { return fn(p, o[0]); };
  });
  check_rejections(out, cfg);
  return finish(out.stats[0], out, cfg, sw.seconds());
}

}  // namespace detail

template <class M>
EstimatorResult vibrato_first(const Sde<M>& sde, const Payoff& payoff, int i, const VibratoConfig& cfg) {
  return detail::run_scalar(
      cfg, [&](std::uint64_t p, double& o) { return vibrato_first_path(sde, payoff, i, cfg, p, o); });
}

template <class M>
EstimatorResult vibrato_second_explicit(const Sde<M>& sde, const Payoff& payoff, int i, int j,
                                        const VibratoConfig& cfg) {
  return detail::run_scalar(cfg, [&](std::uint64_t p, double& o) {
    return vibrato_second_explicit_path(sde, payoff, i, j, cfg, p, o);
  });
}

template <class M>
EstimatorResult vibrato_second_vad(const Sde<M>& sde, const Payoff& payoff, int i, int j, const VibratoConfig& cfg) {
  return detail::run_scalar(
      cfg, [&](std::uint64_t p, double& o) { return vibrato_second_vad_path(sde, payoff, i, j, cfg, p, o); });
}

template <class M>
EstimatorResult vibrato_third(const Sde<M>& sde, const Payoff& payoff, int i, int j, int k,
                              const VibratoConfig& cfg) {
  return detail::run_scalar(
      cfg, [&](std::uint64_t p, double& o) { return vibrato_third_path(sde, payoff, i, j, k, cfg, p, o); });
}

// Undiscounted-then-discounted price estimate sharing the Vibrato last step.
template <class M>
EstimatorResult vibrato_price(const Sde<M>& sde, const Payoff& payoff, const VibratoConfig& cfg) {
  return detail::run_scalar(cfg, [&](std::uint64_t p, double& o) {
    const std::vector<double> th = sde.params();
    math::RngStream rs(cfg.seed, p);
    TangentRequest req;
    LastStep<double> ls;
    simulate_to_last_step(sde, th.data(), cfg.n, req, rs, ls);
    std::array<double, kMaxDim> z;
    double acc = 0.0;
    for (int r = 0; r < cfg.MZ; ++r) {
      for (int a = 0; a < sde.dim(); ++a) z[a] = rs.normal();
      double vbar;
      if (!first_kernels(payoff, ls, 0, z.data(), cfg.antithetic, cfg.mode, static_cast<double*>(nullptr), vbar)) return false;
      acc += vbar;
    }
    o = sde.discount(th.data()) * acc / cfg.MZ;
    return true;
  });
}

struct HessianResult {
  std::vector<int> params;
  std::array<std::array<EstimatorResult, kMaxActive>, kMaxActive> hessian;  // symmetrized
  std::array<std::array<EstimatorResult, kMaxActive>, kMaxActive> raw;      // d/dtheta_b of kernel a
  std::array<EstimatorResult, kMaxActive> gradient;
  // max over a<b of |raw_ab - raw_ba| / combined std error
  double max_asymmetry_z = 0.0;
  double wall_time = 0.0;
  std::uint64_t tape_nodes_last_path = 0;
};

namespace detail {

// Reverse sweep for one path.  Steps 1..n-1 are not taped: each step's local
// Jacobian (new state and tangents against old state, old tangent and the
// active parameters) is preaccumulated with an N-direction dual number and
// stored.  The last step and the kernels go on the tape.  The adjoints of
// the tape inputs are then pulled back through the stored step Jacobians.
// Direction layout: [x (d) | y (d) | active theta (np)].
template <int N>
struct VradWorker {
  using D = ad::Dual<double, N>;
  ad::Tape tape;
  std::vector<double> jac;  // per step: (d + np d) rows of N
  std::vector<double> lam, lam_next;

  template <class M>
  bool run(const Sde<M>& sde, const Payoff& payoff, const std::vector<int>& params, const VibratoConfig& cfg,
           std::uint64_t path, std::span<double> o, std::uint64_t& nodes) {
    const int d = sde.dim();
    const int np = static_cast<int>(params.size());
    const int rows = d + np * d;
    const double h = 1.0 / cfg.n;
    const std::vector<double> th0 = sde.params();
    std::vector<D> thd(th0.begin(), th0.end());
    for (int b = 0; b < np; ++b) thd[params[b]] = D::variable(th0[params[b]], 2 * d + b);

    math::RngStream rs(cfg.seed, path);
    PathState<double> ps;
    TangentRequest req;
    req.nfirst = np;
    for (int a = 0; a < np; ++a) req.first[a] = params[a];
    init_state(sde, th0.data(), req, ps);
    const int steps = cfg.n - 1;
    jac.resize(static_cast<std::size_t>(steps) * rows * N);
    std::array<double, kMaxDim> z;
    Vec<D> xs, xn, ys, yn;
    for (int k = 0; k < steps; ++k) {
      for (int a = 0; a < d; ++a) z[a] = rs.normal();
      double* J = &jac[static_cast<std::size_t>(k) * rows * N];
      for (int a = 0; a < d; ++a) xs[a] = D::variable(ps.x[a], a);
      models::euler_step(sde, thd.data(), h, xs.data(), z.data(), xn.data());
      for (int a = 0; a < d; ++a)
        for (int c = 0; c < N; ++c) J[a * N + c] = xn[a].d[c];
      for (int t = 0; t < np; ++t) {
        for (int a = 0; a < d; ++a) ys[a] = D::variable(ps.y[t][a], d + a);
        models::tangent_step(sde, thd.data(), h, xs.data(), params[t], ys.data(), z.data(), yn.data());
        for (int a = 0; a < d; ++a) {
          double* row = &J[(d + t * d + a) * N];
          for (int c = 0; c < N; ++c) row[c] = yn[a].d[c];
          ps.y[t][a] = yn[a].v;
        }
      }
      for (int a = 0; a < d; ++a) ps.x[a] = xn[a].v;
    }
    models::check_state(ps.x.data(), d);

    // Last step and kernels on the tape.
    using ad::Var;
    ad::Tape& tp = tape;
    tp.clear();
    std::array<int, kMaxDim * (1 + kMaxActive) + kMaxActive> in{};
    PathState<Var> pv;
    for (int a = 0; a < d; ++a) {
      pv.x[a] = Var::input(tp, ps.x[a]);
      in[a] = pv.x[a].idx;
    }
    for (int t = 0; t < np; ++t)
      for (int a = 0; a < d; ++a) {
        pv.y[t][a] = Var::input(tp, ps.y[t][a]);
        in[d + t * d + a] = pv.y[t][a].idx;
      }
    std::vector<Var> th(th0.begin(), th0.end());
    for (int b = 0; b < np; ++b) {
      th[params[b]] = Var::input(tp, th0[params[b]]);
      in[rows + b] = th[params[b]].idx;
    }
    LastStep<Var> ls;
    compute_last_step(sde, th.data(), h, req, pv, ls);
    std::array<Var, kMaxActive> outs;
    std::array<Var, kMaxActive> dis;
    const Var disc = sde.discount(th.data());
    for (int a = 0; a < np; ++a) dis[a] = discount_terms(sde, th.data(), params[a]).di;
    for (int r = 0; r < cfg.MZ; ++r) {
      for (int a = 0; a < d; ++a) z[a] = rs.normal();
      std::array<Var, kMaxActive> k1;
      Var vbar;
      if (!first_kernels(payoff, ls, np, z.data(), cfg.antithetic, cfg.mode, k1.data(), vbar)) return false;
      for (int a = 0; a < np; ++a) {
        Var c = disc * k1[a] + dis[a] * vbar;
        outs[a] = r == 0 ? c : outs[a] + c;
      }
    }
    std::array<int, kMaxActive> oi{};
    for (int a = 0; a < np; ++a) {
      if (cfg.MZ > 1) outs[a] = outs[a] / static_cast<double>(cfg.MZ);
      oi[a] = outs[a].idx;
    }
    const int nin = rows + np;
    // g[o * np + b]: gradient of output o in active parameter b.
    std::array<double, kMaxActive * kMaxActive> g{};
    lam.assign(static_cast<std::size_t>(np) * nin, 0.0);
    tp.jacobian(std::span<const int>(oi.data(), np), std::span<const int>(in.data(), nin), lam);
    // lam is output-major; keep u-adjoints as lam[o * nin + r].
    for (int oo = 0; oo < np; ++oo)
      for (int b = 0; b < np; ++b) g[oo * np + b] = lam[oo * nin + rows + b];

    lam_next.resize(lam.size());
    for (int k = steps - 1; k >= 0; --k) {
      const double* J = &jac[static_cast<std::size_t>(k) * rows * N];
      std::fill(lam_next.begin(), lam_next.end(), 0.0);
      for (int oo = 0; oo < np; ++oo) {
        const double* l = &lam[oo * nin];
        double* ln = &lam_next[oo * nin];
        double* go = &g[oo * np];
        for (int r = 0; r < rows; ++r) {
          const double lr = l[r];
          if (lr == 0.0) continue;
          const double* row = &J[r * N];
          for (int c = 0; c < d; ++c) ln[c] += lr * row[c];
          if (r >= d) {
            const int t0 = d + ((r - d) / d) * d;
            for (int c = 0; c < d; ++c) ln[t0 + c] += lr * row[d + c];
          }
          for (int b = 0; b < np; ++b) go[b] += lr * row[2 * d + b];
        }
      }
      std::swap(lam, lam_next);
    }
    // Initial state and tangents as functions of theta.
    PathState<D> p0;
    init_state(sde, thd.data(), req, p0);
    for (int oo = 0; oo < np; ++oo) {
      const double* l = &lam[oo * nin];
      for (int b = 0; b < np; ++b) {
        double acc = 0.0;
        for (int a = 0; a < d; ++a) acc += l[a] * p0.x[a].d[2 * d + b];
        for (int t = 0; t < np; ++t)
          for (int a = 0; a < d; ++a) acc += l[d + t * d + a] * p0.y[t][a].d[2 * d + b];
        g[oo * np + b] += acc;
      }
    }

    int w = 0;
    for (int a = 0; a < np; ++a)
      for (int b = 0; b < np; ++b) o[w++] = g[a * np + b];
    for (int a = 0; a < np; ++a)
      for (int b = a; b < np; ++b) o[w++] = 0.5 * (g[a * np + b] + g[b * np + a]);
    for (int a = 0; a < np; ++a) o[w++] = outs[a].v;
    if (path == 0) nodes = static_cast<std::uint64_t>(tp.size());
    return true;
  }
};

template <int N, class M>
math::PathRunOutput vrad_run(const Sde<M>& sde, const Payoff& payoff, const std::vector<int>& params,
                             const VibratoConfig& cfg, int width, std::uint64_t& nodes) {
  return math::run_paths(cfg.M, width, cfg.threads, [&] {
    return [&, wk = std::make_shared<VradWorker<N>>()](std::uint64_t p, std::span<double> o) {
      return wk->run(sde, payoff, params, cfg, p, o, nodes);
    };
  });
}

}  // namespace detail

// Per path: one reverse sweep with a vector of adjoints (one per parameter)
// returns the gradients of all first-order kernels at once.
template <class M>
HessianResult hessian_vrad(const Sde<M>& sde, const Payoff& payoff, const std::vector<int>& params,
                           const VibratoConfig& cfg) {
  detail::check_config(cfg);
  const int np = static_cast<int>(params.size());
  if (np < 1 || np > kMaxActive) throw DomainError("hessian_vrad takes 1 to 4 parameters");
  for (int p : params)
    if (p < 0 || p >= sde.num_params()) throw DomainError("hessian_vrad parameter index out of range");
  detail::Stopwatch sw;
  const int width = np * np + np * (np + 1) / 2 + np;
  std::uint64_t nodes = 0;
  const int d = sde.dim();
  math::PathRunOutput out;
  if (d == 1)
    out = detail::vrad_run<2 + kMaxActive>(sde, payoff, params, cfg, width, nodes);
  else if (d == 2)
    out = detail::vrad_run<4 + kMaxActive>(sde, payoff, params, cfg, width, nodes);
  else
    out = detail::vrad_run<2 * kMaxDim + kMaxActive>(sde, payoff, params, cfg, width, nodes);
  detail::check_rejections(out, cfg);

  HessianResult res;
  res.params = params;
  int w = 0;
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < np; ++b) res.raw[a][b] = detail::finish(out.stats[w++], out, cfg, 0.0);
  for (int a = 0; a < np; ++a)
    for (int b = a; b < np; ++b) {
      res.hessian[a][b] = detail::finish(out.stats[w++], out, cfg, 0.0);
      res.hessian[b][a] = res.hessian[a][b];
    }
  for (int a = 0; a < np; ++a) res.gradient[a] = detail::finish(out.stats[w++], out, cfg, 0.0);
  for (int a = 0; a < np; ++a)
    for (int b = a + 1; b < np; ++b) {
      double se = std::hypot(res.raw[a][b].std_error, res.raw[b][a].std_error);
      double diff = std::fabs(res.raw[a][b].estimate - res.raw[b][a].estimate);
      if (se > 0.0) res.max_asymmetry_z = std::max(res.max_asymmetry_z, diff / se);
    }
  res.wall_time = sw.seconds();
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < np; ++b) res.hessian[a][b].wall_time = res.wall_time;
  res.tape_nodes_last_path = nodes;
  return res;
}

enum class KernelChoice { First, SecondExplicit, SecondVad };

// Sample variance of the per-path contributions of the chosen kernel.
template <class M>
double empirical_variance(KernelChoice kc, const Sde<M>& sde, const Payoff& payoff, int i, int j,
                          const VibratoConfig& cfg) {
  switch (kc) {
    case KernelChoice::First:
      return vibrato_first(sde, payoff, i, cfg).variance;
    case KernelChoice::SecondExplicit:
      return vibrato_second_explicit(sde, payoff, i, j, cfg).variance;
    case KernelChoice::SecondVad:
      return vibrato_second_vad(sde, payoff, i, j, cfg).variance;
  }
  return 0.0;
}

}  // namespace greeks::vibrato
