#pragma once

// Per-path machinery shared by all Vibrato estimators: streaming simulation
// of the state and its tangents up to step n-1, the Gaussian last step
// X_n = mu + sig Z, and the kernels that integrate the last step analytically.

#include <array>
#include <cmath>
#include <utility>

#include "greeks/ad/dual.hpp"
#include "greeks/math/rng.hpp"
#include "greeks/models/euler.hpp"
#include "greeks/vibrato/payoff.hpp"
#include "greeks/vibrato/types.hpp"

namespace greeks::vibrato {

using models::at;
using models::kMaxDim;
using models::Mat;
using models::Scratch;
using models::Sde;
using models::Vec;

inline constexpr int kMaxActive = 4;
inline constexpr int kMaxPairs = 4;

// Which tangents to carry: first-order parameters, and pairs (positions in
// `first`) for second tangents.
struct TangentRequest {
  std::array<int, kMaxActive> first{};
  int nfirst = 0;
  std::array<std::pair<int, int>, kMaxPairs> pairs{};
  int npairs = 0;

  static TangentRequest one(int i) {
    TangentRequest r;
    r.first[0] = i;
    r.nfirst = 1;
    return r;
  }
  static TangentRequest two(int i, int j, bool with_pair) {
    TangentRequest r;
    r.first[0] = i;
    r.first[1] = j;
    r.nfirst = 2;
    if (with_pair) {
      r.pairs[0] = {0, 1};
      r.npairs = 1;
    }
    return r;
  }
};

template <class S>
struct PathState {
  Vec<S> x;
  std::array<Vec<S>, kMaxActive> y;
  std::array<Vec<S>, kMaxPairs> y2;
};

template <class S>
struct LastStep {
  Vec<S> mu;
  Mat<S> sig;
  std::array<Vec<S>, kMaxActive> dmu;
  std::array<Mat<S>, kMaxActive> dsig;
  std::array<Vec<S>, kMaxPairs> d2mu;
  std::array<Mat<S>, kMaxPairs> d2sig;
};

template <class M, class S>
void init_state(const Sde<M>& sde, const S* th, const TangentRequest& req, PathState<S>& ps) {
  sde.initial_state(th, ps.x.data());
  for (int a = 0; a < req.nfirst; ++a) sde.initial_tangent(th, req.first[a], ps.y[a].data());
  for (int q = 0; q < req.npairs; ++q)
    sde.initial_second(th, req.first[req.pairs[q].first], req.first[req.pairs[q].second], ps.y2[q].data());
}

// Advances state, tangents and second tangents by one step with noise z.
template <class M, class S>
void advance(const Sde<M>& sde, const S* th, double h, const TangentRequest& req, const double* z,
             PathState<S>& ps) {
  Scratch<PathState<S>> nxs;
  PathState<S>& nx = nxs.v;
  const int d = sde.dim();
  models::euler_step(sde, th, h, ps.x.data(), z, nx.x.data());
  for (int a = 0; a < req.nfirst; ++a)
    models::tangent_step(sde, th, h, ps.x.data(), req.first[a], ps.y[a].data(), z, nx.y[a].data());
  for (int q = 0; q < req.npairs; ++q) {
    auto [pa, pb] = req.pairs[q];
    models::second_tangent_step(sde, th, h, ps.x.data(), req.first[pa], req.first[pb], ps.y[pa].data(),
                                ps.y[pb].data(), ps.y2[q].data(), z, nx.y2[q].data());
  }
  for (int a = 0; a < d; ++a) ps.x[a] = nx.x[a];
  for (int k = 0; k < req.nfirst; ++k)
    for (int a = 0; a < d; ++a) ps.y[k][a] = nx.y[k][a];
  for (int q = 0; q < req.npairs; ++q)
    for (int a = 0; a < d; ++a) ps.y2[q][a] = nx.y2[q][a];
}

// mu, sig and their derivatives for the step leaving state ps.
template <class M, class S>
void compute_last_step(const Sde<M>& sde, const S* th, double h, const TangentRequest& req,
                       const PathState<S>& ps, LastStep<S>& ls) {
  const int d = sde.dim();
  const double rh = std::sqrt(h);
  Vec<S> b;
  Mat<S> s;
  sde.drift(th, ps.x.data(), b.data());
  sde.diffusion(th, ps.x.data(), s.data());
  for (int a = 0; a < d; ++a) {
    ls.mu[a] = ps.x[a] + b[a] * h;
    for (int c = 0; c <= a; ++c) ls.sig[at(a, c)] = s[at(a, c)] * rh;
  }
  for (int k = 0; k < req.nfirst; ++k) {
    sde.drift_tangent(th, ps.x.data(), req.first[k], ps.y[k].data(), b.data());
    sde.diffusion_tangent(th, ps.x.data(), req.first[k], ps.y[k].data(), s.data());
    for (int a = 0; a < d; ++a) {
      ls.dmu[k][a] = ps.y[k][a] + b[a] * h;
      for (int c = 0; c <= a; ++c) ls.dsig[k][at(a, c)] = s[at(a, c)] * rh;
    }
  }
  for (int q = 0; q < req.npairs; ++q) {
    auto [pa, pb] = req.pairs[q];
    const int i = req.first[pa], j = req.first[pb];
    Vec<S> b1;
    Mat<S> s1;
    sde.drift_second(th, ps.x.data(), i, j, ps.y[pa].data(), ps.y[pb].data(), b.data());
    sde.drift_tangent(th, ps.x.data(), models::kNoParam, ps.y2[q].data(), b1.data());
    sde.diffusion_second(th, ps.x.data(), i, j, ps.y[pa].data(), ps.y[pb].data(), s.data());
    sde.diffusion_tangent(th, ps.x.data(), models::kNoParam, ps.y2[q].data(), s1.data());
    for (int a = 0; a < d; ++a) {
      ls.d2mu[q][a] = ps.y2[q][a] + (b[a] + b1[a]) * h;
      for (int c = 0; c <= a; ++c) ls.d2sig[q][at(a, c)] = (s[at(a, c)] + s1[at(a, c)]) * rh;
    }
  }
}

// Runs steps 1..n-1 from the path's own stream; the stream is left at Z_n.
template <class M, class S>
void simulate_to_last_step(const Sde<M>& sde, const S* th, int n, const TangentRequest& req,
                           math::RngStream& rs, LastStep<S>& ls) {
  const int d = sde.dim();
  const double h = 1.0 / n;
  PathState<S> ps;
  init_state(sde, th, req, ps);
  std::array<double, kMaxDim> z;
  for (int k = 1; k < n; ++k) {
    for (int a = 0; a < d; ++a) z[a] = rs.normal();
    advance(sde, th, h, req, z.data(), ps);
  }
  models::check_state(ps.x.data(), d);
  compute_last_step(sde, th, h, req, ps, ls);
}

template <class S>
bool last_step_regular(const LastStep<S>& ls, int m) {
  for (int k = 0; k < m; ++k) {
    double v = ad::value_of(ls.sig[at(k, k)]);
    if (!(std::fabs(v) > 0.0) || !std::isfinite(v)) return false;
  }
  return true;
}

// Inverse of the leading m x m lower-triangular block.
template <class S>
void lower_inverse(const Mat<S>& l, int m, Mat<S>& inv) {
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < c; ++r) inv[at(r, c)] = S(0.0);
    inv[at(c, c)] = S(1.0) / l[at(c, c)];
    for (int r = c + 1; r < m; ++r) {
      S acc(0.0);
      for (int k = c; k < r; ++k) acc += l[at(r, k)] * inv[at(k, c)];
      inv[at(r, c)] = -acc / l[at(r, r)];
    }
  }
}

// One side of the antithetic bracket: the sample, the score variable
// Z(theta) and the density ratio (1 in pathwise mode).
template <class S>
struct LastStepSample {
  Vec<S> x;
  Vec<S> zt;
  S ratio{1.0};
};

template <class S>
void last_step_sample(const LastStep<S>& ls, const Mat<S>& inv, int m, const double* z, double sign,
                      LastStepMode mode, LastStepSample<S>& out) {
  if (mode == LastStepMode::Pathwise || !ad::is_dual<S>::value) {
    for (int a = 0; a < m; ++a) {
      S noise(0.0);
      for (int c = 0; c <= a; ++c) noise += ls.sig[at(a, c)] * z[c];
      out.x[a] = ls.mu[a] + sign * noise;
      out.zt[a] = S(sign * z[a]);
    }
    out.ratio = S(1.0);
    return;
  }
  using std::exp;
  Vec<S> res;
  double zz = 0.0;
  S scale(1.0);
  for (int a = 0; a < m; ++a) {
    double noise = 0.0;
    for (int c = 0; c <= a; ++c) noise += ad::value_of(ls.sig[at(a, c)]) * z[c];
    double xa = ad::value_of(ls.mu[a]) + sign * noise;
    out.x[a] = S(xa);
    res[a] = xa - ls.mu[a];
    zz += z[a] * z[a];
    scale = scale * (ls.sig[at(a, a)] / ad::value_of(ls.sig[at(a, a)]));
  }
  S zt2(0.0);
  for (int a = 0; a < m; ++a) {
    S acc(0.0);
    for (int c = 0; c <= a; ++c) acc += inv[at(a, c)] * res[c];
    out.zt[a] = acc;
    zt2 += acc * acc;
  }
  out.ratio = exp(0.5 * (zz - zt2)) / scale;
}

inline int bracket_sides(Antithetic a) { return a == Antithetic::Off ? 1 : 2; }

// First-order kernels for every parameter in the request, for one Z:
//   k1[a] ~ sum over bracket sides of (V - base) * score_a * ratio
// and vbar, the matching estimate of the undiscounted price.  Returns false
// when the last-step covariance is singular.  P is Payoff or any callable
// with the same arity()/operator() shape.
template <class S, class P>
bool first_kernels(const P& payoff, const LastStep<S>& ls, int np, const double* z, Antithetic anti,
                   LastStepMode mode, S* k1, S& vbar) {
  const int m = payoff.arity();
  if (!last_step_regular(ls, m)) return false;
  Mat<S> inv;
  lower_inverse(ls.sig, m, inv);
  std::array<S, kMaxActive> tr;
  for (int k = 0; k < np; ++k) {
    tr[k] = S(0.0);
    for (int a = 0; a < m; ++a) tr[k] += ls.dsig[k][at(a, a)] * inv[at(a, a)];
    k1[k] = S(0.0);
  }
  S base(0.0);
  if (anti == Antithetic::ThreePoint) {
    base = payoff(ls.mu.data());
    if (mode == LastStepMode::LikelihoodRatio) base = S(ad::value_of(base));
  }
  const int sides = bracket_sides(anti);
  const double fac = 1.0 / sides;
  vbar = S(0.0);
  LastStepSample<S> smp;
  for (int sd = 0; sd < sides; ++sd) {
    last_step_sample(ls, inv, m, z, sd == 0 ? 1.0 : -1.0, mode, smp);
    S c = fac * (payoff(smp.x.data()) - base) * smp.ratio;
    vbar += c;
    Vec<S> u;
    for (int a = 0; a < m; ++a) {
      S acc(0.0);
      for (int r = a; r < m; ++r) acc += inv[at(r, a)] * smp.zt[r];
      u[a] = acc;
    }
    for (int k = 0; k < np; ++k) {
      S w = -tr[k];
      for (int a = 0; a < m; ++a) {
        S dz(0.0);
        for (int r = 0; r <= a; ++r) dz += ls.dsig[k][at(a, r)] * smp.zt[r];
        w += u[a] * (ls.dmu[k][a] + dz);
      }
      k1[k] += c * w;
    }
  }
  vbar += base;
  return true;
}

// Explicit second-order kernel for pair q = (a, b) of a one-dimensional
// observation, together with the first-order kernels of a and b.
template <class S>
struct SecondKernels {
  S k2{0.0}, k1a{0.0}, k1b{0.0}, vbar{0.0};
};

template <class S>
bool second_kernel(const Payoff& payoff, const LastStep<S>& ls, int q, int a, int b, const double* z,
                   Antithetic anti, LastStepMode mode, SecondKernels<S>& out) {
  if (payoff.arity() != 1) throw NotApplicable("explicit second order needs a one-dimensional payoff");
  if (!last_step_regular(ls, 1)) return false;
  const S& s = ls.sig[0];
  const S inv = S(1.0) / s;
  const S inv2 = inv * inv;
  const S &dma = ls.dmu[a][0], &dmb = ls.dmu[b][0];
  const S &dsa = ls.dsig[a][0], &dsb = ls.dsig[b][0];
  const S &d2m = ls.d2mu[q][0], &d2s = ls.d2sig[q][0];
  Mat<S> invm;
  invm[0] = inv;
  S base(0.0);
  if (anti == Antithetic::ThreePoint) {
    base = payoff(ls.mu.data());
    if (mode == LastStepMode::LikelihoodRatio) base = S(ad::value_of(base));
  }
  out = SecondKernels<S>{};
  const int sides = bracket_sides(anti);
  const double fac = 1.0 / sides;
  LastStepSample<S> smp;
  for (int sd = 0; sd < sides; ++sd) {
    last_step_sample(ls, invm, 1, z, sd == 0 ? 1.0 : -1.0, mode, smp);
    const S& t = smp.zt[0];
    const S t2 = t * t;
    const S w1 = t * inv;
    const S w2 = (t2 - 1.0) * inv;
    const S c = fac * (payoff(smp.x.data()) - base) * smp.ratio;
    S w = d2m * w1 + dma * dmb * (t2 - 1.0) * inv2 + dsa * dsb * (t2 * t2 - 5.0 * t2 + 2.0) * inv2 + d2s * w2 +
          (dma * dsb + dsa * dmb) * (t2 * t - 3.0 * t) * inv2;
    out.k2 += c * w;
    out.k1a += c * (dma * w1 + dsa * w2);
    out.k1b += c * (dmb * w1 + dsb * w2);
    out.vbar += c;
  }
  out.vbar += base;
  return true;
}

// Discount factor e^{-rT} and its partials in parameters i and j.
template <class M, class S>
struct DiscountTerms {
  S d, di, dj, dij;
};

template <class M, class S>
DiscountTerms<M, S> discount_terms(const Sde<M>& sde, const S* th, int i, int j = models::kNoParam) {
  const int ri = sde.model.rate_index(), ti = sde.maturity_index();
  const S& r = th[ri];
  const S& T = th[ti];
  DiscountTerms<M, S> out;
  using std::exp;
  out.d = exp(-(r * T));
  auto first = [&](int k) -> S {
    if (k == ri) return -T * out.d;
    if (k == ti) return -r * out.d;
    return S(0.0);
  };
  out.di = first(i);
  out.dj = first(j);
  if (i == ri && j == ri)
    out.dij = T * T * out.d;
  else if (i == ti && j == ti)
    out.dij = r * r * out.d;
  else if ((i == ri && j == ti) || (i == ti && j == ri))
    out.dij = (r * T - 1.0) * out.d;
  else
    out.dij = S(0.0);
  return out;
}

}  // namespace greeks::vibrato
