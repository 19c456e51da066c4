#pragma once

#include <cmath>
#include <vector>

#include "greeks/ad/dual.hpp"
#include "greeks/models/model.hpp"

namespace greeks::models {

// dX = r X dt + sqrt(V) X dW1,  dV = kappa (eta - V) dt + xi sqrt(V) dW2,
// d<W1,W2> = rho dt.  Full truncation: V enters through V+ = max(V, 0).
// Parameters (x0, v0, r, kappa, eta, xi, rho).
struct Heston {
  enum Param { X0 = 0, V0, R, KAPPA, ETA, XI, RHO };
  static constexpr bool kHasSecond = true;

  double x0, v0, r, kappa, eta, xi, rho;

  int dim() const { return 2; }
  int rate_index() const { return R; }
  int num_params() const { return 7; }
  std::vector<double> params() const { return {x0, v0, r, kappa, eta, xi, rho}; }
  ParamInfo info() const { return {{"x0", "v0", "r", "kappa", "eta", "xi", "rho"}}; }

  template <class S>
  void initial_state(const S* th, S* x) const {
    x[0] = th[X0];
    x[1] = th[V0];
  }
  template <class S>
  void initial_tangent(const S*, int i, S* y) const {
    y[0] = S(i == X0 ? 1.0 : 0.0);
    y[1] = S(i == V0 ? 1.0 : 0.0);
  }
  template <class S>
  void initial_second(const S*, int, int, S* y) const {
    y[0] = S(0.0);
    y[1] = S(0.0);
  }

  // sqrt(V+) and its first two derivatives in V (zero below the kink).
  template <class S>
  static void root(const S& v, S& s, S& s1, S& s2) {
    using std::sqrt;
    using ad::value_of;
    if (value_of(v) > 0.0) {
      s = sqrt(v);
      s1 = 0.5 / s;
      s2 = -0.5 * s1 / v;
    } else {
      s = S(0.0);
      s1 = S(0.0);
      s2 = S(0.0);
    }
  }
  template <class S>
  static S pos_ind(const S& v) {
    return S(ad::value_of(v) > 0.0 ? 1.0 : 0.0);
  }
  template <class S>
  static S corr_c(const S& rho) {
    using std::sqrt;
    return sqrt(1.0 - rho * rho);
  }

  template <class S>
  void drift(const S* th, const S* x, S* b) const {
    b[0] = th[R] * x[0];
    b[1] = th[KAPPA] * (th[ETA] - ad::positive_part(x[1]));
  }
  template <class S>
  void diffusion(const S* th, const S* x, S* m) const {
    S s, s1, s2;
    root(x[1], s, s1, s2);
    m[at(0, 0)] = s * x[0];
    m[at(0, 1)] = S(0.0);
    m[at(1, 0)] = th[XI] * th[RHO] * s;
    m[at(1, 1)] = th[XI] * corr_c(th[RHO]) * s;
  }
  template <class S>
  void drift_tangent(const S* th, const S* x, int i, const S* y, S* out) const {
    out[0] = th[R] * y[0];
    if (i == R) out[0] += x[0];
    out[1] = -th[KAPPA] * pos_ind(x[1]) * y[1];
    if (i == KAPPA) out[1] += th[ETA] - ad::positive_part(x[1]);
    if (i == ETA) out[1] += th[KAPPA];
  }
  template <class S>
  void diffusion_tangent(const S* th, const S* x, int i, const S* y, S* out) const {
    S s, s1, s2;
    root(x[1], s, s1, s2);
    S c = corr_c(th[RHO]);
    S ds = s1 * y[1];
    out[at(0, 0)] = s * y[0] + x[0] * ds;
    out[at(0, 1)] = S(0.0);
    out[at(1, 0)] = th[XI] * th[RHO] * ds;
    out[at(1, 1)] = th[XI] * c * ds;
    if (i == XI) {
      out[at(1, 0)] += th[RHO] * s;
      out[at(1, 1)] += c * s;
    }
    if (i == RHO) {
      out[at(1, 0)] += th[XI] * s;
      out[at(1, 1)] -= th[XI] * th[RHO] / c * s;
    }
  }
  template <class S>
  void drift_second(const S*, const S* x, int i, int j, const S* yi, const S* yj, S* out) const {
    out[0] = S(0.0);
    if (i == R) out[0] += yj[0];
    if (j == R) out[0] += yi[0];
    S ind = pos_ind(x[1]);
    out[1] = S(0.0);
    if (i == KAPPA) out[1] -= ind * yj[1];
    if (j == KAPPA) out[1] -= ind * yi[1];
    if ((i == KAPPA && j == ETA) || (i == ETA && j == KAPPA)) out[1] += 1.0;
  }
  template <class S>
  void diffusion_second(const S* th, const S* x, int i, int j, const S* yi, const S* yj, S* out) const {
    S s, s1, s2;
    root(x[1], s, s1, s2);
    S c = corr_c(th[RHO]);
    S c1 = -th[RHO] / c;
    S c2 = -1.0 / (c * c * c);
    S vv = s2 * yi[1] * yj[1];
    out[at(0, 0)] = vv * x[0] + s1 * (yi[1] * yj[0] + yj[1] * yi[0]);
    out[at(0, 1)] = S(0.0);
    S a10 = th[XI] * th[RHO] * vv;
    S a11 = th[XI] * c * vv;
    auto param_part = [&](int p, const S* yo) {
      if (p == XI) {
        a10 += th[RHO] * s1 * yo[1];
        a11 += c * s1 * yo[1];
      }
      if (p == RHO) {
        a10 += th[XI] * s1 * yo[1];
        a11 += th[XI] * c1 * s1 * yo[1];
      }
    };
    param_part(i, yj);
    param_part(j, yi);
    if ((i == XI && j == RHO) || (i == RHO && j == XI)) {
      a10 += s;
      a11 += c1 * s;
    }
    if (i == RHO && j == RHO) a11 += th[XI] * c2 * s;
    out[at(1, 0)] = a10;
    out[at(1, 1)] = a11;
  }
  template <class S>
  S rate(const S* th) const {
    return th[R];
  }
};

}  // namespace greeks::models
