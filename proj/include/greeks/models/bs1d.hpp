#pragma once

#include <vector>

#include "greeks/models/model.hpp"

namespace greeks::models {

// dX = r X dt + sigma X dW.  Parameters (x0, r, sigma).
struct Bs1d {
  enum Param { X0 = 0, R = 1, SIGMA = 2 };
  static constexpr bool kHasSecond = true;

  double x0, r, sigma;

  int dim() const { return 1; }
  int rate_index() const { return R; }
  int num_params() const { return 3; }
  std::vector<double> params() const { return {x0, r, sigma}; }
  ParamInfo info() const { return {{"x0", "r", "sigma"}}; }

  template <class S>
  void initial_state(const S* th, S* x) const {
    x[0] = th[X0];
  }
  template <class S>
  void initial_tangent(const S*, int i, S* y) const {
    y[0] = S(i == X0 ? 1.0 : 0.0);
  }
  template <class S>
  void initial_second(const S*, int, int, S* y) const {
    y[0] = S(0.0);
  }

  template <class S>
  void drift(const S* th, const S* x, S* b) const {
    b[0] = th[R] * x[0];
  }
  template <class S>
  void diffusion(const S* th, const S* x, S* s) const {
    s[0] = th[SIGMA] * x[0];
  }
  template <class S>
  void drift_tangent(const S* th, const S* x, int i, const S* y, S* out) const {
    out[0] = th[R] * y[0];
    if (i == R) out[0] += x[0];
  }
  template <class S>
  void diffusion_tangent(const S* th, const S* x, int i, const S* y, S* out) const {
    out[0] = th[SIGMA] * y[0];
    if (i == SIGMA) out[0] += x[0];
  }
  template <class S>
  void drift_second(const S*, const S*, int i, int j, const S* yi, const S* yj, S* out) const {
    out[0] = S(0.0);
    if (i == R) out[0] += yj[0];
    if (j == R) out[0] += yi[0];
  }
  template <class S>
  void diffusion_second(const S*, const S*, int i, int j, const S* yi, const S* yj, S* out) const {
    out[0] = S(0.0);
    if (i == SIGMA) out[0] += yj[0];
    if (j == SIGMA) out[0] += yi[0];
  }
  template <class S>
  S rate(const S* th) const {
    return th[R];
  }
};

}  // namespace greeks::models
