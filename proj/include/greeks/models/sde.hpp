#pragma once

// Maturity as a parameter.  The model is rescaled to the unit horizon:
//   b~ = T b,  s~ = sqrt(T) s,  h~ = 1/n,
// and T is appended as the last entry of the parameter vector.  A direction
// u = (tau_u e_T + u', y) splits into its maturity part and the model part;
// the chain rule for the scaling factors is applied here so models only
// ever see calendar-time coefficients.

#include <cmath>
#include <string>
#include <vector>

#include "greeks/ad/dual.hpp"
#include "greeks/models/model.hpp"

namespace greeks::models {

template <class M>
struct Sde {
  M model;
  double maturity;

  int dim() const { return model.dim(); }
  int num_params() const { return model.num_params() + 1; }
  int maturity_index() const { return model.num_params(); }
  std::vector<double> params() const {
    std::vector<double> p = model.params();
    p.push_back(maturity);
    return p;
  }
  ParamInfo info() const {
    ParamInfo p = model.info();
    p.names.push_back("T");
    return p;
  }

  int model_index(int i) const { return i == maturity_index() ? kNoParam : i; }
  bool is_maturity(int i) const { return i == maturity_index(); }

  template <class S>
  const S& T(const S* th) const {
    return th[maturity_index()];
  }

  template <class S>
  void initial_state(const S* th, S* x) const {
    model.initial_state(th, x);
  }
  template <class S>
  void initial_tangent(const S* th, int i, S* y) const {
    model.initial_tangent(th, model_index(i), y);
  }
  template <class S>
  void initial_second(const S* th, int i, int j, S* y) const {
    model.initial_second(th, model_index(i), model_index(j), y);
  }

  template <class S>
  void drift(const S* th, const S* x, S* b) const {
    model.drift(th, x, b);
    for (int k = 0; k < dim(); ++k) b[k] = T(th) * b[k];
  }
  template <class S>
  void diffusion(const S* th, const S* x, S* s) const {
    using std::sqrt;
    model.diffusion(th, x, s);
    S rt = sqrt(T(th));
    for (int a = 0; a < dim(); ++a)
      for (int c = 0; c <= a; ++c) s[at(a, c)] = rt * s[at(a, c)];
  }

  template <class S>
  void drift_tangent(const S* th, const S* x, int i, const S* y, S* out) const {
    model.drift_tangent(th, x, model_index(i), y, out);
    for (int k = 0; k < dim(); ++k) out[k] = T(th) * out[k];
    if (is_maturity(i)) {
      Scratch<Vec<S>> bb;
      auto& b = bb.v;
      model.drift(th, x, b.data());
      for (int k = 0; k < dim(); ++k) out[k] += b[k];
    }
  }
  template <class S>
  void diffusion_tangent(const S* th, const S* x, int i, const S* y, S* out) const {
    using std::sqrt;
    model.diffusion_tangent(th, x, model_index(i), y, out);
    S rt = sqrt(T(th));
    for (int a = 0; a < dim(); ++a)
      for (int c = 0; c <= a; ++c) out[at(a, c)] = rt * out[at(a, c)];
    if (is_maturity(i)) {
      Scratch<Mat<S>> ss;
      auto& s = ss.v;
      model.diffusion(th, x, s.data());
      S f = 0.5 / rt;
      for (int a = 0; a < dim(); ++a)
        for (int c = 0; c <= a; ++c) out[at(a, c)] += f * s[at(a, c)];
    }
  }

  template <class S>
  void drift_second(const S* th, const S* x, int i, int j, const S* yi, const S* yj, S* out) const {
    model.drift_second(th, x, model_index(i), model_index(j), yi, yj, out);
    for (int k = 0; k < dim(); ++k) out[k] = T(th) * out[k];
    Vec<S> t;
    if (is_maturity(i)) {
      model.drift_tangent(th, x, model_index(j), yj, t.data());
      for (int k = 0; k < dim(); ++k) out[k] += t[k];
    }
    if (is_maturity(j)) {
      model.drift_tangent(th, x, model_index(i), yi, t.data());
      for (int k = 0; k < dim(); ++k) out[k] += t[k];
    }
  }
  template <class S>
  void diffusion_second(const S* th, const S* x, int i, int j, const S* yi, const S* yj, S* out) const {
    using std::sqrt;
    model.diffusion_second(th, x, model_index(i), model_index(j), yi, yj, out);
    const S rt = sqrt(T(th));
    for (int a = 0; a < dim(); ++a)
      for (int c = 0; c <= a; ++c) out[at(a, c)] = rt * out[at(a, c)];
    if (!is_maturity(i) && !is_maturity(j)) return;
    const S half_inv = 0.5 / rt;
    Mat<S> t;
    if (is_maturity(i)) {
      model.diffusion_tangent(th, x, model_index(j), yj, t.data());
      for (int a = 0; a < dim(); ++a)
        for (int c = 0; c <= a; ++c) out[at(a, c)] += half_inv * t[at(a, c)];
    }
    if (is_maturity(j)) {
      model.diffusion_tangent(th, x, model_index(i), yi, t.data());
      for (int a = 0; a < dim(); ++a)
        for (int c = 0; c <= a; ++c) out[at(a, c)] += half_inv * t[at(a, c)];
    }
    if (is_maturity(i) && is_maturity(j)) {
      model.diffusion(th, x, t.data());
      S f = -0.25 / (rt * T(th));
      for (int a = 0; a < dim(); ++a)
        for (int c = 0; c <= a; ++c) out[at(a, c)] += f * t[at(a, c)];
    }
  }

  template <class S>
  S rate(const S* th) const {
    return model.rate(th);
  }
  template <class S>
  S discount(const S* th) const {
    using std::exp;
    return exp(-(model.rate(th) * T(th)));
  }
};

template <class M>
Sde<M> make_sde(M model, double maturity) {
  return Sde<M>{std::move(model), maturity};
}

}  // namespace greeks::models
