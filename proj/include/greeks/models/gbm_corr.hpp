#pragma once

#include <string>
#include <vector>

#include "greeks/math/linalg.hpp"
#include "greeks/models/model.hpp"

namespace greeks::models {

// d correlated geometric Brownian motions, dX_k = r X_k dt + sigma_k X_k (L dW)_k
// with L the Cholesky factor of the correlation.  Parameters
// (x0_0..x0_{d-1}, sigma_0..sigma_{d-1}, r).
struct GbmCorr {
  static constexpr bool kHasSecond = true;

  int d;
  std::vector<double> x0, sigma;
  double r;
  std::vector<double> chol;  // d x d row-major

  GbmCorr(std::vector<double> x0_, std::vector<double> sigma_, double r_, const math::CorrelationMatrix& c);

  int dim() const { return d; }
  int num_params() const { return 2 * d + 1; }
  int x0_index(int k) const { return k; }
  int sigma_index(int k) const { return d + k; }
  int r_index() const { return 2 * d; }
  int rate_index() const { return 2 * d; }
  std::vector<double> params() const;
  ParamInfo info() const;

  double l(int a, int b) const { return chol[a * d + b]; }

  template <class S>
  void initial_state(const S* th, S* x) const {
    for (int k = 0; k < d; ++k) x[k] = th[k];
  }
  template <class S>
  void initial_tangent(const S*, int i, S* y) const {
    for (int k = 0; k < d; ++k) y[k] = S(i == k ? 1.0 : 0.0);
  }
  template <class S>
  void initial_second(const S*, int, int, S* y) const {
    for (int k = 0; k < d; ++k) y[k] = S(0.0);
  }

  template <class S>
  void drift(const S* th, const S* x, S* b) const {
    for (int k = 0; k < d; ++k) b[k] = th[r_index()] * x[k];
  }
  template <class S>
  void diffusion(const S* th, const S* x, S* s) const {
    for (int a = 0; a < d; ++a) {
      S f = th[d + a] * x[a];
      for (int b = 0; b < d; ++b) s[at(a, b)] = b <= a ? f * l(a, b) : S(0.0);
    }
  }
  template <class S>
  void drift_tangent(const S* th, const S* x, int i, const S* y, S* out) const {
    for (int k = 0; k < d; ++k) {
      out[k] = th[r_index()] * y[k];
      if (i == r_index()) out[k] += x[k];
    }
  }
  template <class S>
  void diffusion_tangent(const S* th, const S* x, int i, const S* y, S* out) const {
    for (int a = 0; a < d; ++a) {
      S f = th[d + a] * y[a];
      if (i == d + a) f += x[a];
      for (int b = 0; b < d; ++b) out[at(a, b)] = b <= a ? f * l(a, b) : S(0.0);
    }
  }
  template <class S>
  void drift_second(const S*, const S*, int i, int j, const S* yi, const S* yj, S* out) const {
    for (int k = 0; k < d; ++k) {
      out[k] = S(0.0);
      if (i == r_index()) out[k] += yj[k];
      if (j == r_index()) out[k] += yi[k];
    }
  }
  template <class S>
  void diffusion_second(const S*, const S*, int i, int j, const S* yi, const S* yj, S* out) const {
    for (int a = 0; a < d; ++a) {
      S f(0.0);
      if (i == d + a) f += yj[a];
      if (j == d + a) f += yi[a];
      for (int b = 0; b < d; ++b) out[at(a, b)] = b <= a ? f * l(a, b) : S(0.0);
    }
  }
  template <class S>
  S rate(const S* th) const {
    return th[r_index()];
  }
};

inline GbmCorr::GbmCorr(std::vector<double> x0_, std::vector<double> sigma_, double r_,
                        const math::CorrelationMatrix& c)
    : d(static_cast<int>(x0_.size())), x0(std::move(x0_)), sigma(std::move(sigma_)), r(r_) {
  Eigen::MatrixXd lm = math::cholesky(c);
  chol.resize(d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) chol[a * d + b] = lm(a, b);
}

inline std::vector<double> GbmCorr::params() const {
  std::vector<double> p(x0);
  p.insert(p.end(), sigma.begin(), sigma.end());
  p.push_back(r);
  return p;
}

inline ParamInfo GbmCorr::info() const {
  ParamInfo p;
  for (int k = 0; k < d; ++k) p.names.push_back("x0_" + std::to_string(k));
  for (int k = 0; k < d; ++k) p.names.push_back("sigma_" + std::to_string(k));
  p.names.push_back("r");
  return p;
}

// The same dynamics in log coordinates, Y_k = log X_k:
//   dY_k = (r - sigma_k^2 / 2) dt + sigma_k (L dW)_k.
// Coefficients do not depend on the state, so a single Euler step is exact.
// Parameters are as for GbmCorr; x0 enters through Y_0 = log x0.  Pair with
// a payoff evaluated on exp(y).
struct LogGbmCorr {
  static constexpr bool kHasSecond = true;

  int d;
  std::vector<double> x0, sigma;
  double r;
  std::vector<double> chol;

  LogGbmCorr(std::vector<double> x0_, std::vector<double> sigma_, double r_, const math::CorrelationMatrix& c)
      : LogGbmCorr(GbmCorr(std::move(x0_), std::move(sigma_), r_, c)) {}
  explicit LogGbmCorr(const GbmCorr& g) : d(g.d), x0(g.x0), sigma(g.sigma), r(g.r), chol(g.chol) {}

  int dim() const { return d; }
  int num_params() const { return 2 * d + 1; }
  int x0_index(int k) const { return k; }
  int sigma_index(int k) const { return d + k; }
  int r_index() const { return 2 * d; }
  int rate_index() const { return 2 * d; }
  std::vector<double> params() const {
    std::vector<double> p(x0);
    p.insert(p.end(), sigma.begin(), sigma.end());
    p.push_back(r);
    return p;
  }
  ParamInfo info() const {
    ParamInfo p;
    for (int k = 0; k < d; ++k) p.names.push_back("x0_" + std::to_string(k));
    for (int k = 0; k < d; ++k) p.names.push_back("sigma_" + std::to_string(k));
    p.names.push_back("r");
    return p;
  }

  double l(int a, int b) const { return chol[a * d + b]; }

  template <class S>
  void initial_state(const S* th, S* x) const {
    using std::log;
    for (int k = 0; k < d; ++k) x[k] = log(th[k]);
  }
  template <class S>
  void initial_tangent(const S* th, int i, S* y) const {
    for (int k = 0; k < d; ++k) y[k] = i == k ? S(1.0) / th[k] : S(0.0);
  }
  template <class S>
  void initial_second(const S* th, int i, int j, S* y) const {
    for (int k = 0; k < d; ++k) y[k] = i == k && j == k ? S(-1.0) / (th[k] * th[k]) : S(0.0);
  }

  template <class S>
  void drift(const S* th, const S*, S* b) const {
    for (int k = 0; k < d; ++k) b[k] = th[r_index()] - 0.5 * th[d + k] * th[d + k];
  }
  template <class S>
  void diffusion(const S* th, const S*, S* s) const {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) s[at(a, b)] = b <= a ? th[d + a] * l(a, b) : S(0.0);
  }
  template <class S>
  void drift_tangent(const S* th, const S*, int i, const S*, S* out) const {
    for (int k = 0; k < d; ++k) {
      out[k] = S(0.0);
      if (i == r_index()) out[k] += 1.0;
      if (i == d + k) out[k] -= th[d + k];
    }
  }
  template <class S>
  void diffusion_tangent(const S*, const S*, int i, const S*, S* out) const {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) out[at(a, b)] = b <= a && i == d + a ? S(l(a, b)) : S(0.0);
  }
  template <class S>
  void drift_second(const S*, const S*, int i, int j, const S*, const S*, S* out) const {
    for (int k = 0; k < d; ++k) out[k] = i == d + k && j == d + k ? S(-1.0) : S(0.0);
  }
  template <class S>
  void diffusion_second(const S*, const S*, int, int, const S*, const S*, S* out) const {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) out[at(a, b)] = S(0.0);
  }
  template <class S>
  S rate(const S* th) const {
    return th[r_index()];
  }
};

}  // namespace greeks::models
