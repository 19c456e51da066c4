#pragma once

// Step and ramp with distributional derivatives.  Values are exact; the Dirac
// mass in derivatives is replaced by the Gaussian bump
//   delta_a(x) = exp(-x^2/a) / sqrt(a pi).

#include <cmath>
#include <complex>
#include <functional>

#include "greeks/ad/dual.hpp"

namespace greeks::ad {

struct DiracParam {
  double a = 1.0;
  // Optional state-dependent bandwidth; when set it overrides `a`.
  std::function<double(double)> a_of_x;

  double bandwidth(double x) const { return a_of_x ? a_of_x(x) : a; }
};

// k-th derivative of delta_a at x, via physicists' Hermite polynomials.
inline double dirac_derivative(double x, double a, int k) {
  const double s = std::sqrt(a);
  const double t = x / s;
  const double base = std::exp(-t * t) / std::sqrt(a * M_PI);
  double h0 = 1.0, h1 = 2.0 * t;
  double hk = k == 0 ? h0 : h1;
  for (int m = 1; m < k; ++m) {
    hk = 2.0 * t * h1 - 2.0 * m * h0;
    h0 = h1;
    h1 = hk;
  }
  return ((k % 2) ? -1.0 : 1.0) * std::pow(s, -k) * hk * base;
}

// dirac_k(x) = delta_a^{(k)}(x); heaviside = dirac_{-1}, ramp = dirac_{-2}.
inline double dirac_k(double x, int k, const DiracParam& dp) {
  if (k == -2) return x > 0.0 ? x : 0.0;
  if (k == -1) return x >= 0.0 ? 1.0 : 0.0;
  return dirac_derivative(x, dp.bandwidth(x), k);
}
inline std::complex<double> dirac_k(const std::complex<double>& x, int k, const DiracParam& dp) {
  if (k == -2) return x.real() > 0.0 ? x : std::complex<double>(0.0);
  if (k == -1) return x.real() >= 0.0 ? 1.0 : 0.0;
  return dirac_derivative(x.real(), dp.bandwidth(x.real()), k);
}
template <class T, int N>
Dual<T, N> dirac_k(const Dual<T, N>& x, int k, const DiracParam& dp) {
  return chain(x, dirac_k(x.v, k, dp), dirac_k(x.v, k + 1, dp));
}
template <class T, int N>
HyperDual<T, N> dirac_k(const HyperDual<T, N>& x, int k, const DiracParam& dp) {
  return chain(x, dirac_k(x.v, k, dp), dirac_k(x.v, k + 1, dp), dirac_k(x.v, k + 2, dp));
}

template <class S>
S heaviside(const S& x, const DiracParam& dp = {}) {
  return dirac_k(x, -1, dp);
}
template <class S>
S ramp(const S& x, const DiracParam& dp = {}) {
  return dirac_k(x, -2, dp);
}
template <class S>
S dirac(const S& x, const DiracParam& dp = {}) {
  return dirac_k(x, 0, dp);
}

}  // namespace greeks::ad
