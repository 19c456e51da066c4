#pragma once

#include <array>
#include <cmath>
#include <string>

#include "greeks/ad/dual.hpp"

namespace greeks::analytics {

// European call under Black-Scholes, generic in the scalar kind so that it
// can be differentiated by the forward-mode types.
template <class S>
S bs_call_price(const S& x0, double k, const S& sigma, const S& r, const S& t) {
  using ad::norm_cdf;
  using std::exp;
  using std::log;
  using std::sqrt;
  S srt = sigma * sqrt(t);
  S d1 = (log(x0 / k) + (r + 0.5 * sigma * sigma) * t) / srt;
  S d2 = d1 - srt;
  return x0 * norm_cdf(d1) - k * exp(-(r * t)) * norm_cdf(d2);
}

template <class S>
S bs_put_price(const S& x0, double k, const S& sigma, const S& r, const S& t) {
  using std::exp;
  return bs_call_price(x0, k, sigma, r, t) - x0 + k * exp(-(r * t));
}

enum class BsGreek {
  Price,
  Delta,
  Gamma,
  Vega,
  Rho,
  Theta,  // derivative in maturity T
  Vanna,  // d2 / dX0 dsigma
  Vomma,  // d2 / dsigma2
  Speed,  // d3 / dX0^3
  ThirdCross  // d3 / dX0 dsigma dr
};

BsGreek parse_bs_greek(const std::string& name);

// Price and hand-coded Delta/Gamma/Vega; the rest by differentiating the
// price with HyperDual (second order) or HyperDual-over-Dual (third order).
double bs_closed_form(double x0, double k, double sigma, double r, double t, BsGreek which);

// Hessian of the call price in (X0, sigma, r, T), row-major.
std::array<double, 16> bs_hessian(double x0, double k, double sigma, double r, double t);
// Gradient in (X0, sigma, r, T).
std::array<double, 4> bs_gradient(double x0, double k, double sigma, double r, double t);

// Lognormal density of X_T at y.
double bs_terminal_density(double x0, double sigma, double r, double t, double y);

}  // namespace greeks::analytics
