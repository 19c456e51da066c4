#pragma once

#include <complex>

namespace greeks::math {

// f'(u) ~ Im f(u + i du) / du, free of subtractive cancellation.
template <class F>
double complex_step_derivative(F&& f, double u, double du = 1e-20) {
  std::complex<double> y = f(std::complex<double>(u, du));
  return y.imag() / du;
}

}  // namespace greeks::math
