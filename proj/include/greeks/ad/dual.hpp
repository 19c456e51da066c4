#pragma once

// Forward-mode numbers.  Dual<T,N> carries N first partials, HyperDual<T,N>
// adds the N x N Hessian.  T may itself be a Dual, which is how third order
// is reached (Dual over a second-order expression).

#include <array>
#include <cmath>
#include <complex>
#include <type_traits>

namespace greeks::ad {

// Set when a primitive is evaluated outside its domain; partials become NaN.
bool& domain_flag();

template <class T, int N>
struct Dual;
template <class T, int N>
struct HyperDual;

template <class S>
struct is_dual : std::false_type {};
template <class T, int N>
struct is_dual<Dual<T, N>> : std::true_type {};
template <class T, int N>
struct is_dual<HyperDual<T, N>> : std::true_type {};

inline double value_of(double x) { return x; }
inline double value_of(const std::complex<double>& x) { return x.real(); }
template <class T, int N>
double value_of(const Dual<T, N>& x) {
  return value_of(x.v);
}
template <class T, int N>
double value_of(const HyperDual<T, N>& x) {
  return value_of(x.v);
}

template <class T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  Dual() = default;
  Dual(double x) : v(x) {}
  template <class U>
    requires(!std::is_same_v<U, double> && std::is_constructible_v<T, U>)
  Dual(const U& x) : v(x) {}
  Dual(const T& x, const std::array<T, N>& dx) : v(x), d(dx) {}

  static Dual variable(const T& x, int i) {
    Dual r(x);
    r.d[i] = T(1.0);
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int k = 0; k < N; ++k) d[k] += o.d[k];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int k = 0; k < N; ++k) d[k] -= o.d[k];
    return *this;
  }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator-(const Dual& a) {
    Dual r;
    r.v = -a.v;
    for (int k = 0; k < N; ++k) r.d[k] = -a.d[k];
    return r;
  }
  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v * b.v;
    for (int k = 0; k < N; ++k) r.d[k] = a.d[k] * b.v + a.v * b.d[k];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    if (value_of(b.v) == 0.0) domain_flag() = true;
    T inv = T(1.0) / b.v;
    Dual r;
    r.v = a.v * inv;
    for (int k = 0; k < N; ++k) r.d[k] = (a.d[k] - r.v * b.d[k]) * inv;
    return r;
  }

  friend Dual operator+(Dual a, double b) {
    a.v += b;
    return a;
  }
  friend Dual operator+(double b, Dual a) {
    a.v += b;
    return a;
  }
  friend Dual operator-(Dual a, double b) {
    a.v -= b;
    return a;
  }
  friend Dual operator-(double b, const Dual& a) { return -a + b; }
  friend Dual operator*(Dual a, double b) {
    a.v *= b;
    for (int k = 0; k < N; ++k) a.d[k] *= b;
    return a;
  }
  friend Dual operator*(double b, Dual a) { return a * b; }
  friend Dual operator/(Dual a, double b) {
    if (b == 0.0) domain_flag() = true;
    return a * (1.0 / b);
  }
  friend Dual operator/(double a, const Dual& b) { return Dual(a) / b; }

  friend bool operator<(const Dual& a, const Dual& b) { return value_of(a) < value_of(b); }
  friend bool operator>(const Dual& a, const Dual& b) { return value_of(a) > value_of(b); }
  friend bool operator<=(const Dual& a, const Dual& b) { return value_of(a) <= value_of(b); }
  friend bool operator>=(const Dual& a, const Dual& b) { return value_of(a) >= value_of(b); }
  friend bool operator==(const Dual& a, const Dual& b) { return value_of(a) == value_of(b); }
};

template <class T, int N>
struct HyperDual {
  T v{};
  std::array<T, N> g{};
  std::array<T, N * N> h{};

  HyperDual() = default;
  HyperDual(double x) : v(x) {}
  template <class U>
    requires(!std::is_same_v<U, double> && std::is_constructible_v<T, U>)
  HyperDual(const U& x) : v(x) {}

  static HyperDual variable(const T& x, int i) {
    HyperDual r(x);
    r.g[i] = T(1.0);
    return r;
  }

  T& hess(int i, int j) { return h[i * N + j]; }
  const T& hess(int i, int j) const { return h[i * N + j]; }

  HyperDual& operator+=(const HyperDual& o) {
    v += o.v;
    for (int k = 0; k < N; ++k) g[k] += o.g[k];
    for (int k = 0; k < N * N; ++k) h[k] += o.h[k];
    return *this;
  }
  HyperDual& operator-=(const HyperDual& o) {
    v -= o.v;
    for (int k = 0; k < N; ++k) g[k] -= o.g[k];
    for (int k = 0; k < N * N; ++k) h[k] -= o.h[k];
    return *this;
  }
  HyperDual& operator*=(const HyperDual& o) { return *this = *this * o; }
  HyperDual& operator/=(const HyperDual& o) { return *this = *this / o; }

  friend HyperDual operator-(const HyperDual& a) {
    HyperDual r;
    r.v = -a.v;
    for (int k = 0; k < N; ++k) r.g[k] = -a.g[k];
    for (int k = 0; k < N * N; ++k) r.h[k] = -a.h[k];
    return r;
  }
  friend HyperDual operator+(HyperDual a, const HyperDual& b) { return a += b; }
  friend HyperDual operator-(HyperDual a, const HyperDual& b) { return a -= b; }
  friend HyperDual operator*(const HyperDual& a, const HyperDual& b) {
    HyperDual r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        T x = a.v * b.hess(i, j) + a.g[i] * b.g[j] + a.g[j] * b.g[i] + b.v * a.hess(i, j);
        r.hess(i, j) = x;
        r.hess(j, i) = x;
      }
    return r;
  }
  friend HyperDual operator/(const HyperDual& a, const HyperDual& b) { return a * reciprocal(b); }
  friend HyperDual reciprocal(const HyperDual& b) {
    if (value_of(b.v) == 0.0) domain_flag() = true;
    T inv = T(1.0) / b.v;
    return chain(b, inv, -inv * inv, T(2.0) * inv * inv * inv);
  }

  friend HyperDual operator+(HyperDual a, double b) {
    a.v += b;
    return a;
  }
  friend HyperDual operator+(double b, HyperDual a) {
    a.v += b;
    return a;
  }
  friend HyperDual operator-(HyperDual a, double b) {
    a.v -= b;
    return a;
  }
  friend HyperDual operator-(double b, const HyperDual& a) { return -a + b; }
  friend HyperDual operator*(HyperDual a, double b) {
    a.v *= b;
    for (int k = 0; k < N; ++k) a.g[k] *= b;
    for (int k = 0; k < N * N; ++k) a.h[k] *= b;
    return a;
  }
  friend HyperDual operator*(double b, HyperDual a) { return a * b; }
  friend HyperDual operator/(HyperDual a, double b) {
    if (b == 0.0) domain_flag() = true;
    return a * (1.0 / b);
  }
  friend HyperDual operator/(double a, const HyperDual& b) { return reciprocal(b) * a; }

  friend bool operator<(const HyperDual& a, const HyperDual& b) { return value_of(a) < value_of(b); }
  friend bool operator>(const HyperDual& a, const HyperDual& b) { return value_of(a) > value_of(b); }
  friend bool operator<=(const HyperDual& a, const HyperDual& b) { return value_of(a) <= value_of(b); }
  friend bool operator>=(const HyperDual& a, const HyperDual& b) { return value_of(a) >= value_of(b); }
  friend bool operator==(const HyperDual& a, const HyperDual& b) { return value_of(a) == value_of(b); }

  // f(a) given f, f', f'' at a.v; the Hessian is filled symmetrically.
  friend HyperDual chain(const HyperDual& a, const T& f0, const T& f1, const T& f2) {
    HyperDual r;
    r.v = f0;
    for (int i = 0; i < N; ++i) r.g[i] = f1 * a.g[i];
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        T x = f1 * a.hess(i, j) + f2 * a.g[i] * a.g[j];
        r.hess(i, j) = x;
        r.hess(j, i) = x;
      }
    return r;
  }
};

template <class T, int N>
Dual<T, N> chain(const Dual<T, N>& a, const T& f0, const T& f1) {
  Dual<T, N> r;
  r.v = f0;
  for (int k = 0; k < N; ++k) r.d[k] = f1 * a.d[k];
  return r;
}

// Elementary functions.  Inner calls resolve by ADL so nesting works.

template <class T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  using std::exp;
  T e = exp(a.v);
  return chain(a, e, e);
}
template <class T, int N>
HyperDual<T, N> exp(const HyperDual<T, N>& a) {
  using std::exp;
  T e = exp(a.v);
  return chain(a, e, e, e);
}

template <class T, int N>
Dual<T, N> log(const Dual<T, N>& a) {
  using std::log;
  if (!(value_of(a.v) > 0.0)) domain_flag() = true;
  return chain(a, log(a.v), T(1.0) / a.v);
}
template <class T, int N>
HyperDual<T, N> log(const HyperDual<T, N>& a) {
  using std::log;
  if (!(value_of(a.v) > 0.0)) domain_flag() = true;
  T inv = T(1.0) / a.v;
  return chain(a, log(a.v), inv, -inv * inv);
}

template <class T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using std::sqrt;
  if (!(value_of(a.v) > 0.0)) domain_flag() = true;
  T s = sqrt(a.v);
  return chain(a, s, T(0.5) / s);
}
template <class T, int N>
HyperDual<T, N> sqrt(const HyperDual<T, N>& a) {
  using std::sqrt;
  if (!(value_of(a.v) > 0.0)) domain_flag() = true;
  T s = sqrt(a.v);
  T d1 = T(0.5) / s;
  return chain(a, s, d1, -d1 / (T(2.0) * a.v));
}

template <class T, int N>
Dual<T, N> pow(const Dual<T, N>& a, double p) {
  using std::pow;
  return chain(a, pow(a.v, p), p * pow(a.v, p - 1.0));
}
template <class T, int N>
HyperDual<T, N> pow(const HyperDual<T, N>& a, double p) {
  using std::pow;
  return chain(a, pow(a.v, p), p * pow(a.v, p - 1.0), p * (p - 1.0) * pow(a.v, p - 2.0));
}
template <class S>
  requires is_dual<S>::value
S pow(const S& a, const S& b) {
  return exp(b * log(a));
}

template <class T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return chain(a, sin(a.v), cos(a.v));
}
template <class T, int N>
HyperDual<T, N> sin(const HyperDual<T, N>& a) {
  using std::cos;
  using std::sin;
  T s = sin(a.v);
  return chain(a, s, cos(a.v), -s);
}
template <class T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return chain(a, cos(a.v), -sin(a.v));
}
template <class T, int N>
HyperDual<T, N> cos(const HyperDual<T, N>& a) {
  using std::cos;
  using std::sin;
  T c = cos(a.v);
  return chain(a, c, -sin(a.v), -c);
}

// Ties take the first argument's derivative.
template <class S>
  requires is_dual<S>::value
S max(const S& a, const S& b) {
  return value_of(a) >= value_of(b) ? a : b;
}
template <class S>
  requires is_dual<S>::value
S min(const S& a, const S& b) {
  return value_of(a) <= value_of(b) ? a : b;
}
template <class S>
  requires is_dual<S>::value
S abs(const S& a) {
  return value_of(a) >= 0.0 ? a : -a;
}

// Standard normal density and distribution for any scalar kind.
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

template <class T, int N>
Dual<T, N> norm_pdf(const Dual<T, N>& a) {
  T p = norm_pdf(a.v);
  return chain(a, p, -a.v * p);
}
template <class T, int N>
HyperDual<T, N> norm_pdf(const HyperDual<T, N>& a) {
  T p = norm_pdf(a.v);
  return chain(a, p, -a.v * p, (a.v * a.v - 1.0) * p);
}
template <class T, int N>
Dual<T, N> norm_cdf(const Dual<T, N>& a) {
  return chain(a, norm_cdf(a.v), norm_pdf(a.v));
}
template <class T, int N>
HyperDual<T, N> norm_cdf(const HyperDual<T, N>& a) {
  T p = norm_pdf(a.v);
  return chain(a, norm_cdf(a.v), p, -a.v * p);
}

// Positive part with zero derivative below the kink.
inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }
inline std::complex<double> positive_part(const std::complex<double>& x) {
  return x.real() > 0.0 ? x : std::complex<double>(0.0);
}
template <class S>
  requires is_dual<S>::value
S positive_part(const S& a) {
  return value_of(a) > 0.0 ? a : S(0.0);
}

}  // namespace greeks::ad
