#pragma once

// Reverse-mode recording.  Each node stores up to two operands with their
// local partials; operands always precede results, so one backward pass in
// index order solves the adjoint system.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "greeks/ad/dual.hpp"
#include "greeks/ad/nonsmooth.hpp"

namespace greeks::ad {

class Tape {
 public:
  struct Node {
    std::int32_t a, b;  // -1 when absent
    double da, db;
  };

  int new_input();
  int push(int a, double da, int b = -1, double db = 0.0) {
    nodes_.push_back({a, b, da, db});
    return static_cast<int>(nodes_.size()) - 1;
  }
  bool is_input(int idx) const;
  int size() const { return static_cast<int>(nodes_.size()); }
  void clear() {
    nodes_.clear();
    inputs_.clear();
  }
  const std::vector<Node>& nodes() const { return nodes_; }

  // d output / d inputs.  Throws UnmarkedInput for unregistered inputs.
  std::vector<double> gradient(int output, std::span<const int> inputs) const;

  // One backward pass carrying outputs.size() adjoints per node.  Fills
  // jac[o * inputs.size() + i] = d outputs[o] / d inputs[i].
  void jacobian(std::span<const int> outputs, std::span<const int> inputs, std::span<double> jac) const;

 private:
  void check_inputs(std::span<const int> inputs) const;
  template <int K>
  void sweep(int top) const;

  std::vector<Node> nodes_;
  std::vector<int> inputs_;  // ascending
  mutable std::vector<double> adj_;
};

struct Var {
  double v = 0.0;
  std::int32_t idx = -1;  // -1: constant, not on any tape
  Tape* tape = nullptr;

  Var() = default;
  Var(double x) : v(x) {}
  Var(double x, int i, Tape* t) : v(x), idx(i), tape(t) {}

  static Var input(Tape& t, double x) { return Var(x, t.new_input(), &t); }
  bool active() const { return idx >= 0; }

  Var& operator+=(const Var& o) { return *this = *this + o; }
  Var& operator-=(const Var& o) { return *this = *this - o; }
  Var& operator*=(const Var& o) { return *this = *this * o; }
  Var& operator/=(const Var& o) { return *this = *this / o; }

  friend Var binary(double v, const Var& a, double da, const Var& b, double db) {
    if (!a.active() && !b.active()) return Var(v);
    Tape* t = a.active() ? a.tape : b.tape;
    if (!a.active()) return Var(v, t->push(b.idx, db), t);
    if (!b.active()) return Var(v, t->push(a.idx, da), t);
    return Var(v, t->push(a.idx, da, b.idx, db), t);
  }
  friend Var unary(double v, const Var& a, double da) {
    if (!a.active()) return Var(v);
    return Var(v, a.tape->push(a.idx, da), a.tape);
  }

  friend Var operator-(const Var& a) { return unary(-a.v, a, -1.0); }
  friend Var operator+(const Var& a, const Var& b) { return binary(a.v + b.v, a, 1.0, b, 1.0); }
  friend Var operator-(const Var& a, const Var& b) { return binary(a.v - b.v, a, 1.0, b, -1.0); }
  friend Var operator*(const Var& a, const Var& b) { return binary(a.v * b.v, a, b.v, b, a.v); }
  friend Var operator/(const Var& a, const Var& b) {
    if (b.v == 0.0) domain_flag() = true;
    double inv = 1.0 / b.v;
    return binary(a.v * inv, a, inv, b, -a.v * inv * inv);
  }
  friend Var operator+(const Var& a, double b) { return unary(a.v + b, a, 1.0); }
  friend Var operator+(double b, const Var& a) { return unary(a.v + b, a, 1.0); }
  friend Var operator-(const Var& a, double b) { return unary(a.v - b, a, 1.0); }
  friend Var operator-(double b, const Var& a) { return unary(b - a.v, a, -1.0); }
  friend Var operator*(const Var& a, double b) { return unary(a.v * b, a, b); }
  friend Var operator*(double b, const Var& a) { return unary(a.v * b, a, b); }
  friend Var operator/(const Var& a, double b) { return unary(a.v / b, a, 1.0 / b); }
  friend Var operator/(double b, const Var& a) { return unary(b / a.v, a, -b / (a.v * a.v)); }

  friend bool operator<(const Var& a, const Var& b) { return a.v < b.v; }
  friend bool operator>(const Var& a, const Var& b) { return a.v > b.v; }
  friend bool operator<=(const Var& a, const Var& b) { return a.v <= b.v; }
  friend bool operator>=(const Var& a, const Var& b) { return a.v >= b.v; }
  friend bool operator==(const Var& a, const Var& b) { return a.v == b.v; }
};

template <>
struct is_dual<Var> : std::true_type {};

inline double value_of(const Var& x) { return x.v; }

inline Var exp(const Var& a) {
  double e = std::exp(a.v);
  return unary(e, a, e);
}
inline Var log(const Var& a) {
  if (!(a.v > 0.0)) domain_flag() = true;
  return unary(std::log(a.v), a, 1.0 / a.v);
}
inline Var sqrt(const Var& a) {
  if (!(a.v > 0.0)) domain_flag() = true;
  double s = std::sqrt(a.v);
  return unary(s, a, 0.5 / s);
}
inline Var pow(const Var& a, double p) { return unary(std::pow(a.v, p), a, p * std::pow(a.v, p - 1.0)); }
inline Var sin(const Var& a) { return unary(std::sin(a.v), a, std::cos(a.v)); }
inline Var cos(const Var& a) { return unary(std::cos(a.v), a, -std::sin(a.v)); }
inline Var norm_pdf(const Var& a) {
  double p = norm_pdf(a.v);
  return unary(p, a, -a.v * p);
}
inline Var norm_cdf(const Var& a) { return unary(norm_cdf(a.v), a, norm_pdf(a.v)); }
inline Var dirac_k(const Var& x, int k, const DiracParam& dp) {
  return unary(dirac_k(x.v, k, dp), x, dirac_k(x.v, k + 1, dp));
}

// Convenience: gradient of `out` with respect to `inputs`.
inline std::vector<double> reverse_gradient(const Tape& t, const Var& out, std::span<const Var> inputs) {
  std::vector<int> idx;
  idx.reserve(inputs.size());
  for (const auto& v : inputs) idx.push_back(v.idx);
  return t.gradient(out.active() ? out.idx : -1, idx);
}

}  // namespace greeks::ad
