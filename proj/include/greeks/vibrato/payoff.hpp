#pragma once

#include <string>
#include <vector>

#include "greeks/ad/nonsmooth.hpp"
#include "greeks/errors.hpp"

namespace greeks::vibrato {

// Payoffs observe the leading `arity()` state components.  Nonsmooth parts
// go through ramp/heaviside so every scalar kind gets sensible derivatives.
struct Payoff {
  enum class Kind { Call, Put, DigitalUp, DigitalDown, BasketCall, Constant, Linear };

  Kind kind = Kind::Call;
  double strike = 0.0;
  double constant = 0.0;
  std::vector<double> weights;  // basket only
  ad::DiracParam dirac;
  // The state holds log prices; the payoff sees exp(x).
  bool exp_state = false;

  static Payoff make(Kind k, double strike, double c = 0.0) {
    Payoff p;
    p.kind = k;
    p.strike = strike;
    p.constant = c;
    return p;
  }
  static Payoff call(double k) { return make(Kind::Call, k); }
  static Payoff put(double k) { return make(Kind::Put, k); }
  static Payoff digital_up(double k) { return make(Kind::DigitalUp, k); }
  static Payoff digital_down(double k) { return make(Kind::DigitalDown, k); }
  static Payoff constant_value(double c) { return make(Kind::Constant, 0.0, c); }
  static Payoff linear() { return make(Kind::Linear, 0.0); }
  static Payoff basket_call(std::vector<double> w, double k) {
    Payoff p = make(Kind::BasketCall, k);
    p.weights = std::move(w);
    return p;
  }

  int arity() const { return kind == Kind::BasketCall ? static_cast<int>(weights.size()) : 1; }
  bool is_digital() const { return kind == Kind::DigitalUp || kind == Kind::DigitalDown; }
  bool is_constant() const { return kind == Kind::Constant; }

  template <class S>
  S operator()(const S* x) const {
    if (exp_state) {
      using std::exp;
      S ex[8];
      const int m = arity();
      for (int k = 0; k < m && k < 8; ++k) ex[k] = exp(x[k]);
      return eval(ex);
    }
    return eval(x);
  }

  template <class S>
  S eval(const S* x) const {
    switch (kind) {
      case Kind::Call:
        return ad::ramp(x[0] - strike, dirac);
      case Kind::Put:
        return ad::ramp(strike - x[0], dirac);
      case Kind::DigitalUp:
        return ad::heaviside(x[0] - strike, dirac);
      case Kind::DigitalDown:
        return ad::heaviside(strike - x[0], dirac);
      case Kind::BasketCall: {
        S s(-strike);
        for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * x[k];
        return ad::ramp(s, dirac);
      }
      case Kind::Constant:
        return S(constant);
      case Kind::Linear:
        return x[0];
    }
    return S(0.0);
  }

  std::string name() const {
    switch (kind) {
      case Kind::Call: return "call";
      case Kind::Put: return "put";
      case Kind::DigitalUp: return "digital_up";
      case Kind::DigitalDown: return "digital_down";
      case Kind::BasketCall: return "basket_call";
      case Kind::Constant: return "constant";
      case Kind::Linear: return "linear";
    }
    return "?";
  }
};

}  // namespace greeks::vibrato
