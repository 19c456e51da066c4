#pragma once

#include <string>
#include <vector>

#include "greeks/math/linalg.hpp"

namespace greeks::analytics {

enum class LevyGreek { Price, Delta, Gamma };

LevyGreek parse_levy_greek(const std::string& name);

// Two-moment lognormal match of the weighted basket sum_i w_i X_i(T),
// priced as a call with Black's formula.  Delta and Gamma are taken with
// respect to X0[asset].
double levy_basket(const std::vector<double>& weights, const std::vector<double>& x0,
                   const std::vector<double>& sigma, const math::CorrelationMatrix& corr, double r, double t,
                   double k, LevyGreek which, int asset = 0);

}  // namespace greeks::analytics
