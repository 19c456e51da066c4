#pragma once

#include <variant>

#include "greeks/models/bs1d.hpp"
#include "greeks/models/euler.hpp"
#include "greeks/models/gbm_corr.hpp"
#include "greeks/models/heston.hpp"
#include "greeks/models/validate.hpp"

namespace greeks::models {

inline Bs1d bs1d(double x0, double r, double sigma) {
  if (!(x0 > 0.0) || !(sigma >= 0.0)) throw DomainError("bs1d needs x0 > 0 and sigma >= 0");
  Bs1d m{x0, r, sigma};
  require_valid_partials(m);
  return m;
}

inline GbmCorr gbm_corr(std::vector<double> x0, std::vector<double> sigma, double r,
                        const math::CorrelationMatrix& c) {
  const int d = static_cast<int>(x0.size());
  if (d < 1 || d > kMaxDim) throw DomainError("gbm_corr dimension must be in [1, 8]");
  if (static_cast<int>(sigma.size()) != d || c.dim() != d) throw DomainError("gbm_corr size mismatch");
  GbmCorr m(std::move(x0), std::move(sigma), r, c);
  require_valid_partials(m);
  return m;
}

inline LogGbmCorr log_gbm_corr(std::vector<double> x0, std::vector<double> sigma, double r,
                               const math::CorrelationMatrix& c) {
  LogGbmCorr m(gbm_corr(std::move(x0), std::move(sigma), r, c));
  require_valid_partials(m);
  return m;
}

inline Heston heston(double x0, double v0, double r, double kappa, double eta, double xi, double rho) {
  if (!(x0 > 0.0) || !(v0 >= 0.0) || !(xi >= 0.0) || !(std::fabs(rho) < 1.0))
    throw DomainError("heston needs x0 > 0, v0 >= 0, xi >= 0, |rho| < 1");
  Heston m{x0, v0, r, kappa, eta, xi, rho};
  require_valid_partials(m);
  return m;
}

using AnyModel = std::variant<Bs1d, GbmCorr, LogGbmCorr, Heston>;

}  // namespace greeks::models
