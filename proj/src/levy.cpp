#include "greeks/analytics/levy.hpp"

#include <cmath>

#include "greeks/ad/dual.hpp"
#include "greeks/errors.hpp"

namespace greeks::analytics {

LevyGreek parse_levy_greek(const std::string& s) {
  if (s == "price") return LevyGreek::Price;
  if (s == "delta") return LevyGreek::Delta;
  if (s == "gamma") return LevyGreek::Gamma;
  throw DomainError("unknown basket greek '" + s + "'");
}

double levy_basket(const std::vector<double>& w, const std::vector<double>& x0, const std::vector<double>& sigma,
                   const math::CorrelationMatrix& corr, double r, double t, double k, LevyGreek which,
                   int asset) {
  const int d = static_cast<int>(w.size());
  if (d < 1 || static_cast<int>(x0.size()) != d || static_cast<int>(sigma.size()) != d || corr.dim() < d)
    throw DomainError("levy_basket size mismatch");
  if (!(t > 0.0) || !(k > 0.0)) throw DomainError("levy_basket needs T > 0 and K > 0");
  for (int i = 0; i < d; ++i)
    if (!(w[i] > 0.0) || !(x0[i] > 0.0) || !(sigma[i] > 0.0))
      throw DomainError("levy_basket needs positive weights, spots and volatilities");
  if (asset < 0 || asset >= d) throw DomainError("levy_basket asset index out of range");

  using H = ad::HyperDual<double, 1>;
  using ad::norm_cdf;
  using std::log;
  using std::sqrt;
  std::vector<H> x(x0.begin(), x0.end());
  x[asset] = H::variable(x0[asset], 0);

  const double g = std::exp(r * t);
  H m1(0.0), m2(0.0);
  for (int i = 0; i < d; ++i) {
    m1 += w[i] * x[i] * g;
    for (int j = 0; j < d; ++j)
      m2 += w[i] * w[j] * x[i] * x[j] * std::exp((2.0 * r + corr(i, j) * sigma[i] * sigma[j]) * t);
  }
  H v2t = log(m2 / (m1 * m1));
  H sd = sqrt(v2t);
  H d1 = (log(m1 / k) + 0.5 * v2t) / sd;
  H d2 = d1 - sd;
  H price = std::exp(-r * t) * (m1 * norm_cdf(d1) - k * norm_cdf(d2));
  switch (which) {
    case LevyGreek::Price:
      return price.v;
    case LevyGreek::Delta:
      return price.g[0];
    case LevyGreek::Gamma:
      return price.hess(0, 0);
  }
  return 0.0;
}

}  // namespace greeks::analytics
