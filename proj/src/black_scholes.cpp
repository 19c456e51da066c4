#include "greeks/analytics/black_scholes.hpp"

#include "greeks/errors.hpp"

namespace greeks::analytics {

namespace {

void check(double x0, double k, double sigma, double t) {
  if (!(x0 > 0.0) || !(k > 0.0) || !(sigma > 0.0) || !(t > 0.0))
    throw DomainError("Black-Scholes needs X0, K, sigma, T > 0");
}

using D1 = ad::Dual<double, 1>;

}  // namespace

BsGreek parse_bs_greek(const std::string& s) {
  if (s == "price") return BsGreek::Price;
  if (s == "delta") return BsGreek::Delta;
  if (s == "gamma") return BsGreek::Gamma;
  if (s == "vega") return BsGreek::Vega;
  if (s == "rho") return BsGreek::Rho;
  if (s == "theta") return BsGreek::Theta;
  if (s == "vanna") return BsGreek::Vanna;
  if (s == "vomma") return BsGreek::Vomma;
  if (s == "speed") return BsGreek::Speed;
  if (s == "third-cross" || s == "third_cross") return BsGreek::ThirdCross;
  throw DomainError("unknown Black-Scholes greek '" + s + "'");
}

double bs_closed_form(double x0, double k, double sigma, double r, double t, BsGreek which) {
  check(x0, k, sigma, t);
  const double srt = sigma * std::sqrt(t);
  const double d1 = (std::log(x0 / k) + (r + 0.5 * sigma * sigma) * t) / srt;
  switch (which) {
    case BsGreek::Price:
      return bs_call_price(x0, k, sigma, r, t);
    case BsGreek::Delta:
      return ad::norm_cdf(d1);
    case BsGreek::Gamma:
      return ad::norm_pdf(d1) / (x0 * srt);
    case BsGreek::Vega:
      return x0 * ad::norm_pdf(d1) * std::sqrt(t);
    case BsGreek::Rho:
    case BsGreek::Theta: {
      auto g = bs_gradient(x0, k, sigma, r, t);
      return which == BsGreek::Rho ? g[2] : g[3];
    }
    case BsGreek::Vanna:
      return bs_hessian(x0, k, sigma, r, t)[0 * 4 + 1];
    case BsGreek::Vomma:
      return bs_hessian(x0, k, sigma, r, t)[1 * 4 + 1];
    case BsGreek::Speed: {
      using H = ad::HyperDual<D1, 1>;
      H x = H::variable(D1::variable(x0, 0), 0);
      H p = bs_call_price(x, k, H(sigma), H(r), H(t));
      return p.hess(0, 0).d[0];
    }
    case BsGreek::ThirdCross: {
      using H = ad::HyperDual<D1, 2>;
      H x = H::variable(D1(x0), 0);
      H s = H::variable(D1(sigma), 1);
      H rr = H(D1::variable(r, 0));
      H p = bs_call_price(x, k, s, rr, H(t));
      return p.hess(0, 1).d[0];
    }
  }
  return 0.0;
}

std::array<double, 16> bs_hessian(double x0, double k, double sigma, double r, double t) {
  check(x0, k, sigma, t);
  using H = ad::HyperDual<double, 4>;
  H p = bs_call_price(H::variable(x0, 0), k, H::variable(sigma, 1), H::variable(r, 2), H::variable(t, 3));
  return p.h;
}

std::array<double, 4> bs_gradient(double x0, double k, double sigma, double r, double t) {
  check(x0, k, sigma, t);
  using D = ad::Dual<double, 4>;
  D p = bs_call_price(D::variable(x0, 0), k, D::variable(sigma, 1), D::variable(r, 2), D::variable(t, 3));
  return p.d;
}

double bs_terminal_density(double x0, double sigma, double r, double t, double y) {
  const double s = sigma * std::sqrt(t);
  const double m = std::log(x0) + (r - 0.5 * sigma * sigma) * t;
  const double u = (std::log(y) - m) / s;
  return ad::norm_pdf(u) / (y * s);
}

}  // namespace greeks::analytics
