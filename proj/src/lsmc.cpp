#include "greeks/american/lsmc.hpp"

#include <cmath>

namespace greeks::american {

void Basis::eval(double x, double* out) const {
  const double u = x / scale;
  double v = 1.0;
  for (int k = 0; k <= degree; ++k) {
    out[k] = v;
    v *= u;
  }
}

double ExercisePolicy::continuation(int k, double x) const {
  const Eigen::VectorXd& c = coefficients.at(k);
  if (c.size() == 0) return 0.0;
  double psi[16];
  basis.eval(exp_state ? std::exp(x) : x, psi);
  double s = 0.0;
  for (int i = 0; i < c.size(); ++i) s += c[i] * psi[i];
  return s;
}

math::LeastSquaresResult regress(const Basis& basis, const std::vector<double>& xs, const std::vector<double>& targets,
                                 const std::vector<char>& use) {
  if (basis.degree < 0 || basis.degree > 15) throw DomainError("basis degree must be in [0, 15]");
  std::size_t rows = 0;
  for (char u : use) rows += u ? 1 : 0;
  const int r = basis.size();
  Eigen::MatrixXd a(rows, r);
  Eigen::VectorXd b(rows);
  std::size_t i = 0;
  for (std::size_t p = 0; p < xs.size(); ++p) {
    if (!use[p]) continue;
    double psi[16];
    basis.eval(xs[p], psi);
    for (int c = 0; c < r; ++c) a(i, c) = psi[c];
    b[i] = targets[p];
    ++i;
  }
  if (rows == 0) return {Eigen::VectorXd::Zero(r), 0, true};
  return math::solve_least_squares(a, b);
}

}  // namespace greeks::american
