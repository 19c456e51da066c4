#include "greeks/math/linalg.hpp"

#include <cmath>
#include <string>

#include "greeks/errors.hpp"

namespace greeks::math {

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd c) : c_(std::move(c)) {
  if (c_.rows() != c_.cols() || c_.rows() == 0) throw DomainError("correlation matrix must be square");
  for (Eigen::Index i = 0; i < c_.rows(); ++i) {
    if (c_(i, i) != 1.0) throw DomainError("correlation matrix needs a unit diagonal");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (c_(i, j) != c_(j, i)) throw DomainError("correlation matrix is not symmetric");
      if (std::fabs(c_(i, j)) > 1.0) throw DomainError("correlation entry outside [-1,1]");
    }
  }
  cholesky(c_);
}

CorrelationMatrix CorrelationMatrix::identity(int d) {
  return CorrelationMatrix(Eigen::MatrixXd::Identity(d, d));
}

Eigen::MatrixXd cholesky(const Eigen::MatrixXd& c) {
  if (c.rows() != c.cols()) throw DomainError("cholesky needs a square matrix");
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("matrix is not positive definite");
  Eigen::MatrixXd l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    if (!(l(i, i) > 0.0)) throw NotPositiveDefinite("nonpositive pivot at " + std::to_string(i));
  return l;
}

LeastSquaresResult solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets) {
  if (design.rows() != targets.size()) throw DomainError("design/target size mismatch");
  if (design.rows() < design.cols()) throw DomainError("least squares needs M >= R");
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  LeastSquaresResult out;
  out.coefficients = cod.solve(targets);
  out.rank = static_cast<int>(cod.rank());
  out.rank_deficient = out.rank < design.cols();
  return out;
}

}  // namespace greeks::math
