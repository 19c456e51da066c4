#pragma once

#include <Eigen/Dense>

namespace greeks::math {

// Symmetric, unit-diagonal, positive definite.  Checked on construction.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Eigen::MatrixXd c);
  static CorrelationMatrix identity(int d);

  int dim() const { return static_cast<int>(c_.rows()); }
  const Eigen::MatrixXd& matrix() const { return c_; }
  double operator()(int i, int j) const { return c_(i, j); }

 private:
  Eigen::MatrixXd c_;
};

// Lower-triangular L with L L^T = c.  Throws NotPositiveDefinite.
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& c);
inline Eigen::MatrixXd cholesky(const CorrelationMatrix& c) { return cholesky(c.matrix()); }

struct LeastSquaresResult {
  Eigen::VectorXd coefficients;
  int rank = 0;
  bool rank_deficient = false;
};

// Complete orthogonal decomposition (QR with column pivoting); returns the
// minimum-norm solution and flags rank deficiency.
LeastSquaresResult solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets);

}  // namespace greeks::math
