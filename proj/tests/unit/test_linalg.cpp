#include <gtest/gtest.h>

#include <stdexcept>

#include "greeks/errors.hpp"
#include "greeks/math/linalg.hpp"
#include "greeks/math/parallel.hpp"
#include "greeks/math/rng.hpp"

using namespace greeks;

TEST(Cholesky, ReconstructsMatrix) {
  Eigen::MatrixXd c(3, 3);
  c << 1.0, 0.5, 0.2, 0.5, 1.0, 0.3, 0.2, 0.3, 1.0;
  Eigen::MatrixXd l = math::cholesky(c);
  EXPECT_LT((l * l.transpose() - c).norm(), 1e-14);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) EXPECT_EQ(l(i, j), 0.0);
}

TEST(Cholesky, RejectsIndefinite) {
  Eigen::MatrixXd c(2, 2);
  c << 1.0, 1.2, 1.2, 1.0;
  EXPECT_THROW(math::cholesky(c), NotPositiveDefinite);
}

TEST(CorrelationMatrix, Validates) {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.3, 0.2, 1.0;
  EXPECT_ANY_THROW(math::CorrelationMatrix{asym});
  Eigen::MatrixXd diag(2, 2);
  diag << 2.0, 0.0, 0.0, 1.0;
  EXPECT_ANY_THROW(math::CorrelationMatrix{diag});
  EXPECT_EQ(math::CorrelationMatrix::identity(4).dim(), 4);
}

TEST(LeastSquares, RecoversPolynomial) {
  const int n = 50;
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double x = -1.0 + 2.0 * i / (n - 1);
    a(i, 0) = 1.0;
    a(i, 1) = x;
    a(i, 2) = x * x;
    b[i] = 0.5 - 2.0 * x + 3.0 * x * x;
  }
  auto r = math::solve_least_squares(a, b);
  EXPECT_FALSE(r.rank_deficient);
  EXPECT_EQ(r.rank, 3);
  EXPECT_NEAR(r.coefficients[0], 0.5, 1e-12);
  EXPECT_NEAR(r.coefficients[1], -2.0, 1e-12);
  EXPECT_NEAR(r.coefficients[2], 3.0, 1e-12);
}

TEST(LeastSquares, FlagsRankDeficiency) {
  Eigen::MatrixXd a(4, 2);
  a << 1, 2, 2, 4, 3, 6, 4, 8;
  Eigen::VectorXd b(4);
  b << 1, 2, 3, 4;
  auto r = math::solve_least_squares(a, b);
  EXPECT_TRUE(r.rank_deficient);
  EXPECT_EQ(r.rank, 1);
  EXPECT_LT((a * r.coefficients - b).norm(), 1e-12);
}

namespace {

math::PathRunOutput normals(std::uint64_t M, int threads) {
  return math::run_paths(M, 2, threads, [] {
    return [](std::uint64_t p, std::span<double> o) {
      math::RngStream rs(5, p);
      o[0] = rs.normal();
      o[1] = o[0] * o[0];
      return p % 1000 != 999;
    };
  });
}

}  // namespace

TEST(RunPaths, BitwiseIndependentOfThreads) {
  auto a = normals(20000, 1), b = normals(20000, 3), c = normals(20000, 8);
  EXPECT_EQ(a.stats[0].mean(), b.stats[0].mean());
  EXPECT_EQ(a.stats[1].variance(), c.stats[1].variance());
  EXPECT_EQ(a.rejected, 20u);
  EXPECT_EQ(a.stats[0].n, 19980u);
}

TEST(RunPaths, PropagatesExceptions) {
  auto run = [] {
    math::run_paths(10000, 1, 4, [] {
      return [](std::uint64_t p, std::span<double> o) -> bool {
        if (p == 4321) throw StateBlowup("boom");
        o[0] = 1.0;
        return true;
      };
    });
  };
  EXPECT_THROW(run(), StateBlowup);
}

TEST(NeumaierSum, CompensatesCancellation) {
  math::NeumaierSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  EXPECT_EQ(s.value(), 2.0);
}
