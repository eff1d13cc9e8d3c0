#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bilinctl/errors.hpp"
#include "bilinctl/matlie.hpp"
#include "bilinctl/model.hpp"
#include "oracles.hpp"

namespace bilinctl {
namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

TEST(Bracket, KnownValue) {
  const Matrix j = mat2(0, -1, 1, 0);
  const Matrix d = mat2(1, 0, 0, -1);
  EXPECT_TRUE(bracket(j, d).isApprox(mat2(0, 2, 2, 0)));
  EXPECT_TRUE(bracket(j, j).isZero());
}

TEST(Bracket, RejectsBadShapes) {
  EXPECT_THROW(bracket(Matrix::Zero(2, 3), Matrix::Zero(2, 3)), InvalidInput);
  EXPECT_THROW(bracket(Matrix::Zero(2, 2), Matrix::Zero(3, 3)), InvalidInput);
}

TEST(LieClosure, CorpusDimensions) {
  EXPECT_EQ(lie_closure(builtin_corpus("so3").family().matrices).dim(), 3);
  EXPECT_EQ(lie_closure(builtin_corpus("planar_jd").family().matrices).dim(), 3);
  EXPECT_EQ(lie_closure(builtin_corpus("expanding_pair").family().matrices).dim(), 4);
  EXPECT_EQ(lie_closure(builtin_corpus("identity_only").family().matrices).dim(), 1);
}

TEST(LieClosure, BasisIsOrthonormal) {
  const LieBasis b = lie_closure(builtin_corpus("planar_jd").family().matrices);
  for (int i = 0; i < b.dim(); ++i) {
    for (int j = 0; j < b.dim(); ++j) {
      EXPECT_NEAR(frobenius_dot(b.basis[i], b.basis[j]), i == j ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(LieClosure, DepthAndConvergence) {
  Matrix e12 = Matrix::Zero(3, 3);
  Matrix e23 = Matrix::Zero(3, 3);
  e12(0, 1) = 1;
  e23(1, 2) = 1;
  const std::vector<Matrix> heis{e12, e23};
  const LieBasis b = lie_closure(heis);
  EXPECT_EQ(b.dim(), 3);
  EXPECT_EQ(b.depth, 2);
  EXPECT_TRUE(b.converged);

  const LieBasis capped = lie_closure(heis, kDefaultRankTol, 0);
  EXPECT_EQ(capped.dim(), 2);
  EXPECT_FALSE(capped.converged);
}

TEST(LieClosure, MatchesExactRationalOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> entry(-2, 2);
  std::bernoulli_distribution sparse(0.6);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 3;
    const int m = 1 + trial % 2 + (trial % 5 == 0);
    std::vector<Eigen::MatrixXi> ints;
    std::vector<Matrix> reals;
    for (int k = 0; k < m; ++k) {
      Eigen::MatrixXi g(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = sparse(rng) ? 0 : entry(rng);
      // Upper-triangular trials exercise solvable algebras of small dimension.
      if (trial % 4 == 1) g.triangularView<Eigen::StrictlyLower>().setZero();
      ints.push_back(g);
      reals.push_back(g.cast<double>());
    }
    bool any_nonzero = false;
    for (const auto& g : ints) any_nonzero = any_nonzero || g.any();
    if (!any_nonzero) continue;
    EXPECT_EQ(lie_closure(reals).dim(), oracle::exact_lie_dimension(ints))
        << "trial " << trial;
  }
}

TEST(LieClosure, RejectsBadInput) {
  const std::vector<Matrix> none;
  EXPECT_THROW(lie_closure(none), InvalidInput);
  const std::vector<Matrix> mixed{Matrix::Identity(2, 2), Matrix::Identity(3, 3)};
  EXPECT_THROW(lie_closure(mixed), InvalidInput);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  const std::vector<Matrix> nan{bad};
  EXPECT_THROW(lie_closure(nan), InvalidInput);
}

TEST(NumericalRank, RelativeCutoff) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = 1e-6;
  m(2, 2) = 1e-12;
  Vector sv;
  EXPECT_EQ(numerical_rank(m, 1e-9, &sv), 2);
  EXPECT_DOUBLE_EQ(sv(0), 1.0);
  EXPECT_EQ(numerical_rank(m, 1e-3), 1);
  EXPECT_EQ(numerical_rank(Matrix::Zero(2, 2), 1e-9), 0);
}

TEST(EvaluateAt, So3HasRankTwoEverywhere) {
  const LieBasis b = lie_closure(builtin_corpus("so3").family().matrices);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vector x = oracle::random_unit(3, rng);
    const SubspaceReport r = evaluate_at(b, x);
    EXPECT_EQ(r.dim, 2);
    EXPECT_EQ(r.vectors.cols(), 3);
  }
  EXPECT_THROW(evaluate_at(b, Vector::Zero(3)), InvalidInput);
  EXPECT_THROW(evaluate_at(b, Vector::Ones(2)), InvalidInput);
}

TEST(MatrixExponential, RotationClosedForm) {
  const Matrix j = mat2(0, -1, 1, 0);
  for (double t : {0.0, 0.3, 1.0, 3.14159, -2.5, 40.0}) {
    EXPECT_TRUE(matrix_exponential(j, t).isApprox(oracle::rotation(t), 1e-12)) << t;
  }
}

TEST(MatrixExponential, MatchesTaylorOracle) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const Matrix a = oracle::random_matrix(2 + k % 4, rng);
    const Matrix ref = oracle::taylor_exp(a);
    EXPECT_LE((matrix_exponential(a) - ref).norm(), 1e-11 * ref.norm()) << k;
  }
}

TEST(MatrixExponential, OverflowIsNumericalFailure) {
  EXPECT_THROW(matrix_exponential(Matrix::Identity(2, 2), 1e4), NumericalFailure);
  EXPECT_THROW(matrix_exponential(Matrix::Zero(2, 3)), InvalidInput);
}

}  // namespace
}  // namespace bilinctl
