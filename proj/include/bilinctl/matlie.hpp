#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace bilinctl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default relative singular-value cutoff for numerical rank decisions.
inline constexpr double kDefaultRankTol = 1e-9;

/// Commutator AB - BA.
Matrix bracket(const Matrix& a, const Matrix& b);

/// Frobenius-orthonormal basis of the matrix Lie algebra generated by a
/// finite family.
struct LieBasis {
  int n = 0;
  std::vector<Matrix> basis;
  double tol = kDefaultRankTol;
  // Bracket nesting depth of the deepest admitted element (generators are 1).
  int depth = 0;
  // Number of breadth-first bracketing rounds run.
  int rounds = 0;
  // False when the round cap was hit while the last round still grew the
  // basis; closure is then unverified.
  bool converged = true;

  int dim() const { return static_cast<int>(basis.size()); }
};

/// Computes Lie(generators) by breadth-first bracketing of basis pairs.
///
/// A candidate direction is admitted only if its residual after projection
/// onto the current span exceeds `tol` times the largest norm seen so far
/// (generators, unit basis elements, and brackets). `depth_cap` bounds the
/// number of bracketing rounds; it defaults to 2n².
LieBasis lie_closure(std::span<const Matrix> generators,
                     double tol = kDefaultRankTol,
                     std::optional<int> depth_cap = std::nullopt);

/// Result of evaluating a matrix subspace at a point.
struct SubspaceReport {
  Matrix vectors;          // n × dim(basis); column k is basis[k] * x
  Vector singular_values;  // descending
  int dim = 0;
};

/// Numerical rank with singular values > tol * sigma_max.
int numerical_rank(const Eigen::Ref<const Matrix>& m, double tol,
                   Vector* singular_values = nullptr);

SubspaceReport evaluate_at(const LieBasis& basis, const Vector& x);

/// exp(t A). Throws NumericalFailure if the result is not finite.
Matrix matrix_exponential(const Matrix& a, double t = 1.0);

/// Frobenius inner product.
inline double frobenius_dot(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace bilinctl
