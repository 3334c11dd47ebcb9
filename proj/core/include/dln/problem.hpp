#pragma once

#include "dln/linalg.hpp"

namespace dln {

/// Masked quadratic completion loss E(W) = 1/2 |mask o (phi - W)|^2.
/// Entries of phi outside the mask are ignored.
struct CompletionProblem {
  Matrix phi;
  Matrix mask;

  /// Throws InvalidArgument unless phi and mask are square, finite, the same
  /// size, and the mask is exactly 0/1.
  void validate() const;

  Eigen::Index dim() const { return phi.rows(); }
  /// Number of unobserved entries (zeros in the mask).
  Eigen::Index unobserved_count() const;
  /// True when mask o (phi - w) vanishes to within tol in max norm.
  bool is_minimizer(const Matrix& w, double tol = 0.0) const;
};

double loss(const CompletionProblem& problem, const Matrix& w);

/// Euclidean gradient -mask o (phi - w).
Matrix euclid_grad(const CompletionProblem& problem, const Matrix& w);

}  // namespace dln
