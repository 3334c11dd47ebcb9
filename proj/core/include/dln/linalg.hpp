#pragma once

#include <Eigen/Dense>

namespace dln {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Smallest accepted separation of squared singular values.
inline constexpr double kDefaultGapTol = 1e-12;

/// Throws InvalidArgument if m is not square or has a NaN/Inf entry.
void require_square_finite(const Matrix& m, const char* what);

/// Singular coordinates W = U diag(sigma) V^T with sigma sorted descending.
struct SvdState {
  Matrix u;
  Vector sigma;
  Matrix v;

  Eigen::Index dim() const { return sigma.size(); }
  Matrix reconstruct() const;
};

/// Dense SVD with a platform-independent branch choice: singular values are
/// descending and every left singular vector has its largest-magnitude entry
/// positive (first index wins ties). The matching right vector is flipped
/// along with it.
SvdState svd(const Matrix& m);

/// Applies the sign convention of svd() to an existing factor pair in place.
void canonicalize_signs(Matrix& u, Matrix& v);

/// Largest deviation from the SvdState invariants: orthogonality defects of
/// U and V, ordering and sign of sigma. Zero for an exact decomposition.
double svd_state_defect(const SvdState& s);

/// Product over i < j of (values_i - values_j).
double vandermonde(const Vector& values);

/// First-order motion of the singular coordinates along W + t * wdot.
struct SvdRates {
  Vector sigma_dot;
  Matrix u_dot;
  Matrix v_dot;
};

/// Smooth-SVD perturbation formulas. Requires sigma_i^2 - sigma_j^2 >= gap_tol
/// for every i < j, otherwise throws DegenerateSpectrum naming the pair.
SvdRates svd_perturbation(const SvdState& state, const Matrix& wdot,
                          double gap_tol = kDefaultGapTol);

/// |det| of (A^U, D, A^V) -> A^U Sigma + D + Sigma A^V, assembled column by
/// column as a d^2 x d^2 matrix and factorized numerically. Analytically this
/// equals vandermonde(sigma^2); the routine exists to check that claim.
double svd_jacobian_oracle(const SvdState& state, double gap_tol = kDefaultGapTol);

}  // namespace dln
