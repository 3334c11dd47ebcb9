#pragma once

#include "dln/depth.hpp"
#include "dln/linalg.hpp"

namespace dln {

/// Eigenvalues lambda_il of the depth-N operator A_{N,W}; the eigenvector for
/// (i, l) is U E_il V^T. The table is symmetric.
struct SpectrumTable {
  Depth depth = Depth::infinite();
  Vector sigma;
  Matrix lambda;
};

/// Single eigenvalue from squared singular values si2, sl2 >= 0.
///
/// Finite N uses the geometric-sum closed form, rewritten with expm1 so that
/// it stays accurate when the ratio is near one, and falls back to the explicit
/// N-term sum when the log ratio is below 1e-8. Infinite depth uses the
/// logarithmic mean, switching to a three-term series when |log(si/sl)| < 1e-6.
/// Zero arguments are allowed here (the rank-one flow needs them); the
/// infinite-depth value at a zero argument is 0.
double metric_eigenvalue(const Depth& depth, double si2, double sl2);

/// Full table for a positive spectrum. Throws InvalidArgument on sigma <= 0.
SpectrumTable eigenvalues(const Depth& depth, const Vector& sigma);

/// Riemannian gradient U (Lambda o (U^T G V)) V^T, i.e. A_{N,W}(G), evaluated
/// elementwise in the singular basis. No d^2 x d^2 matrix is formed.
Matrix apply_metric_dual(const SpectrumTable& table, const SvdState& state,
                         const Matrix& euclid_grad);

/// Log density of the depth-N volume form with respect to dSigma dU dV.
/// sigma must be positive and strictly descending; repeated values raise
/// DegenerateSpectrum rather than returning -inf.
double log_volume_density(const Depth& depth, const Vector& sigma);

/// Log density of the volume form with respect to Lebesgue measure dW. The
/// single-argument overload is the infinite-depth form used for heatmaps and
/// Monte Carlo volume estimates.
double log_volume_density_dW(const Vector& sigma);
double log_volume_density_dW(const Depth& depth, const Vector& sigma);

/// Volume density N / sigma^(3(N-1)/N) of the metric restricted to rank-one
/// 2x2 matrices. Only defined for finite depth.
double rank_one_volume_density(const Depth& depth, double sigma);

}  // namespace dln
