#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "dln/depth.hpp"
#include "dln/linalg.hpp"

namespace dln {

/// exp of the Shannon entropy of sigma / sum(sigma). Zero entries contribute
/// nothing. Throws InvalidArgument if the spectrum sums to zero or has a
/// negative entry.
double effective_rank(const Vector& sigma);

/// Linearized attraction rates toward the minimizer set at an equilibrium.
struct RateBounds {
  /// Eigenvalues of the principal submatrix of the dual metric, descending.
  Vector alphas;
  /// Squared singular values at the equilibrium, descending.
  Vector sigma_sq;
  /// Column-major vectorized indices of the observed entries.
  std::vector<Eigen::Index> observed;
};

/// Principal submatrix of (V kron U) diag(lambda) (V kron U)^T on the observed
/// (column-major) indices and its eigenvalues.
RateBounds attraction_rates(const Depth& depth, const SvdState& state, const Matrix& mask);

/// The d = 2, diagonal-mask ordering
///   sigma_2^2 <= alpha_2 <= lambda_12 <= alpha_1 <= sigma_1^2
/// checked with relative slack tol. Only meaningful for infinite depth.
bool satisfies_two_by_two_rate_chain(const RateBounds& rates, double tol = 1e-12);

/// Leading-order singular values of W(gamma) + eta * n(gamma) where W(gamma) is
/// the rank-one completion [[1, gamma], [1/gamma, 1]] and n its unit normal,
/// together with the infinite-depth log dW-density at that point.
struct HyperbolaPoint {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double log_density = 0.0;
};

HyperbolaPoint hyperbola_asymptotics(double gamma, double eta);

/// Coefficient sqrt(gamma^4 + 1) / (gamma^2 + 1) of eta in sigma_2.
double hyperbola_sigma2_coefficient(double gamma);

/// Rank-one point [[1, gamma], [1/gamma, 1]] and its unit normal direction.
Matrix hyperbola_point(double gamma);
Matrix hyperbola_normal(double gamma);

/// Observed entries of the 3x3 cycle completion problem, in the layout
///   [[p11, w12, p13], [p21, p22, w23], [w31, p32, p33]].
struct CyclePattern {
  double p11 = 0.0, p13 = 0.0, p21 = 0.0, p22 = 0.0, p32 = 0.0, p33 = 0.0;

  static CyclePattern from_matrix(const Matrix& phi);
  Matrix complete(double w12, double w23, double w31) const;
  /// Right-hand side of the rank-two relation after the first elimination step.
  double rank_two_residual(double w12, double w23, double w31) const;
  /// The distinguished completion (w12, w23, w31) at which both second-step
  /// pivots vanish.
  std::array<double, 3> distinguished_point() const;
  /// Whether any choice of the free entries gives rank one. The first
  /// elimination step fixes every free entry, which leaves one consistency
  /// condition on the observed entries.
  bool has_rank_one_completion(double rel_tol = 1e-12) const;
};

/// Solves the rank-two relation for w23. Throws InvalidArgument when p11 or the
/// pivot p22 - p21 w12 / p11 vanishes, or when the relation does not involve
/// w23 and is not satisfied. On the line through the distinguished point, where
/// any w23 works, returns the distinguished value p13 p21 / p11.
double rank_two_completion(const CyclePattern& phi, double w12, double w31);

/// Monte Carlo estimate of the mean volume density over an H-cube of the free
/// coordinates around a center, restricted to matrices with sigma_min > h.
struct McVolumeSpec {
  Matrix center;
  /// (row, col) of each free coordinate; the cube has one axis per entry.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> free_entries;
  double cube_width = 1e-3;   // H
  double sv_floor = 1e-5;     // h
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct McVolumeResult {
  double log_mean_density = 0.0;
  std::int64_t accepted = 0;
};

/// Log density evaluated on the singular values of each accepted sample.
using LogDensityFn = std::function<double(const Vector& sigma)>;

/// Samples are drawn in fixed blocks with per-block derived seeds and merged
/// by log-sum-exp in block order, so the result does not depend on jobs.
/// The default density is the infinite-depth dW form.
McVolumeResult mc_volume(const McVolumeSpec& spec, const LogDensityFn& log_density = {},
                         int jobs = 1);

}  // namespace dln
