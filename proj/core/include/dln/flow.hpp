#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "dln/depth.hpp"
#include "dln/linalg.hpp"
#include "dln/problem.hpp"

namespace dln {

/// Fixed-step integration settings for the gradient flow in singular coordinates.
struct FlowConfig {
  Depth depth = Depth::infinite();
  double dt = 0.01;
  double max_time = 1200.0;
  double energy_tol = 1e-15;
  double gap_tol = kDefaultGapTol;
  /// Step halvings attempted when a step hits a degenerate spectrum or an
  /// unstable rotation before the run is abandoned.
  int max_halvings = 10;
  /// sigma_d below this ends a full-rank run with RankCollapse.
  double rank_floor = 1e-300;
  /// Keep exactly-zero singular values at zero and integrate on the manifold
  /// of fixed rank. Requires finite depth > 1.
  bool fixed_rank = false;

  void validate() const;
};

enum class Termination { Converged, HorizonReached, DegenerateSpectrum, RankCollapse };

std::string to_string(Termination t);
Termination termination_from_string(const std::string& text);

/// Time derivative of (U, Sigma, V).
struct SvdDerivative {
  Matrix u_dot;
  Vector sigma_dot;
  Matrix v_dot;
};

/// Right-hand side of the gradient flow in singular coordinates:
///   U' = U s((L Sigma) o P),  Sigma' = -Sigma^(2 alpha) diag(P),  V' = V s((Sigma L) o P)
/// with P = U^T dE V, s(M) = M - M^T, L_il = lambda_il / (sigma_i^2 - sigma_l^2).
/// Throws DegenerateSpectrum when a squared gap is below gap_tol and
/// RankCollapse when a singular value is not positive (zero is accepted when
/// allow_zero_sigma is set, as on the fixed-rank manifold).
SvdDerivative svd_flow_rhs(const Depth& depth, const SvdState& state,
                           const CompletionProblem& problem, double gap_tol = kDefaultGapTol,
                           bool allow_zero_sigma = false);

/// Outcome of one integration.
struct RunRecord {
  std::uint64_t seed = 0;
  SvdState final_state;
  double final_energy = 0.0;
  double effective_rank = 0.0;
  std::int64_t steps = 0;
  double final_time = 0.0;
  Termination terminated = Termination::HorizonReached;
};

/// Called at t = 0 and after every accepted step.
using StepObserver = std::function<void(std::int64_t step, double t, const SvdState& state)>;

/// Classic RK4 on O(d) x R^d x O(d) with QR re-orthonormalization after every
/// step and re-sorting of sigma. Degenerate or unstable steps are retried with
/// halved sub-steps up to config.max_halvings times; if that fails the run ends
/// with the corresponding Termination instead of throwing.
///
/// w0 must be square, finite and (unless fixed_rank) invertible with distinct
/// singular values; violations throw before any step is taken.
RunRecord integrate(const FlowConfig& config, const CompletionProblem& problem, const Matrix& w0,
                    std::uint64_t seed = 0, const StepObserver& observer = {});

/// Same, starting from explicit singular coordinates (any sign branch).
RunRecord integrate(const FlowConfig& config, const CompletionProblem& problem,
                    const SvdState& initial, std::uint64_t seed = 0,
                    const StepObserver& observer = {});

}  // namespace dln
