#pragma once

#include <cstdint>
#include <vector>

#include "dln/depth.hpp"
#include "dln/linalg.hpp"
#include "dln/problem.hpp"

namespace dln {

/// The N weight matrices of the network. Storage order follows the product:
/// layers[0] = W_N, ..., layers[N-1] = W_1.
struct WeightStack {
  std::vector<Matrix> layers;

  std::size_t depth() const { return layers.size(); }
  /// 1-based access in the network's own numbering (W_1 acts first).
  const Matrix& layer(std::size_t j) const { return layers[layers.size() - j]; }
  Matrix& layer(std::size_t j) { return layers[layers.size() - j]; }
  /// End-to-end product W_N ... W_1.
  Matrix product() const;
  void validate() const;
};

/// ||W_{j+1}^T W_{j+1} - W_j W_j^T||_F for j = 1..N-1.
std::vector<double> balance_residuals(const WeightStack& stack);

/// Balanced stack with product w: W_N = U S Q_{N-1}^T, W_j = Q_j S Q_{j-1}^T,
/// W_1 = Q_1 S V^T with S = Sigma^(1/N). The interior frames Q_j default to V.
WeightStack balanced_factorization(const Matrix& w, int layers);

/// Symmetry L_i(Q): W_{i+1} -> W_{i+1} Q and W_i -> Q^T W_i, 1 <= i < N.
/// Leaves the product unchanged and maps balanced stacks to balanced stacks.
WeightStack apply_gauge(const WeightStack& stack, std::size_t i, const Matrix& q);

/// Per-layer Euclidean gradient flow
///   W_j' = -W_{j+1}^T ... W_N^T dE(W) W_1^T ... W_{j-1}^T.
std::vector<Matrix> upstairs_rhs(const CompletionProblem& problem, const WeightStack& stack);

struct UpstairsSample {
  std::int64_t step = 0;
  double t = 0.0;
  Matrix product;
  std::vector<double> residuals;
};

struct UpstairsTrajectory {
  std::vector<UpstairsSample> samples;
  WeightStack final_stack;
};

/// Classic RK4 on all N layers with fixed step dt up to max_time.
///
/// The literal layer-wise flow moves the product with N A_N(dE), N times
/// faster than the Riemannian flow integrated by integrate(). Time here is
/// measured on the Riemannian clock: each step of length dt advances the
/// layer-wise flow by dt / N, so products can be compared with integrate()
/// sample by sample. Balancedness is unaffected by the rescaling. Samples
/// (product and balance residuals) are recorded at step 0 and every
/// sample_every steps, plus the final step.
UpstairsTrajectory upstairs_flow(const Depth& depth, const CompletionProblem& problem,
                                 const WeightStack& stack0, double dt, double max_time,
                                 std::int64_t sample_every = 1);

}  // namespace dln
