#include "dln/upstairs.hpp"

#include <cmath>

#include "dln/error.hpp"

namespace dln {

Matrix WeightStack::product() const {
  if (layers.empty()) throw InvalidArgument("WeightStack: no layers");
  Matrix p = layers.front();
  for (std::size_t k = 1; k < layers.size(); ++k) p = p * layers[k];
  return p;
}

void WeightStack::validate() const {
  if (layers.empty()) throw InvalidArgument("WeightStack: no layers");
  const auto d = layers.front().rows();
  for (const auto& w : layers) {
    require_square_finite(w, "WeightStack layer");
    if (w.rows() != d) throw InvalidArgument("WeightStack: layers differ in size");
  }
}

std::vector<double> balance_residuals(const WeightStack& stack) {
  std::vector<double> out;
  const std::size_t n = stack.depth();
  for (std::size_t j = 1; j < n; ++j) {
    const Matrix& upper = stack.layer(j + 1);
    const Matrix& lower = stack.layer(j);
    out.push_back((upper.transpose() * upper - lower * lower.transpose()).norm());
  }
  return out;
}

WeightStack balanced_factorization(const Matrix& w, int layers) {
  if (layers < 1) throw InvalidArgument("balanced_factorization: need at least one layer");
  const SvdState s = svd(w);
  const Vector root = s.sigma.array().pow(1.0 / layers);
  const auto root_diag = root.asDiagonal();
  WeightStack stack;
  stack.layers.resize(static_cast<std::size_t>(layers));
  if (layers == 1) {
    stack.layers[0] = w;
    return stack;
  }
  stack.layer(static_cast<std::size_t>(layers)) = s.u * root_diag * s.v.transpose();
  for (int j = 2; j < layers; ++j) {
    stack.layer(static_cast<std::size_t>(j)) = s.v * root_diag * s.v.transpose();
  }
  stack.layer(1) = s.v * root_diag * s.v.transpose();
  return stack;
}

WeightStack apply_gauge(const WeightStack& stack, std::size_t i, const Matrix& q) {
  if (i < 1 || i >= stack.depth()) {
    throw InvalidArgument("apply_gauge: index must satisfy 1 <= i < N");
  }
  const auto d = stack.layer(i).rows();
  if (q.rows() != d || q.cols() != d ||
      (q.transpose() * q - Matrix::Identity(d, d)).norm() > 1e-10) {
    throw InvalidArgument("apply_gauge: q must be orthogonal");
  }
  WeightStack out = stack;
  out.layer(i + 1) = stack.layer(i + 1) * q;
  out.layer(i) = q.transpose() * stack.layer(i);
  return out;
}

std::vector<Matrix> upstairs_rhs(const CompletionProblem& problem, const WeightStack& stack) {
  const std::size_t n = stack.depth();
  const auto d = problem.dim();
  // prefix[k] = layers[0] * ... * layers[k-1], suffix[k] = layers[k] * ... * layers[n-1]
  std::vector<Matrix> prefix(n + 1), suffix(n + 1);
  prefix[0] = Matrix::Identity(d, d);
  for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] * stack.layers[k];
  suffix[n] = Matrix::Identity(d, d);
  for (std::size_t k = n; k-- > 0;) suffix[k] = stack.layers[k] * suffix[k + 1];

  const Matrix grad = euclid_grad(problem, prefix[n]);
  std::vector<Matrix> rates(n);
  for (std::size_t k = 0; k < n; ++k) {
    rates[k] = -prefix[k].transpose() * grad * suffix[k + 1].transpose();
  }
  return rates;
}

UpstairsTrajectory upstairs_flow(const Depth& depth, const CompletionProblem& problem,
                                 const WeightStack& stack0, double dt, double max_time,
                                 std::int64_t sample_every) {
  if (depth.is_infinite()) {
    throw InvalidArgument("upstairs_flow: the weight-space flow needs a finite depth");
  }
  problem.validate();
  stack0.validate();
  if (stack0.depth() != static_cast<std::size_t>(depth.layers())) {
    throw InvalidArgument("upstairs_flow: stack depth does not match depth");
  }
  if (stack0.layers.front().rows() != problem.dim()) {
    throw InvalidArgument("upstairs_flow: layer size does not match the problem");
  }
  if (!(dt > 0.0) || !(max_time > 0.0) || sample_every < 1) {
    throw InvalidArgument("upstairs_flow: dt, max_time and sample_every must be positive");
  }

  UpstairsTrajectory traj;
  WeightStack s = stack0;
  auto record = [&](std::int64_t step) {
    traj.samples.push_back(
        UpstairsSample{step, static_cast<double>(step) * dt, s.product(), balance_residuals(s)});
  };
  record(0);

  const auto total_steps = static_cast<std::int64_t>(std::ceil(max_time / dt - 1e-9));
  const std::size_t n = s.depth();
  // One unit of downstairs time is N units of layer-wise gradient time.
  const double h = dt / static_cast<double>(n);
  WeightStack tmp = s;
  for (std::int64_t step = 1; step <= total_steps; ++step) {
    const auto k1 = upstairs_rhs(problem, s);
    for (std::size_t k = 0; k < n; ++k) tmp.layers[k] = s.layers[k] + 0.5 * h * k1[k];
    const auto k2 = upstairs_rhs(problem, tmp);
    for (std::size_t k = 0; k < n; ++k) tmp.layers[k] = s.layers[k] + 0.5 * h * k2[k];
    const auto k3 = upstairs_rhs(problem, tmp);
    for (std::size_t k = 0; k < n; ++k) tmp.layers[k] = s.layers[k] + h * k3[k];
    const auto k4 = upstairs_rhs(problem, tmp);
    for (std::size_t k = 0; k < n; ++k) {
      s.layers[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    if (step % sample_every == 0 || step == total_steps) record(step);
  }
  traj.final_stack = std::move(s);
  return traj;
}

}  // namespace dln
