#include "dln/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dln/error.hpp"

namespace dln {

namespace {

constexpr double kDirectSumLogRatio = 1e-8;
constexpr double kSeriesLogRatio = 1e-6;

void require_positive(const Vector& sigma, const char* what) {
  if (sigma.size() == 0) throw InvalidArgument(std::string(what) + ": empty spectrum");
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (!(sigma(i) > 0.0) || !std::isfinite(sigma(i))) {
      throw InvalidArgument(std::string(what) + ": singular values must be positive, sigma_" +
                            std::to_string(i) + " = " + std::to_string(sigma(i)));
    }
  }
}

void require_strictly_descending(const Vector& sigma, const char* what) {
  require_positive(sigma, what);
  for (Eigen::Index i = 0; i + 1 < sigma.size(); ++i) {
    if (!(sigma(i) > sigma(i + 1))) {
      throw DegenerateSpectrum(static_cast<std::size_t>(i), static_cast<std::size_t>(i + 1),
                               sigma(i) * sigma(i) - sigma(i + 1) * sigma(i + 1));
    }
  }
}

// log(x_i - x_j) for x = exp(scale * log sigma), given log sigma_i > log sigma_j.
double log_power_gap(double log_si, double log_sj, double scale) {
  return scale * log_si + std::log(-std::expm1(scale * (log_sj - log_si)));
}

}  // namespace

double metric_eigenvalue(const Depth& depth, double si2, double sl2) {
  const double a = std::max(si2, sl2);
  const double b = std::min(si2, sl2);
  if (b < 0.0) throw InvalidArgument("metric_eigenvalue: negative squared singular value");
  if (a == 0.0) return 0.0;

  if (depth.is_infinite()) {
    if (b == 0.0) return 0.0;
    if (a == b) return a;
    const double u = std::log(a / b);
    if (0.5 * u < kSeriesLogRatio) return b * (1.0 + u / 2.0 + u * u / 6.0);
    return (a - b) / u;
  }

  const int n = depth.layers();
  const double nd = static_cast<double>(n);
  if (n == 1) return 1.0;
  const double lead = std::pow(a, (nd - 1.0) / nd) / nd;
  if (b == 0.0) return lead;
  const double log_ratio = std::log(b / a);
  if (std::abs(log_ratio) < kDirectSumLogRatio) {
    double sum = 0.0;
    for (int j = 1; j <= n; ++j) {
      sum += std::pow(a, (nd - j) / nd) * std::pow(b, (j - 1.0) / nd);
    }
    return sum / nd;
  }
  return lead * std::expm1(log_ratio) / std::expm1(log_ratio / nd);
}

SpectrumTable eigenvalues(const Depth& depth, const Vector& sigma) {
  require_positive(sigma, "eigenvalues");
  const auto d = sigma.size();
  SpectrumTable table{depth, sigma, Matrix(d, d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index l = i; l < d; ++l) {
      const double value = metric_eigenvalue(depth, sigma(i) * sigma(i), sigma(l) * sigma(l));
      table.lambda(i, l) = value;
      table.lambda(l, i) = value;
    }
  }
  return table;
}

Matrix apply_metric_dual(const SpectrumTable& table, const SvdState& state,
                         const Matrix& euclid_grad) {
  const auto d = state.dim();
  if (table.lambda.rows() != d || euclid_grad.rows() != d || euclid_grad.cols() != d) {
    throw InvalidArgument("apply_metric_dual: dimension mismatch");
  }
  if ((table.sigma - state.sigma).cwiseAbs().maxCoeff() > 0.0) {
    throw InvalidArgument("apply_metric_dual: table and state carry different spectra");
  }
  const Matrix projected = state.u.transpose() * euclid_grad * state.v;
  return state.u * table.lambda.cwiseProduct(projected) * state.v.transpose();
}

double log_volume_density(const Depth& depth, const Vector& sigma) {
  require_strictly_descending(sigma, "log_volume_density");
  const auto d = sigma.size();
  const Vector log_s = sigma.array().log();
  const double log_det_sq = 2.0 * log_s.sum();

  if (depth.is_infinite()) {
    double result = -0.5 * log_det_sq;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = i + 1; j < d; ++j) result += std::log(2.0 * (log_s(i) - log_s(j)));
    }
    return result;
  }

  const double n = depth.layers();
  double result = 0.5 * static_cast<double>(d * (d - 1)) * std::log(n) +
                  (1.0 - n) / (2.0 * n) * log_det_sq;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) result += log_power_gap(log_s(i), log_s(j), 2.0 / n);
  }
  return result;
}

double log_volume_density_dW(const Depth& depth, const Vector& sigma) {
  double result = log_volume_density(depth, sigma);
  const Vector log_s = sigma.array().log();
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    for (Eigen::Index j = i + 1; j < sigma.size(); ++j) {
      result -= log_power_gap(log_s(i), log_s(j), 2.0);
    }
  }
  return result;
}

double log_volume_density_dW(const Vector& sigma) {
  return log_volume_density_dW(Depth::infinite(), sigma);
}

double rank_one_volume_density(const Depth& depth, double sigma) {
  if (depth.is_infinite()) {
    throw InvalidArgument("rank_one_volume_density: only defined for finite depth");
  }
  if (!(sigma > 0.0)) throw InvalidArgument("rank_one_volume_density: sigma must be positive");
  const double n = depth.layers();
  return n / std::pow(sigma, 3.0 * (n - 1.0) / n);
}

}  // namespace dln
