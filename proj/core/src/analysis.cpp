#include "dln/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dln/error.hpp"
#include "dln/geometry.hpp"

namespace dln {

double effective_rank(const Vector& sigma) {
  if (sigma.size() == 0) throw InvalidArgument("effective_rank: empty spectrum");
  if ((sigma.array() < 0.0).any()) {
    throw InvalidArgument("effective_rank: singular values must be nonnegative");
  }
  const double total = sigma.sum();
  if (!(total > 0.0)) throw InvalidArgument("effective_rank: all singular values are zero");
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    const double s = sigma(i) / total;
    if (s > 0.0) entropy -= s * std::log(s);
  }
  return std::exp(entropy);
}

RateBounds attraction_rates(const Depth& depth, const SvdState& state, const Matrix& mask) {
  const auto d = state.dim();
  if (mask.rows() != d || mask.cols() != d) {
    throw InvalidArgument("attraction_rates: mask dimension does not match state");
  }
  RateBounds out;
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      if (mask(r, c) != 0.0) out.observed.push_back(r + c * d);
    }
  }
  if (out.observed.empty()) throw InvalidArgument("attraction_rates: mask observes nothing");

  const SpectrumTable table = eigenvalues(depth, state.sigma);
  const auto m = static_cast<Eigen::Index>(out.observed.size());
  // rows of V kron U on the observed indices: K(r + c d, i + l d) = U(r, i) V(c, l)
  Matrix rows(m, d * d);
  Vector weights(d * d);
  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index i = 0; i < d; ++i) weights(i + l * d) = table.lambda(i, l);
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index r = out.observed[static_cast<std::size_t>(k)] % d;
    const Eigen::Index c = out.observed[static_cast<std::size_t>(k)] / d;
    for (Eigen::Index l = 0; l < d; ++l) {
      for (Eigen::Index i = 0; i < d; ++i) rows(k, i + l * d) = state.u(r, i) * state.v(c, l);
    }
  }
  const Matrix principal = rows * weights.asDiagonal() * rows.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(principal, Eigen::EigenvaluesOnly);
  out.alphas = solver.eigenvalues().reverse();
  out.sigma_sq = state.sigma.array().square();
  return out;
}

bool satisfies_two_by_two_rate_chain(const RateBounds& rates, double tol) {
  if (rates.alphas.size() != 2 || rates.sigma_sq.size() != 2) return false;
  const double s1 = rates.sigma_sq(0);
  const double s2 = rates.sigma_sq(1);
  const double mid = metric_eigenvalue(Depth::infinite(), s1, s2);
  const double slack = tol * s1;
  return s2 <= rates.alphas(1) + slack && rates.alphas(1) <= mid + slack &&
         mid <= rates.alphas(0) + slack && rates.alphas(0) <= s1 + slack;
}

double hyperbola_sigma2_coefficient(double gamma) {
  return std::sqrt(std::pow(gamma, 4) + 1.0) / (gamma * gamma + 1.0);
}

Matrix hyperbola_point(double gamma) {
  Matrix w(2, 2);
  w << 1.0, gamma, 1.0 / gamma, 1.0;
  return w;
}

Matrix hyperbola_normal(double gamma) {
  Matrix n(2, 2);
  n << 0.0, 1.0 / (gamma * gamma), 1.0, 0.0;
  return n / std::sqrt(1.0 + std::pow(gamma, -4));
}

HyperbolaPoint hyperbola_asymptotics(double gamma, double eta) {
  if (!(gamma > 0.0) || !(eta > 0.0)) {
    throw InvalidArgument("hyperbola_asymptotics: gamma and eta must be positive");
  }
  HyperbolaPoint p;
  p.sigma1 = gamma + 1.0 / gamma +
             2.0 * eta / ((1.0 + gamma * gamma) * std::sqrt(1.0 + std::pow(gamma, -4)));
  p.sigma2 = eta * hyperbola_sigma2_coefficient(gamma);
  Vector sigma(2);
  sigma << p.sigma1, p.sigma2;
  p.log_density = log_volume_density_dW(sigma);
  return p;
}

CyclePattern CyclePattern::from_matrix(const Matrix& phi) {
  if (phi.rows() != 3 || phi.cols() != 3) {
    throw InvalidArgument("CyclePattern: expected a 3x3 matrix");
  }
  return CyclePattern{phi(0, 0), phi(0, 2), phi(1, 0), phi(1, 1), phi(2, 1), phi(2, 2)};
}

Matrix CyclePattern::complete(double w12, double w23, double w31) const {
  Matrix m(3, 3);
  m << p11, w12, p13, p21, p22, w23, w31, p32, p33;
  return m;
}

double CyclePattern::rank_two_residual(double w12, double w23, double w31) const {
  const double pivot = p22 - p21 * w12 / p11;
  return p33 - p13 / p11 * w31 - (p32 - w31 * w12 / p11) * (w23 - p13 * p21 / p11) / pivot;
}

std::array<double, 3> CyclePattern::distinguished_point() const {
  return {p32 * p13 / p33, p13 * p21 / p11, p33 * p11 / p13};
}

bool CyclePattern::has_rank_one_completion(double rel_tol) const {
  if (p11 == 0.0) return false;
  // rank one forces the whole Schur complement to vanish
  if (p21 == 0.0) return p22 == 0.0;
  if (p13 == 0.0) return p33 == 0.0;
  const double w12 = p22 * p11 / p21;
  const double w31 = p33 * p11 / p13;
  const double implied = w31 * w12 / p11;
  return std::abs(p32 - implied) <= rel_tol * std::max(std::abs(p32), std::abs(implied));
}

double rank_two_completion(const CyclePattern& phi, double w12, double w31) {
  if (phi.p11 == 0.0) throw InvalidArgument("rank_two_completion: p11 must be nonzero");
  const double pivot = phi.p22 - phi.p21 * w12 / phi.p11;
  if (std::abs(pivot) <= 1e-14 * std::max(std::abs(phi.p22), std::abs(phi.p21 * w12 / phi.p11))) {
    throw InvalidArgument("rank_two_completion: degenerate pivot p22 - p21 w12 / p11");
  }
  const double base = phi.p13 * phi.p21 / phi.p11;
  const double lower = phi.p32 - w31 * w12 / phi.p11;
  const double corner = phi.p33 - phi.p13 * w31 / phi.p11;
  const double tol = 1e-12 * std::max({std::abs(phi.p32), std::abs(w31 * w12 / phi.p11),
                                       std::abs(phi.p33), std::abs(phi.p13 * w31 / phi.p11)});
  if (std::abs(lower) <= tol) {
    if (std::abs(corner) <= tol) return base;
    throw InvalidArgument("rank_two_completion: no rank-two completion for this (w12, w31)");
  }
  return base + pivot * corner / lower;
}

}  // namespace dln
