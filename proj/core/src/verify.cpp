#include "dln/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "dln/analysis.hpp"
#include "dln/flow.hpp"
#include "dln/geometry.hpp"
#include "dln/random.hpp"
#include "dln/upstairs.hpp"

namespace dln {

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

CheckResult make_check(std::string name, double worst, double tolerance) {
  return CheckResult{std::move(name), worst, tolerance, worst <= tolerance};
}

Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols, double sd = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal(0.0, sd);
  }
  return m;
}

Matrix random_orthogonal(Rng& rng, Eigen::Index d) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, d, d));
  return qr.householderQ() * Matrix::Identity(d, d);
}

// Descending spectrum in [0.2, 3] with squared gaps of at least 0.05.
Vector random_spectrum(Rng& rng, Eigen::Index d) {
  Vector s(d);
  for (;;) {
    for (Eigen::Index i = 0; i < d; ++i) s(i) = rng.uniform(0.2, 3.0);
    std::sort(s.data(), s.data() + d, std::greater<>());
    bool spread = true;
    for (Eigen::Index i = 0; i + 1 < d; ++i) spread &= s(i) * s(i) - s(i + 1) * s(i + 1) > 0.05;
    if (spread) return s;
  }
}

Matrix random_mask(Rng& rng, Eigen::Index d) {
  Matrix mask = Matrix::Zero(d, d);
  while (mask.sum() == 0.0) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) mask(i, j) = rng.uniform(0.0, 1.0) < 0.6 ? 1.0 : 0.0;
    }
  }
  return mask;
}

Matrix psd_power(const Matrix& sym, double p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector ev = es.eigenvalues().cwiseMax(0.0).array().pow(p).matrix();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

SuiteResult flow_equivalence(std::uint64_t seed) {
  SuiteResult suite{"flow-equivalence", {}};
  constexpr double dt = 0.005;
  constexpr double horizon = 10.0;
  constexpr std::int64_t every = 200;
  for (int layers : {2, 3, 5}) {
    for (Eigen::Index d : {2, 3}) {
      double worst = 0.0;
      for (std::uint64_t k = 0; k < 2; ++k) {
        Rng rng(derive_seed(seed, 100 * static_cast<std::uint64_t>(layers) + 10 * d + k));
        CompletionProblem problem{gaussian(rng, d, d), random_mask(rng, d)};
        const Matrix w0 = svd(gaussian(rng, d, d, 0.5)).reconstruct();

        FlowConfig config;
        config.depth = Depth::finite(layers);
        config.dt = dt;
        config.max_time = horizon;
        config.energy_tol = 1e-300;
        std::map<std::int64_t, Matrix> reduced;
        integrate(config, problem, w0, 0, [&](std::int64_t step, double, const SvdState& s) {
          if (step % every == 0) reduced[step] = s.reconstruct();
        });

        const auto full = upstairs_flow(config.depth, problem, balanced_factorization(w0, layers),
                                        dt, horizon, every);
        for (const auto& sample : full.samples) {
          auto it = reduced.find(sample.step);
          if (it == reduced.end()) continue;
          worst = std::max(worst, (sample.product - it->second).norm());
        }
      }
      suite.checks.push_back(make_check(
          "N=" + std::to_string(layers) + " d=" + std::to_string(d), worst, 1e-6));
    }
  }
  return suite;
}

SuiteResult svd_jacobian(std::uint64_t seed) {
  SuiteResult suite{"svd-jacobian", {}};
  for (Eigen::Index d : {2, 3, 4}) {
    Rng rng(derive_seed(seed, 200 + d));
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      SvdState s{random_orthogonal(rng, d), random_spectrum(rng, d), random_orthogonal(rng, d)};
      const double expected = vandermonde(s.sigma.array().square().matrix());
      worst = std::max(worst, std::abs(svd_jacobian_oracle(s) - expected) / std::abs(expected));
    }
    suite.checks.push_back(make_check("d=" + std::to_string(d), worst, 1e-8));
  }
  return suite;
}

SuiteResult metric_operator(std::uint64_t seed) {
  SuiteResult suite{"metric-operator", {}};
  for (int layers : {2, 5, 10}) {
    for (Eigen::Index d : {2, 3}) {
      Rng rng(derive_seed(seed, 300 + 10 * static_cast<std::uint64_t>(layers) + d));
      double worst = 0.0;
      for (int k = 0; k < 10; ++k) {
        const SvdState s{random_orthogonal(rng, d), random_spectrum(rng, d),
                         random_orthogonal(rng, d)};
        const Matrix w = s.reconstruct();
        const Matrix z = gaussian(rng, d, d);
        Matrix explicit_sum = Matrix::Zero(d, d);
        const double inv_n = 1.0 / layers;
        for (int j = 1; j <= layers; ++j) {
          explicit_sum += inv_n * psd_power(w * w.transpose(), double(layers - j) / layers) * z *
                          psd_power(w.transpose() * w, double(j - 1) / layers);
        }
        const Matrix fast = apply_metric_dual(eigenvalues(Depth::finite(layers), s.sigma), s, z);
        worst = std::max(worst, (fast - explicit_sum).norm() / explicit_sum.norm());
      }
      suite.checks.push_back(make_check(
          "N=" + std::to_string(layers) + " d=" + std::to_string(d), worst, 1e-9));
    }
  }
  return suite;
}

SuiteResult spectrum_bounds(std::uint64_t seed) {
  SuiteResult suite{"spectrum-bounds", {}};
  for (Eigen::Index d : {2, 3, 4}) {
    Rng rng(derive_seed(seed, 400 + d));
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const SvdState s{random_orthogonal(rng, d), random_spectrum(rng, d),
                       random_orthogonal(rng, d)};
      const Depth depth = k % 2 == 0 ? Depth::infinite() : Depth::finite(3 + k);
      const Matrix lambda = eigenvalues(depth, s.sigma).lambda;
      const RateBounds rates = attraction_rates(depth, s, random_mask(rng, d));
      const double lo = lambda.minCoeff();
      const double hi = lambda.maxCoeff();
      const double scale = 1e-12 * hi;
      // Violation beyond the eigenvalue range, zero when interlacing holds.
      for (Eigen::Index i = 0; i < rates.alphas.size(); ++i) {
        worst = std::max({worst, lo - rates.alphas(i) - scale, rates.alphas(i) - hi - scale});
      }
    }
    suite.checks.push_back(make_check("interlacing d=" + std::to_string(d), worst, 0.0));
  }

  Rng rng(derive_seed(seed, 499));
  int broken = 0;
  for (int k = 0; k < 20; ++k) {
    const SvdState s{random_orthogonal(rng, 2), random_spectrum(rng, 2),
                     random_orthogonal(rng, 2)};
    const RateBounds rates = attraction_rates(Depth::infinite(), s, Matrix::Identity(2, 2));
    if (!satisfies_two_by_two_rate_chain(rates)) ++broken;
  }
  suite.checks.push_back(make_check("diagonal chain d=2", broken, 0.0));
  return suite;
}

}  // namespace

std::vector<SuiteResult> run_verification(std::uint64_t seed) {
  return {flow_equivalence(seed), svd_jacobian(seed), metric_operator(seed),
          spectrum_bounds(seed)};
}

}  // namespace dln
