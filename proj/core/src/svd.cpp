#include <cmath>
#include <string>

#include "dln/error.hpp"
#include "dln/linalg.hpp"

namespace dln {

void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument(std::string(what) + ": expected a non-empty square matrix, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
  }
}

Matrix SvdState::reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }

void canonicalize_signs(Matrix& u, Matrix& v) {
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      const double a = std::abs(u(r, k));
      // strict comparison keeps the first index on ties
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (u(best, k) < 0.0) {
      u.col(k) = -u.col(k);
      v.col(k) = -v.col(k);
    }
  }
}

SvdState svd(const Matrix& m) {
  require_square_finite(m, "svd");
  Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) {
    throw FactorizationError("JacobiSVD did not converge", m.norm());
  }
  SvdState s{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  if (!s.u.allFinite() || !s.v.allFinite() || !s.sigma.allFinite()) {
    throw FactorizationError("JacobiSVD returned non-finite factors", m.norm());
  }
  canonicalize_signs(s.u, s.v);
  return s;
}

double svd_state_defect(const SvdState& s) {
  const auto d = s.dim();
  const Matrix eye = Matrix::Identity(d, d);
  double defect = std::max((s.u.transpose() * s.u - eye).norm(),
                           (s.v.transpose() * s.v - eye).norm());
  for (Eigen::Index i = 0; i < d; ++i) {
    if (s.sigma(i) < 0.0) defect = std::max(defect, -s.sigma(i));
    if (i + 1 < d && s.sigma(i) < s.sigma(i + 1)) {
      defect = std::max(defect, s.sigma(i + 1) - s.sigma(i));
    }
  }
  return defect;
}

double vandermonde(const Vector& values) {
  double p = 1.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    for (Eigen::Index j = i + 1; j < values.size(); ++j) p *= values(i) - values(j);
  }
  return p;
}

namespace {

void require_gap(const Vector& sigma, double gap_tol) {
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    for (Eigen::Index j = i + 1; j < sigma.size(); ++j) {
      const double gap = sigma(i) * sigma(i) - sigma(j) * sigma(j);
      if (!(std::abs(gap) >= gap_tol)) {
        throw DegenerateSpectrum(static_cast<std::size_t>(i), static_cast<std::size_t>(j), gap);
      }
    }
  }
}

}  // namespace

SvdRates svd_perturbation(const SvdState& state, const Matrix& wdot, double gap_tol) {
  const auto d = state.dim();
  if (wdot.rows() != d || wdot.cols() != d) {
    throw InvalidArgument("svd_perturbation: wdot dimension does not match state");
  }
  require_gap(state.sigma, gap_tol);

  const Matrix w = state.reconstruct();
  const Matrix left = wdot * w.transpose() + w * wdot.transpose();
  const Matrix right = wdot.transpose() * w + w.transpose() * wdot;
  // coefficients in the singular bases: u_dot_i = sum_j cu(j, i) u_j
  const Matrix left_b = state.u.transpose() * left * state.u;
  const Matrix right_b = state.v.transpose() * right * state.v;

  Matrix cu = Matrix::Zero(d, d);
  Matrix cv = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      const double denom = state.sigma(i) * state.sigma(i) - state.sigma(j) * state.sigma(j);
      cu(j, i) = left_b(j, i) / denom;
      cv(j, i) = right_b(j, i) / denom;
    }
  }

  SvdRates rates;
  rates.sigma_dot = (state.u.transpose() * wdot * state.v).diagonal();
  rates.u_dot = state.u * cu;
  rates.v_dot = state.v * cv;
  return rates;
}

double svd_jacobian_oracle(const SvdState& state, double gap_tol) {
  const auto d = state.dim();
  require_gap(state.sigma, gap_tol);
  const Eigen::Index half = d * (d - 1) / 2;
  const Eigen::Index n = d * d;
  const auto sigma = state.sigma.asDiagonal();

  // unknowns: row-major half-vectorizations of A^U and A^V, then diag(D)
  Matrix jac(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Matrix au = Matrix::Zero(d, d);
    Matrix av = Matrix::Zero(d, d);
    Matrix dd = Matrix::Zero(d, d);
    if (col < 2 * half) {
      Eigen::Index k = col < half ? col : col - half;
      Matrix& target = col < half ? au : av;
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
          if (k-- == 0) {
            target(i, j) = 1.0;
            target(j, i) = -1.0;
          }
        }
      }
    } else {
      const Eigen::Index k = col - 2 * half;
      dd(k, k) = 1.0;
    }
    const Matrix image = au * sigma + dd + sigma * av;
    jac.col(col) = image.reshaped();
  }
  return std::abs(jac.fullPivLu().determinant());
}

}  // namespace dln
