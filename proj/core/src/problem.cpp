#include "dln/problem.hpp"

#include "dln/error.hpp"

namespace dln {

void CompletionProblem::validate() const {
  require_square_finite(phi, "CompletionProblem.phi");
  require_square_finite(mask, "CompletionProblem.mask");
  if (mask.rows() != phi.rows()) {
    throw InvalidArgument("CompletionProblem: mask is " + std::to_string(mask.rows()) + "x" +
                          std::to_string(mask.cols()) + " but phi is " +
                          std::to_string(phi.rows()) + "x" + std::to_string(phi.cols()));
  }
  for (Eigen::Index r = 0; r < mask.rows(); ++r) {
    for (Eigen::Index c = 0; c < mask.cols(); ++c) {
      if (mask(r, c) != 0.0 && mask(r, c) != 1.0) {
        throw InvalidArgument("CompletionProblem: mask entries must be 0 or 1");
      }
    }
  }
}

Eigen::Index CompletionProblem::unobserved_count() const {
  return mask.size() - static_cast<Eigen::Index>(mask.sum());
}

bool CompletionProblem::is_minimizer(const Matrix& w, double tol) const {
  return (mask.cwiseProduct(phi - w)).cwiseAbs().maxCoeff() <= tol;
}

namespace {

void require_same_size(const CompletionProblem& problem, const Matrix& w) {
  if (w.rows() != problem.phi.rows() || w.cols() != problem.phi.cols()) {
    throw InvalidArgument("completion loss: matrix dimension does not match the problem");
  }
}

}  // namespace

double loss(const CompletionProblem& problem, const Matrix& w) {
  require_same_size(problem, w);
  return 0.5 * problem.mask.cwiseProduct(problem.phi - w).squaredNorm();
}

Matrix euclid_grad(const CompletionProblem& problem, const Matrix& w) {
  require_same_size(problem, w);
  return -problem.mask.cwiseProduct(problem.phi - w);
}

}  // namespace dln
