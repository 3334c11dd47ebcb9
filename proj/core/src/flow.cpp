#include "dln/flow.hpp"

#include <cmath>
#include <utility>

#include "dln/analysis.hpp"
#include "dln/error.hpp"
#include "dln/geometry.hpp"

namespace dln {

void FlowConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("FlowConfig: dt must be positive");
  if (!(max_time > 0.0)) throw InvalidArgument("FlowConfig: max_time must be positive");
  if (!(energy_tol > 0.0)) throw InvalidArgument("FlowConfig: energy_tol must be positive");
  if (!(gap_tol > 0.0)) throw InvalidArgument("FlowConfig: gap_tol must be positive");
  if (max_halvings < 0) throw InvalidArgument("FlowConfig: max_halvings must be >= 0");
  if (fixed_rank && (depth.is_infinite() || depth.layers() < 2)) {
    throw InvalidArgument("FlowConfig: fixed_rank needs a finite depth of at least 2");
  }
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::HorizonReached: return "HorizonReached";
    case Termination::DegenerateSpectrum: return "DegenerateSpectrum";
    case Termination::RankCollapse: return "RankCollapse";
  }
  return "Unknown";
}

Termination termination_from_string(const std::string& text) {
  for (auto t : {Termination::Converged, Termination::HorizonReached,
                 Termination::DegenerateSpectrum, Termination::RankCollapse}) {
    if (to_string(t) == text) return t;
  }
  throw InvalidArgument("unknown termination '" + text + "'");
}

namespace {

// Above this Frobenius change of U or V in one step the step is treated as
// unstable and subdivided.
constexpr double kMaxStepRotation = 0.5;
// Steps rotating the frames by more than this are subdivided for accuracy
// while halvings remain, and accepted once they run out. Near an avoided
// crossing of two singular values the frames turn at a rate proportional to
// the inverse squared gap, which a fixed step does not resolve.
constexpr double kAccurateStepRotation = 0.02;

enum class StepOutcome { Ok, Coarse, Degenerate, Collapse, Unstable };

// Size-templated kernel; D = 2 and 3 use fixed-size Eigen storage.
template <int D>
class FlowKernel {
 public:
  using Mat = Eigen::Matrix<double, D, D>;
  using Vec = Eigen::Matrix<double, D, 1>;

  struct State {
    Mat u;
    Vec sigma;
    Mat v;
  };

  FlowKernel(const Depth& depth, const CompletionProblem& problem, double gap_tol,
             bool allow_zero)
      : depth_(depth),
        phi_(problem.phi),
        mask_(problem.mask),
        gap_tol_(gap_tol),
        allow_zero_(allow_zero),
        alpha_(depth.alpha()) {}

  static State from_svd(const SvdState& s) { return State{s.u, s.sigma, s.v}; }
  static SvdState to_svd(const State& s) { return SvdState{s.u, s.sigma, s.v}; }

  double energy(const State& s) const {
    const Mat w = s.u * s.sigma.asDiagonal() * s.v.transpose();
    return 0.5 * mask_.cwiseProduct(phi_ - w).squaredNorm();
  }

  void rhs(const State& s, State& out) const {
    const Eigen::Index d = s.sigma.size();
    for (Eigen::Index i = 0; i < d; ++i) {
      const double si = s.sigma(i);
      if (!(si > 0.0) && !(allow_zero_ && si == 0.0)) {
        throw RankCollapse(static_cast<std::size_t>(i), si);
      }
    }
    const Mat w = s.u * s.sigma.asDiagonal() * s.v.transpose();
    const Mat grad = mask_.cwiseProduct(w - phi_);
    const Mat p = s.u.transpose() * grad * s.v;

    Mat a = Mat::Zero(d, d);
    Mat b = Mat::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double si = s.sigma(i);
      for (Eigen::Index l = i + 1; l < d; ++l) {
        const double sl = s.sigma(l);
        if (allow_zero_ && si == 0.0 && sl == 0.0) continue;  // rotations inside the kernel
        const double gap = si * si - sl * sl;
        if (!(std::abs(gap) >= gap_tol_)) {
          throw DegenerateSpectrum(static_cast<std::size_t>(i), static_cast<std::size_t>(l), gap);
        }
        const double l_il = metric_eigenvalue(depth_, si * si, sl * sl) / gap;
        // L is antisymmetric: L_li = -L_il
        a(i, l) = l_il * sl * p(i, l);
        a(l, i) = -l_il * si * p(l, i);
        b(i, l) = si * l_il * p(i, l);
        b(l, i) = -sl * l_il * p(l, i);
      }
    }
    out.u.noalias() = s.u * (a - a.transpose());
    out.v.noalias() = s.v * (b - b.transpose());
    out.sigma.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      out.sigma(i) = -sigma_power(s.sigma(i)) * p(i, i);
    }
  }

  StepOutcome rk4(const State& s, double h, State& next) const {
    State k1, k2, k3, k4, tmp;
    try {
      rhs(s, k1);
      axpy(s, 0.5 * h, k1, tmp);
      rhs(tmp, k2);
      axpy(s, 0.5 * h, k2, tmp);
      rhs(tmp, k3);
      axpy(s, h, k3, tmp);
      rhs(tmp, k4);
    } catch (const DegenerateSpectrum&) {
      return StepOutcome::Degenerate;
    } catch (const RankCollapse&) {
      return StepOutcome::Collapse;
    }
    const double c = h / 6.0;
    next.u = s.u + c * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    next.sigma = s.sigma + c * (k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma);
    next.v = s.v + c * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    if (!next.u.allFinite() || !next.v.allFinite() || !next.sigma.allFinite()) {
      return StepOutcome::Unstable;
    }
    orthonormalize(next.u);
    orthonormalize(next.v);
    const double rotation = std::max((next.u - s.u).norm(), (next.v - s.v).norm());
    if (rotation > kMaxStepRotation) return StepOutcome::Unstable;
    for (Eigen::Index i = 0; i < next.sigma.size(); ++i) {
      if (next.sigma(i) < 0.0) return StepOutcome::Collapse;
    }
    sort_descending(next);
    return rotation > kAccurateStepRotation ? StepOutcome::Coarse : StepOutcome::Ok;
  }

 private:
  double sigma_power(double sigma) const {
    if (alpha_ == 1.0) return sigma * sigma;
    if (alpha_ == 0.0) return 1.0;
    return std::pow(sigma, 2.0 * alpha_);
  }

  static void axpy(const State& s, double h, const State& k, State& out) {
    out.u = s.u + h * k.u;
    out.sigma = s.sigma + h * k.sigma;
    out.v = s.v + h * k.v;
  }

  // Modified Gram-Schmidt: the Q factor of a QR decomposition with positive
  // diagonal in R, i.e. the orthogonal matrix nearest in column order.
  static void orthonormalize(Mat& m) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      for (Eigen::Index j = 0; j < k; ++j) m.col(k) -= m.col(j).dot(m.col(k)) * m.col(j);
      m.col(k) /= m.col(k).norm();
    }
  }

  static void sort_descending(State& s) {
    const Eigen::Index d = s.sigma.size();
    for (Eigen::Index i = 1; i < d; ++i) {
      for (Eigen::Index j = i; j > 0 && s.sigma(j - 1) < s.sigma(j); --j) {
        std::swap(s.sigma(j - 1), s.sigma(j));
        s.u.col(j - 1).swap(s.u.col(j));
        s.v.col(j - 1).swap(s.v.col(j));
      }
    }
  }

  Depth depth_;
  Mat phi_;
  Mat mask_;
  double gap_tol_;
  bool allow_zero_;
  double alpha_;
};

void validate_initial(const FlowConfig& config, const SvdState& s) {
  const auto d = s.dim();
  if (s.u.rows() != d || s.u.cols() != d || s.v.rows() != d || s.v.cols() != d) {
    throw InvalidArgument("integrate: inconsistent initial factor sizes");
  }
  if (!s.u.allFinite() || !s.v.allFinite() || !s.sigma.allFinite()) {
    throw InvalidArgument("integrate: initial state has non-finite entries");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    const double si = s.sigma(i);
    if (config.fixed_rank ? si < 0.0 : !(si > 0.0)) {
      throw InvalidArgument("integrate: initial matrix is not invertible (sigma_" +
                            std::to_string(i) + " = " + std::to_string(si) + ")");
    }
    if (i + 1 < d && s.sigma(i) < s.sigma(i + 1)) {
      throw InvalidArgument("integrate: initial singular values are not descending");
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      if (config.fixed_rank && s.sigma(j) == 0.0 && s.sigma(i) == 0.0) continue;
      const double gap = s.sigma(i) * s.sigma(i) - s.sigma(j) * s.sigma(j);
      if (!(gap >= config.gap_tol)) {
        throw DegenerateSpectrum(static_cast<std::size_t>(i), static_cast<std::size_t>(j), gap);
      }
    }
  }
}

template <int D>
class Integrator {
 public:
  using Kernel = FlowKernel<D>;
  using State = typename Kernel::State;

  Integrator(const FlowConfig& config, const CompletionProblem& problem)
      : config_(config), kernel_(config.depth, problem, config.gap_tol, config.fixed_rank) {}

  RunRecord run(const SvdState& initial, std::uint64_t seed, const StepObserver& observer) {
    State s = Kernel::from_svd(initial);
    RunRecord record;
    record.seed = seed;
    record.final_energy = kernel_.energy(s);
    if (observer) observer(0, 0.0, Kernel::to_svd(s));

    const auto total_steps =
        static_cast<std::int64_t>(std::ceil(config_.max_time / config_.dt - 1e-9));
    Termination outcome = Termination::HorizonReached;
    if (record.final_energy < config_.energy_tol) outcome = Termination::Converged;

    std::int64_t step = 0;
    while (outcome == Termination::HorizonReached && step < total_steps) {
      const StepOutcome o = advance(s, config_.dt, 0);
      if (o != StepOutcome::Ok) {
        outcome = o == StepOutcome::Collapse ? Termination::RankCollapse
                                             : Termination::DegenerateSpectrum;
        break;
      }
      ++step;
      record.final_energy = kernel_.energy(s);
      if (observer) observer(step, static_cast<double>(step) * config_.dt, Kernel::to_svd(s));
      if (record.final_energy < config_.energy_tol) {
        outcome = Termination::Converged;
      } else if (!config_.fixed_rank && s.sigma(s.sigma.size() - 1) < config_.rank_floor) {
        outcome = Termination::RankCollapse;
      }
    }

    record.steps = step;
    record.final_time = static_cast<double>(step) * config_.dt;
    record.terminated = outcome;
    record.final_state = Kernel::to_svd(s);
    canonicalize_signs(record.final_state.u, record.final_state.v);
    record.effective_rank = effective_rank(record.final_state.sigma);
    return record;
  }

 private:
  StepOutcome advance(State& s, double h, int level) {
    State next;
    StepOutcome o = kernel_.rk4(s, h, next);
    if (o == StepOutcome::Ok || (o == StepOutcome::Coarse && level >= config_.max_halvings)) {
      s = std::move(next);
      return StepOutcome::Ok;
    }
    if (level >= config_.max_halvings) return o;
    const State backup = s;
    for (int half = 0; half < 2; ++half) {
      o = advance(s, 0.5 * h, level + 1);
      if (o != StepOutcome::Ok) {
        s = backup;
        return o;
      }
    }
    return StepOutcome::Ok;
  }

  const FlowConfig& config_;
  Kernel kernel_;
};

}  // namespace

SvdDerivative svd_flow_rhs(const Depth& depth, const SvdState& state,
                           const CompletionProblem& problem, double gap_tol,
                           bool allow_zero_sigma) {
  const auto d = state.dim();
  if (problem.dim() != d || problem.mask.rows() != d) {
    throw InvalidArgument("svd_flow_rhs: problem dimension does not match state");
  }
  using Kernel = FlowKernel<Eigen::Dynamic>;
  Kernel kernel(depth, problem, gap_tol, allow_zero_sigma);
  Kernel::State out;
  kernel.rhs(Kernel::from_svd(state), out);
  return SvdDerivative{out.u, out.sigma, out.v};
}

RunRecord integrate(const FlowConfig& config, const CompletionProblem& problem,
                    const SvdState& initial, std::uint64_t seed, const StepObserver& observer) {
  config.validate();
  problem.validate();
  if (problem.dim() != initial.dim()) {
    throw InvalidArgument("integrate: initial state dimension does not match the problem");
  }
  validate_initial(config, initial);
  switch (initial.dim()) {
    case 2: return Integrator<2>(config, problem).run(initial, seed, observer);
    case 3: return Integrator<3>(config, problem).run(initial, seed, observer);
    default: return Integrator<Eigen::Dynamic>(config, problem).run(initial, seed, observer);
  }
}

RunRecord integrate(const FlowConfig& config, const CompletionProblem& problem, const Matrix& w0,
                    std::uint64_t seed, const StepObserver& observer) {
  require_square_finite(w0, "integrate: w0");
  SvdState initial = svd(w0);
  if (config.fixed_rank) {
    // exact zeros are required on the fixed-rank manifold
    const double floor = 1e-13 * initial.sigma(0);
    for (Eigen::Index i = 0; i < initial.dim(); ++i) {
      if (initial.sigma(i) <= floor) initial.sigma(i) = 0.0;
    }
  }
  return integrate(config, problem, initial, seed, observer);
}

}  // namespace dln
