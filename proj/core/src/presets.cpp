#include "dln/presets.hpp"

#include "dln/config.hpp"
#include "dln/error.hpp"

namespace dln {

namespace {

constexpr double kDiagPhi1 = 0.58724;
constexpr double kDiagPhi2 = 1.447;

ExperimentConfig base(const std::string& name, const Matrix& phi, const Matrix& mask) {
  ExperimentConfig c;
  c.name = name;
  c.preset = name;
  c.problem = CompletionProblem{phi, mask};
  c.flow.depth = Depth::infinite();
  c.flow.dt = 0.01;
  c.flow.max_time = 1200.0;
  c.flow.energy_tol = 1e-15;
  c.init = WignerSpec{0.0, 1e-3, phi.rows()};
  return c;
}

Matrix diag2_phi() {
  Matrix phi = Matrix::Zero(2, 2);
  phi(0, 0) = kDiagPhi1;
  phi(1, 1) = kDiagPhi2;
  return phi;
}

ExperimentConfig diag_d2() {
  ExperimentConfig c = base("diag-d2", diag2_phi(), Matrix::Identity(2, 2));
  c.n_runs = 3000;
  c.histogram = HistogramSpec{HistogramQuantity::EffectiveRank, 1.0, 2.0, 0.05};
  return c;
}

ExperimentConfig diag_d20() {
  const Eigen::Index d = 20;
  Matrix phi = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) phi(i, i) = 0.5 + static_cast<double>(i) / (d - 1);
  ExperimentConfig c = base("diag-d20", phi, Matrix::Identity(d, d));
  c.n_runs = 300;
  c.flow.energy_tol = 1e-6;
  c.flow.max_time = 5000.0;
  c.histogram = HistogramSpec{HistogramQuantity::EffectiveRank, 1.0, 20.0, 0.25};
  return c;
}

ExperimentConfig upper_t() {
  Matrix phi(2, 2);
  phi << kDiagPhi1, 1.0, 0.0, kDiagPhi2;
  Matrix mask(2, 2);
  mask << 1.0, 1.0, 0.0, 1.0;
  ExperimentConfig c = base("upper-T", phi, mask);
  c.n_runs = 1000;
  c.histogram = HistogramSpec{HistogramQuantity::EffectiveRank, 1.0, 2.0, 0.05};
  return c;
}

ExperimentConfig cycle_3x3() {
  Matrix phi(3, 3);
  phi << -1.55795, 0.0, 1.58397,  //
      0.212869, 0.0337805, 0.0,   //
      0.0, 1.32488, 1.92653;
  Matrix mask(3, 3);
  mask << 1, 0, 1,  //
      1, 1, 0,      //
      0, 1, 1;
  ExperimentConfig c = base("cycle-3x3", phi, mask);
  c.n_runs = 500;
  c.init.sd = 0.02;
  c.flow.energy_tol = 1e-12;
  c.flow.max_time = 3000.0;
  c.histogram = HistogramSpec{HistogramQuantity::EffectiveRank, 1.0, 3.0, 0.05};
  return c;
}

ExperimentConfig rank1_manifold() {
  ExperimentConfig c = base("rank1-manifold", diag2_phi(), Matrix::Identity(2, 2));
  c.flow.depth = Depth::finite(20);
  c.flow.fixed_rank = true;
  c.rank_one_init = true;
  c.n_runs = 1072;
  c.histogram = HistogramSpec{HistogramQuantity::TopSingularValue, 2.0, 5.0, 0.2};
  return c;
}

Preset make(const ExperimentConfig& c, std::string description) {
  return Preset{c.name, std::move(description), config_to_json(c)};
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      make(diag_d2(),
           "2x2 diagonal completion, phi = diag(0.58724, 1.447), mask = I. Minimizers form the "
           "(w12, w21) plane; rank-one minimizers lie on the hyperbola w12 w21 = phi1 phi2."),
      make(diag_d20(),
           "20x20 diagonal completion with phi_ii evenly spaced in [0.5, 1.5]; effective-rank "
           "histograms of outcomes, energy tolerance 1e-6."),
      make(upper_t(),
           "2x2 completion with mask [[1,1],[0,1]]; a line of minimizers containing exactly one "
           "rank-deficient point w21 = phi11 phi22 / phi12."),
      make(cycle_3x3(),
           "3x3 completion with free entries (w12, w23, w31); no rank-one completion, a "
           "two-parameter family of rank-two completions. Wigner(0, 0.02) initialization."),
      make(rank1_manifold(),
           "2x2 diagonal completion restricted to rank-one matrices at depth 20; outcomes "
           "accumulate at the smallest attainable singular value 2.03424."),
  };
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace dln
