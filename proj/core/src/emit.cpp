#include "dln/emit.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dln/digest.hpp"
#include "dln/error.hpp"
#include "dln/geometry.hpp"

namespace dln {

using nlohmann::json;

std::string runs_csv(const BatchResult& result) {
  std::ostringstream os;
  os << "seed,termination,steps,final_time,final_energy,effective_rank";
  const Eigen::Index d = result.records.empty() ? 0 : result.records.front().final_state.dim();
  for (Eigen::Index r = 1; r <= d; ++r) {
    for (Eigen::Index c = 1; c <= d; ++c) os << ",w" << r << c;
  }
  os << '\n';
  for (const auto& rec : result.records) {
    os << rec.seed << ',' << to_string(rec.terminated) << ',' << rec.steps << ','
       << format_double(rec.final_time) << ',' << format_double(rec.final_energy) << ','
       << format_double(rec.effective_rank);
    const Matrix w = rec.final_state.reconstruct();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) os << ',' << format_double(w(r, c));
    }
    os << '\n';
  }
  return os.str();
}

json histogram_json(const Histogram& h) {
  return json{{"quantity", h.quantity == HistogramQuantity::EffectiveRank ? "effective_rank"
                                                                         : "top_singular_value"},
              {"edges", h.edges},
              {"counts", h.counts},
              {"underflow", h.underflow},
              {"overflow", h.overflow},
              {"excluded_nonconverged", h.excluded}};
}

json summary_json(const BatchResult& result) {
  json terms = json::object();
  for (auto t : {Termination::Converged, Termination::HorizonReached,
                 Termination::DegenerateSpectrum, Termination::RankCollapse}) {
    terms[to_string(t)] = result.count(t);
  }
  const auto n = static_cast<double>(result.records.size());
  return json{{"name", result.name},
              {"config_hash", result.config_hash},
              {"n_runs", result.records.size()},
              {"terminations", terms},
              {"converged_fraction", n > 0 ? result.count(Termination::Converged) / n : 0.0},
              {"records_digest", batch_digest(result)}};
}

std::string heatmap_csv(const CompletionProblem& problem, const HeatmapSpec& spec) {
  problem.validate();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> free;
  for (Eigen::Index r = 0; r < problem.dim(); ++r) {
    for (Eigen::Index c = 0; c < problem.dim(); ++c) {
      if (problem.mask(r, c) == 0.0) free.emplace_back(r, c);
    }
  }
  if (problem.dim() != 2 || free.size() != 2) {
    throw InvalidArgument("heatmap: needs a 2x2 problem with exactly two free entries");
  }
  std::ostringstream os;
  const auto name = [](const std::pair<Eigen::Index, Eigen::Index>& e) {
    return "w" + std::to_string(e.first + 1) + std::to_string(e.second + 1);
  };
  os << name(free[0]) << ',' << name(free[1]) << ",log_density\n";

  const double step = (spec.hi - spec.lo) / (spec.resolution - 1);
  Matrix w = problem.mask.cwiseProduct(problem.phi);
  for (int a = 0; a < spec.resolution; ++a) {
    const double x = spec.lo + a * step;
    for (int b = 0; b < spec.resolution; ++b) {
      const double y = spec.lo + b * step;
      w(free[0].first, free[0].second) = x;
      w(free[1].first, free[1].second) = y;
      os << format_double(x) << ',' << format_double(y) << ',';
      Eigen::JacobiSVD<Matrix> solver(w);
      const Vector& sigma = solver.singularValues();
      const bool rank_deficient = !(sigma(sigma.size() - 1) > 1e-12 * sigma(0));
      bool written = false;
      if (!rank_deficient) {
        try {
          const double value = spec.measure == VolumeMeasure::Lebesgue
                                   ? log_volume_density_dW(spec.depth, sigma)
                                   : log_volume_density(spec.depth, sigma);
          os << format_double(value);
          written = true;
        } catch (const DegenerateSpectrum&) {
        }
      }
      if (!written) os << "singular";
      os << '\n';
    }
  }
  return os.str();
}

std::string mc_study_csv(const std::vector<McStudyEntry>& entries) {
  std::ostringstream os;
  os << "label,w12,w23,w31,log_mean_density,accepted\n";
  for (const auto& e : entries) {
    os << e.label << ',' << format_double(e.w12) << ',' << format_double(e.w23) << ','
       << format_double(e.w31) << ',' << format_double(e.result.log_mean_density) << ','
       << e.result.accepted << '\n';
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  out << text;
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

void emit(const BatchResult& result, ArtifactKind kind, const std::string& path) {
  switch (kind) {
    case ArtifactKind::RunsCsv: write_file(path, runs_csv(result)); return;
    case ArtifactKind::HistogramJson:
      write_file(path, histogram_json(result.histogram).dump(2) + "\n");
      return;
    case ArtifactKind::SummaryJson: write_file(path, summary_json(result).dump(2) + "\n"); return;
    case ArtifactKind::HeatmapCsv:
      throw InvalidArgument("emit: heatmaps are produced from a config, not a batch result");
  }
}

std::string artifact_filename(const std::string& name, ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::RunsCsv: return name + ".runs.csv";
    case ArtifactKind::HistogramJson: return name + ".histogram.json";
    case ArtifactKind::SummaryJson: return name + ".summary.json";
    case ArtifactKind::HeatmapCsv: return name + ".heatmap.csv";
  }
  return name;
}

}  // namespace dln
