#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dln/flow.hpp"
#include "dln/problem.hpp"
#include "dln/random.hpp"

namespace dln {

enum class ArtifactKind { RunsCsv, HistogramJson, SummaryJson, HeatmapCsv };

std::string to_string(ArtifactKind kind);
ArtifactKind artifact_from_string(const std::string& text);

enum class HistogramQuantity { EffectiveRank, TopSingularValue };

struct HistogramSpec {
  HistogramQuantity quantity = HistogramQuantity::EffectiveRank;
  double lo = 1.0;
  double hi = 2.0;
  double width = 0.05;
};

/// Which volume density the heatmap shows.
enum class VolumeMeasure { Lebesgue, SingularCoordinates };

/// Grid over the two free entries of a 2x2 completion problem. Nodes are
/// lo + k (hi - lo) / (resolution - 1), k = 0..resolution-1, on both axes.
struct HeatmapSpec {
  double lo = -4.0;
  double hi = 4.0;
  int resolution = 400;
  VolumeMeasure measure = VolumeMeasure::Lebesgue;
  Depth depth = Depth::infinite();
};

/// Monte Carlo volume comparison between the distinguished rank-two completion
/// and randomly drawn rank-two completions of the 3x3 cycle problem.
struct McStudySpec {
  double cube_width = 1e-3;
  double sv_floor = 1e-5;
  std::int64_t n_samples = 100000;
  int competitors = 24;
  double competitor_sd = 10.0;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::string name;
  /// Preset the problem came from, empty for an explicit phi/mask.
  std::string preset;
  CompletionProblem problem;
  FlowConfig flow;
  WignerSpec init;
  /// Project each initial draw to rank one before integrating.
  bool rank_one_init = false;
  std::int64_t n_runs = 1;
  std::uint64_t seed_base = 0;
  std::vector<ArtifactKind> outputs{ArtifactKind::RunsCsv, ArtifactKind::HistogramJson,
                                    ArtifactKind::SummaryJson};
  HistogramSpec histogram;
  HeatmapSpec heatmap;
  McStudySpec mc_volume;

  /// Throws ConfigError describing the first problem found.
  void validate() const;
};

/// Parses a config document. When problem.preset is set, the preset's
/// defaults are loaded first and every field present in the document
/// overrides them. Throws ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Canonical document; config_from_json(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a over the canonical document.
std::string config_hash(const ExperimentConfig& config);

}  // namespace dln
