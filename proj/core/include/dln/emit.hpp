#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dln/batch.hpp"
#include "dln/config.hpp"

namespace dln {

/// Per-run table. Columns:
///   seed,termination,steps,final_time,final_energy,effective_rank,w11,w12,...,wdd
/// with the final matrix flattened row-major. Numbers use the shortest
/// round-trip decimal form.
std::string runs_csv(const BatchResult& result);

/// {"quantity", "edges", "counts", "underflow", "overflow", "excluded_nonconverged"}
nlohmann::json histogram_json(const Histogram& histogram);

/// Termination counts and converged fraction.
nlohmann::json summary_json(const BatchResult& result);

/// One row per grid node over the two free entries of a 2x2 problem:
///   w_a,w_b,log_density
/// where (w_a, w_b) are the free entries in row-major order and log_density
/// is "singular" when the completed matrix is rank deficient or has repeated
/// singular values.
std::string heatmap_csv(const CompletionProblem& problem, const HeatmapSpec& spec);

std::string mc_study_csv(const std::vector<McStudyEntry>& entries);

/// Writes text to path, throwing dln::Error with the path on failure.
void write_file(const std::string& path, const std::string& text);

/// Writes one batch artifact. Throws InvalidArgument for HeatmapCsv, which is
/// not derived from a batch result.
void emit(const BatchResult& result, ArtifactKind kind, const std::string& path);

/// Conventional file name for an artifact kind, prefixed with the config name.
std::string artifact_filename(const std::string& name, ArtifactKind kind);

}  // namespace dln
