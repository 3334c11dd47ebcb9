#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dln/analysis.hpp"
#include "dln/config.hpp"
#include "dln/flow.hpp"

namespace dln {

/// Binned outcome data. Only converged runs are counted.
struct Histogram {
  HistogramQuantity quantity = HistogramQuantity::EffectiveRank;
  std::vector<double> edges;
  std::vector<std::int64_t> counts;
  std::int64_t underflow = 0;
  std::int64_t overflow = 0;
  /// Records left out because they did not converge.
  std::int64_t excluded = 0;
};

Histogram make_histogram(const std::vector<RunRecord>& records, const HistogramSpec& spec);

struct BatchResult {
  std::string name;
  std::string config_hash;
  /// Sorted by seed.
  std::vector<RunRecord> records;
  Histogram histogram;

  std::int64_t count(Termination t) const;
};

/// Initial matrix of run `seed`: a Wigner draw, projected to its leading
/// singular triple when rank_one_init is set.
Matrix initial_condition(const ExperimentConfig& config, std::uint64_t seed);

/// Runs seeds seed_base .. seed_base + n_runs - 1 on `jobs` worker threads.
/// Each run is single-threaded and depends only on its seed, so the result is
/// identical for every jobs value.
BatchResult run_batch(const ExperimentConfig& config, int jobs = 1);

/// Digest of the emitted per-run table; equal digests mean identical records.
std::string batch_digest(const BatchResult& result);

/// Draws a random rank-two completion of the cycle problem with w12, w31
/// ~ normal(0, sd), redrawing on degenerate pivots.
std::array<double, 3> random_rank_two_completion(const CyclePattern& phi, double sd, Rng& rng);

struct McStudyEntry {
  std::string label;
  double w12 = 0.0;
  double w23 = 0.0;
  double w31 = 0.0;
  McVolumeResult result;
};

/// mc_volume around the distinguished completion ("M") followed by
/// config.mc_volume.competitors random rank-two completions ("R1", ...).
/// Requires a 3x3 problem with the cycle mask.
std::vector<McStudyEntry> run_mc_study(const ExperimentConfig& config, int jobs = 1);

}  // namespace dln
