#include "dln/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "dln/digest.hpp"
#include "dln/emit.hpp"
#include "dln/error.hpp"

namespace dln {

Histogram make_histogram(const std::vector<RunRecord>& records, const HistogramSpec& spec) {
  Histogram h;
  h.quantity = spec.quantity;
  const auto bins = static_cast<std::size_t>(std::ceil((spec.hi - spec.lo) / spec.width - 1e-9));
  for (std::size_t k = 0; k <= bins; ++k) {
    h.edges.push_back(std::min(spec.hi, spec.lo + static_cast<double>(k) * spec.width));
  }
  h.counts.assign(bins, 0);
  for (const auto& r : records) {
    if (r.terminated != Termination::Converged) {
      ++h.excluded;
      continue;
    }
    const double value = spec.quantity == HistogramQuantity::EffectiveRank
                             ? r.effective_rank
                             : r.final_state.sigma(0);
    if (value < spec.lo) {
      ++h.underflow;
    } else if (value > spec.hi) {
      ++h.overflow;
    } else {
      auto k = static_cast<std::size_t>(std::floor((value - spec.lo) / spec.width));
      ++h.counts[std::min(k, bins - 1)];
    }
  }
  return h;
}

std::int64_t BatchResult::count(Termination t) const {
  return std::count_if(records.begin(), records.end(),
                       [t](const RunRecord& r) { return r.terminated == t; });
}

Matrix initial_condition(const ExperimentConfig& config, std::uint64_t seed) {
  Matrix w0 = sample_wigner(config.init, seed);
  if (!config.rank_one_init) return w0;
  const SvdState s = svd(w0);
  return s.sigma(0) * s.u.col(0) * s.v.col(0).transpose();
}

namespace {

RunRecord run_one(const ExperimentConfig& config, std::uint64_t seed) {
  const Matrix w0 = initial_condition(config, seed);
  try {
    return integrate(config.flow, config.problem, w0, seed);
  } catch (const DegenerateSpectrum&) {
    RunRecord r;
    r.seed = seed;
    r.final_state = svd(w0);
    r.final_energy = loss(config.problem, w0);
    r.effective_rank = effective_rank(r.final_state.sigma);
    r.terminated = Termination::DegenerateSpectrum;
    return r;
  } catch (const InvalidArgument&) {
    // singular draw
    RunRecord r;
    r.seed = seed;
    r.final_state = svd(w0);
    r.final_energy = loss(config.problem, w0);
    r.effective_rank = r.final_state.sigma.sum() > 0.0 ? effective_rank(r.final_state.sigma) : 0.0;
    r.terminated = Termination::RankCollapse;
    return r;
  }
}

}  // namespace

BatchResult run_batch(const ExperimentConfig& config, int jobs) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_runs);
  std::vector<RunRecord> records(n);

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) records[i] = run_one(config, config.seed_base + i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < n; i = next++) {
            records[i] = run_one(config, config.seed_base + i);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
          next = n;
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  BatchResult result;
  result.name = config.name;
  result.config_hash = config_hash(config);
  result.records = std::move(records);
  result.histogram = make_histogram(result.records, config.histogram);
  return result;
}

std::string batch_digest(const BatchResult& result) {
  return to_hex(fnv1a64(runs_csv(result)));
}

std::array<double, 3> random_rank_two_completion(const CyclePattern& phi, double sd, Rng& rng) {
  for (;;) {
    const double w12 = rng.normal(0.0, sd);
    const double w31 = rng.normal(0.0, sd);
    try {
      const double w23 = rank_two_completion(phi, w12, w31);
      if (std::isfinite(w23)) return {w12, w23, w31};
    } catch (const InvalidArgument&) {
      // degenerate pivot; redraw
    }
  }
}

std::vector<McStudyEntry> run_mc_study(const ExperimentConfig& config, int jobs) {
  config.validate();
  Matrix cycle_mask(3, 3);
  cycle_mask << 1, 0, 1, 1, 1, 0, 0, 1, 1;
  if (config.problem.dim() != 3 || config.problem.mask != cycle_mask) {
    throw ConfigError("volume-mc needs the 3x3 cycle mask [[1,0,1],[1,1,0],[0,1,1]]");
  }
  const CyclePattern phi = CyclePattern::from_matrix(config.problem.phi);
  const auto& mc = config.mc_volume;

  std::vector<McStudyEntry> entries;
  const auto m = phi.distinguished_point();
  entries.push_back(McStudyEntry{"M", m[0], m[1], m[2], {}});
  Rng rng(derive_seed(mc.seed, 0));
  for (int k = 1; k <= mc.competitors; ++k) {
    const auto p = random_rank_two_completion(phi, mc.competitor_sd, rng);
    entries.push_back(McStudyEntry{"R" + std::to_string(k), p[0], p[1], p[2], {}});
  }

  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto& e = entries[k];
    McVolumeSpec spec;
    spec.center = phi.complete(e.w12, e.w23, e.w31);
    spec.free_entries = {{0, 1}, {2, 0}, {1, 2}};
    spec.cube_width = mc.cube_width;
    spec.sv_floor = mc.sv_floor;
    spec.n_samples = mc.n_samples;
    spec.seed = derive_seed(mc.seed, k + 1);
    e.result = mc_volume(spec, {}, jobs);
  }
  return entries;
}

}  // namespace dln
