#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "dln/analysis.hpp"
#include "dln/error.hpp"
#include "dln/geometry.hpp"
#include "dln/random.hpp"

namespace dln {

namespace {

constexpr std::int64_t kBlockSize = 4096;

// Running log-sum-exp.
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double scaled = 0.0;  // sum of exp(x - max)
  std::int64_t count = 0;

  void add(double x) {
    if (x > max) {
      scaled = scaled * std::exp(max - x) + 1.0;
      max = x;
    } else {
      scaled += std::exp(x - max);
    }
    ++count;
  }

  void merge(const LogSum& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    if (other.max > max) {
      scaled = scaled * std::exp(max - other.max) + other.scaled;
      max = other.max;
    } else {
      scaled += other.scaled * std::exp(other.max - max);
    }
    count += other.count;
  }

  double log_total() const { return max + std::log(scaled); }
};

LogSum run_block(const McVolumeSpec& spec, const LogDensityFn& log_density, std::int64_t block) {
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(block)));
  const std::int64_t begin = block * kBlockSize;
  const std::int64_t end = std::min(spec.n_samples, begin + kBlockSize);
  const double half = 0.5 * spec.cube_width;
  LogSum sum;
  Matrix w = spec.center;
  for (std::int64_t k = begin; k < end; ++k) {
    for (const auto& [r, c] : spec.free_entries) w(r, c) = spec.center(r, c) + rng.uniform(-half, half);
    Eigen::JacobiSVD<Matrix> solver(w);
    const Vector& sigma = solver.singularValues();
    if (!(sigma(sigma.size() - 1) > spec.sv_floor)) continue;
    double value = 0.0;
    try {
      value = log_density ? log_density(sigma) : log_volume_density_dW(sigma);
    } catch (const DegenerateSpectrum&) {
      continue;  // measure-zero set of repeated singular values
    }
    sum.add(value);
  }
  return sum;
}

}  // namespace

void McVolumeSpec::validate() const {
  require_square_finite(center, "McVolumeSpec.center");
  if (free_entries.empty()) throw InvalidArgument("McVolumeSpec: no free coordinates");
  for (const auto& [r, c] : free_entries) {
    if (r < 0 || c < 0 || r >= center.rows() || c >= center.cols()) {
      throw InvalidArgument("McVolumeSpec: free coordinate outside the matrix");
    }
  }
  if (!(cube_width > 0.0)) throw InvalidArgument("McVolumeSpec: cube width H must be positive");
  if (!(sv_floor > 0.0)) throw InvalidArgument("McVolumeSpec: floor h must be positive");
  if (n_samples < 1) throw InvalidArgument("McVolumeSpec: need at least one sample");
}

McVolumeResult mc_volume(const McVolumeSpec& spec, const LogDensityFn& log_density, int jobs) {
  spec.validate();
  const std::int64_t n_blocks = (spec.n_samples + kBlockSize - 1) / kBlockSize;
  std::vector<LogSum> blocks(static_cast<std::size_t>(n_blocks));

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n_blocks)));
  if (workers == 1) {
    for (std::int64_t b = 0; b < n_blocks; ++b) {
      blocks[static_cast<std::size_t>(b)] = run_block(spec, log_density, b);
    }
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::int64_t b = next++; b < n_blocks; b = next++) {
            blocks[static_cast<std::size_t>(b)] = run_block(spec, log_density, b);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
          next = n_blocks;
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  LogSum total;
  for (const auto& b : blocks) total.merge(b);
  if (total.count == 0) {
    throw Error("mc_volume: no sample had smallest singular value above the floor");
  }
  return McVolumeResult{total.log_total() - std::log(static_cast<double>(total.count)),
                        total.count};
}

}  // namespace dln
