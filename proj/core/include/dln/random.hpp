#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>

#include "dln/linalg.hpp"

namespace dln {

/// Seeded generator used everywhere in the library. The engine is the 64-bit
/// Mersenne twister and the distributions come from Boost.Random, whose
/// algorithms are fixed across standard libraries, so a seed reproduces the
/// same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal(double mean, double sd);
  double uniform(double lo, double hi);
  std::uint64_t next_u64() { return engine_(); }

 private:
  boost::random::mt19937_64 engine_;
};

/// splitmix64 finalizer; derives independent child seeds from (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Wigner(mu, sd) ensemble: i.i.d. normal entries.
struct WignerSpec {
  double mu = 0.0;
  double sd = 1e-3;
  Eigen::Index d = 2;

  void validate() const;
};

/// Draws a d x d matrix, filling entries row by row from Rng(seed).
Matrix sample_wigner(const WignerSpec& spec, std::uint64_t seed);

}  // namespace dln
