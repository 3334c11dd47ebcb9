#include <string>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "dln/error.hpp"
#include "dln/random.hpp"

namespace dln {

double Rng::normal(double mean, double sd) {
  boost::random::normal_distribution<double> dist(mean, sd);
  return dist(engine_);
}

double Rng::uniform(double lo, double hi) {
  boost::random::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void WignerSpec::validate() const {
  if (!(sd > 0.0)) {
    throw InvalidArgument("WignerSpec: sd must be positive, got " + std::to_string(sd));
  }
  if (d < 1) throw InvalidArgument("WignerSpec: dimension must be positive");
}

Matrix sample_wigner(const WignerSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  Matrix m(spec.d, spec.d);
  for (Eigen::Index r = 0; r < spec.d; ++r) {
    for (Eigen::Index c = 0; c < spec.d; ++c) m(r, c) = rng.normal(spec.mu, spec.sd);
  }
  return m;
}

}  // namespace dln
