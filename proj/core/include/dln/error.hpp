#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dln {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by a caller-supplied value (bad dimension, sd <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two squared singular values are closer than the configured gap tolerance.
/// Indices are zero-based positions in the descending spectrum.
class DegenerateSpectrum : public Error {
 public:
  DegenerateSpectrum(std::size_t i, std::size_t j, double gap);

  std::size_t first() const noexcept { return i_; }
  std::size_t second() const noexcept { return j_; }
  double gap() const noexcept { return gap_; }

 private:
  std::size_t i_;
  std::size_t j_;
  double gap_;
};

/// The smallest singular value reached zero where a full-rank state is required.
class RankCollapse : public Error {
 public:
  RankCollapse(std::size_t index, double sigma);

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// The dense SVD backend did not produce a usable factorization.
class FactorizationError : public Error {
 public:
  FactorizationError(const std::string& what, double input_norm);

  double input_norm() const noexcept { return input_norm_; }

 private:
  double input_norm_;
};

/// Malformed experiment configuration. Maps to CLI exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dln
