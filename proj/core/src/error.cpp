#include "dln/error.hpp"

#include <sstream>

namespace dln {

namespace {

std::string degenerate_message(std::size_t i, std::size_t j, double gap) {
  std::ostringstream os;
  os << "degenerate spectrum: sigma_" << i << "^2 - sigma_" << j << "^2 = " << gap
     << " is below the gap tolerance";
  return os.str();
}

std::string collapse_message(std::size_t index, double sigma) {
  std::ostringstream os;
  os << "rank collapse: sigma_" << index << " = " << sigma;
  return os.str();
}

}  // namespace

DegenerateSpectrum::DegenerateSpectrum(std::size_t i, std::size_t j, double gap)
    : Error(degenerate_message(i, j, gap)), i_(i), j_(j), gap_(gap) {}

RankCollapse::RankCollapse(std::size_t index, double sigma)
    : Error(collapse_message(index, sigma)), index_(index) {}

FactorizationError::FactorizationError(const std::string& what, double input_norm)
    : Error(what + " (input Frobenius norm " + std::to_string(input_norm) + ")"),
      input_norm_(input_norm) {}

}  // namespace dln
