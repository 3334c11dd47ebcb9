#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dln {

/// One numerical comparison: the worst observed error against its tolerance.
struct CheckResult {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Self-checks shipped with the library, each comparing a fast code path with
/// a slow independent construction:
///   flow-equivalence  singular-coordinate flow vs the layer-wise flow
///   svd-jacobian      assembled Jacobian determinant vs the Vandermonde form
///   metric-operator   eigenbasis operator vs the explicit matrix-power sum
///   spectrum-bounds   attraction rates vs the metric eigenvalue range
/// Sizes are kept small so the whole set runs in a few seconds.
std::vector<SuiteResult> run_verification(std::uint64_t seed = 0);

}  // namespace dln
