#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dln::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kRuntimeFailure = 2,
  kVerificationFailure = 3,
};

/// Environment variable naming the output directory when --out is absent.
inline constexpr const char* kOutDirEnv = "DLN_OUT_DIR";

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dln::cli
