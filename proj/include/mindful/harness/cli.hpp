#pragma once

#include <iosfwd>

namespace mindful::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitClassifier = 3,
  kExitBenchmarkFailed = 4,
};

// Entry point of the `mindful` tool. Output goes to `out`, diagnostics and
// warnings to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mindful::harness
