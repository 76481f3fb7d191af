#pragma once

#include <iosfwd>

namespace poolmech {

/// Exit codes: success, configuration or input error, failed verification.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitCheckFailed = 2;

/// Command-line front end. Commands: solve-exogenous, solve-endogenous,
/// oracle, verify, sweep-eta, discretize, export-trace.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace poolmech
