#pragma once

#include <iosfwd>

namespace cdice::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNoConvergence = 2;

/// Parses the command line and dispatches one subcommand:
///   bench <test1|test2|test3|test4|all>
///   policy <bau|optimal|sweep>
///   calibrate <eigen|timescales|fit>
///   spinup
/// Returns 0 on success, 1 on invalid input or data, 2 when a solver does
/// not converge.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cdice::cli
