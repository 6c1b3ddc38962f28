#pragma once

#include <iosfwd>

namespace positlab {

/// Runs the command-line front end. Returns 0 on success, 1 when a check
/// fails or a solve does not converge, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace positlab
