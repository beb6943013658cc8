#pragma once

#include <iosfwd>

namespace voxenc::cli {

/// Runs one command line. Returns the process exit code: 0 on success, 2 on
/// invalid input, 1 on any other failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace voxenc::cli
