#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace logmorph::cli {

/// Runs one command line (without the program name). Returns the process exit
/// code: 0 success, 1 fatal error, 2 usage error.
int run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err);

}  // namespace logmorph::cli
