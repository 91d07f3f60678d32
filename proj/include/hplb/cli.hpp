#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hplb {

/// Runs one CLI invocation. args excludes the program name.
/// Exit status: 0 success, 2 usage or validation error, 3 internal or output error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hplb
