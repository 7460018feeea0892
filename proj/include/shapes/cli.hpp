#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shapes {

/// Runs the command-line front end. `args` excludes the program name.
/// Returns the process exit status: 0 on success, 1 on a runtime failure,
/// 2 on a usage error. Diagnostics go to `err` as a single line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shapes
