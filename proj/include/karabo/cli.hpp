#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace karabo::cli {

/// Runs the `karabo` command line. Returns the process exit code: 0 on
/// success, 1 on a runtime failure (with a JSON error summary on `err`),
/// 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace karabo::cli
