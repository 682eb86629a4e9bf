#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rgbspeckle::cli {

/// Runs one CLI invocation. `args` excludes the program name. Returns the
/// process exit code: 0 on success, 1 on a pipeline error (reported on `err`
/// as one `error[module]: message` line), 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rgbspeckle::cli
