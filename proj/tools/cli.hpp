// Command-line front end. Split from main() so tests can drive it in-process.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tascl {

/// `args` excludes the program name. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tascl
