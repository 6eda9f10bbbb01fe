#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace torus_atlas::cli {

// Runs the command line (args excludes the program name). Exit codes: 0 on
// success or help, 1 on validation or parse errors, 2 on numerical failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace torus_atlas::cli
