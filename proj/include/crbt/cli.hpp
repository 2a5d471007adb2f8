#pragma once

#include <string>
#include <vector>

namespace crbt {

// Command-line front end shared by the binary and the tests. `args` is the
// argument list in natural order without the program name. Returns the
// process exit status: 0 success, 2 configuration error, 1 runtime failure.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace crbt
