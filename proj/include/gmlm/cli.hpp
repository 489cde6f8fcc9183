#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gmlm {

// Full command-line driver; args excludes the program name. Exit codes:
// 0 success, 1 failed checks or numeric trouble, 2 bad usage or invalid
// inputs, 3 capacity limits.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gmlm
