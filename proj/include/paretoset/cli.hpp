#pragma once

#include <iostream>

namespace paretoset {

// The `paretoset` command line: run, eval, export-front, serve.
// Exit codes: 0 success, 1 runtime failure, 2 invalid usage.
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

} // namespace paretoset
