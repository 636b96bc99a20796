#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kgforge::cli {

// Runs one subcommand. `args` excludes the program name. Exit status is 0 on
// success, 2 for invalid flags or parameters, 1 for bad input data (the
// first offending record id goes to err).
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace kgforge::cli
