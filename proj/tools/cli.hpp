#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace osgilab::cli {

/// Runs one command-line invocation. `args` excludes the program name.
/// Exit codes: 0 = success / property holds; 1 = analysis ran and found a
/// violation, deadlock, or non-inclusion; 2 = usage, parse, or validation
/// error.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace osgilab::cli
