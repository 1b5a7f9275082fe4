#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdev {

/// Run one CLI invocation. `args` excludes the program name; `-` as an input
/// path reads from `in`, and `-` as an output path writes to `out`.
/// Returns 0 on success, 1 on analysis errors, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

} // namespace qdev
