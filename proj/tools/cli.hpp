#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace umig::cli {

/// Runs one subcommand. Returns 0 on success, 1 on a domain error and 2 on a
/// usage error. Files named with -o/--out are replaced atomically. args
/// excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace umig::cli
