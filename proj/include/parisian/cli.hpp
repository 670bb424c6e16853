#pragma once

#include <iosfwd>

namespace parisian {

/// Exit codes: 0 success, 1 usage or invalid argument, 2 file I/O, 3 parse or
/// schema, 4 model validation, 5 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace parisian
