#pragma once

#include <iosfwd>

namespace gaussdaemon::cli {

/// Exit status: 0 success, 2 invalid input or failed validation, 3 numeric
/// non-convergence or disagreement between independent routes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gaussdaemon::cli
