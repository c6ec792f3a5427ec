#pragma once

#include <iosfwd>

namespace projflow::cli {

/// Exit codes: 0 success, 1 a check failed, 2 usage or input error.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace projflow::cli
