#pragma once

#include <iosfwd>

namespace qcmps::cli {

/// Exit codes: 0 success, 1 usage/input error, 2 numerical or contract failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace qcmps::cli
