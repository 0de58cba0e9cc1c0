#pragma once

#include <iosfwd>

namespace hdnn {

/// Exit codes: 0 success, 1 invalid usage or input, 2 a verification check failed.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hdnn
