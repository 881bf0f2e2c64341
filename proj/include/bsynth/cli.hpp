#pragma once

#include <iosfwd>

namespace bsynth {

/// Exit codes: 0 success, 1 check failed or runtime error, 2 bad usage or
/// unreadable input, 3 max-N exceeded.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bsynth
