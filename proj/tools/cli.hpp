#pragma once

#include <iosfwd>

namespace sunny::cli {

// Entry point of the sunny-as2 tool. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sunny::cli
