#pragma once

#include <iosfwd>

namespace dynens::cli {

/// Entry point behind the `dynens` binary. Returns 0 on success, 1 when a
/// module error surfaces (printed as one "error: <Kind>: <message>" line on
/// `err`), 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dynens::cli
