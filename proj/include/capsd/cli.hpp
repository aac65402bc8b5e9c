#pragma once

#include <iosfwd>

namespace capsd {

/// Entry point behind the capsd executable; streams are injectable so the
/// tests can run commands in-process.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace capsd
